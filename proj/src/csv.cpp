#include "pcusum/csv.hpp"

#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace pcusum {

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        const auto b = cell.find_first_not_of(" \t\r");
        const auto e = cell.find_last_not_of(" \t\r");
        out.push_back(b == std::string::npos ? std::string() : cell.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

bool parse_number(const std::string& s, double& out) {
    if (s.empty()) return false;
    const char* first = s.data();
    if (*first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size();
}

bool blank(const std::string& line) { return line.find_first_not_of(" \t\r") == std::string::npos; }

[[noreturn]] void fail(std::size_t row, const std::string& what) {
    throw CsvError("row " + std::to_string(row) + ": " + what);
}

}  // namespace

Series read_series(std::istream& in) {
    Series s;
    std::string line;
    std::size_t row = 0;
    std::optional<std::size_t> width;
    while (std::getline(in, line)) {
        ++row;
        if (blank(line)) continue;
        const auto cells = split(line);
        double v = 0.0;
        if (!width) {
            width = cells.size();
            if (*width > 3) fail(row, "expected at most 3 columns (index, value, period_start)");
            if (!parse_number(cells.size() == 1 ? cells[0] : cells[1], v)) continue;  // header
        }
        if (cells.size() != *width) fail(row, "expected " + std::to_string(*width) + " columns");
        const std::string& cell = cells.size() == 1 ? cells[0] : cells[1];
        if (!parse_number(cell, v)) fail(row, "value '" + cell + "' is not a number");
        s.values.push_back(v);
        s.rows.push_back(row);
        if (*width == 3) {
            double mark = 0.0;
            if (!parse_number(cells[2], mark) || (mark != 0.0 && mark != 1.0)) {
                fail(row, "period_start must be 0 or 1");
            }
            if (!s.period_marks) s.period_marks.emplace();
            s.period_marks->push_back(mark == 1.0);
        }
    }
    return s;
}

WideSeries read_wide(std::istream& in) {
    WideSeries w;
    std::string line;
    std::size_t row = 0;
    bool first = true;
    std::size_t width = 0;
    while (std::getline(in, line)) {
        ++row;
        if (blank(line)) continue;
        const auto cells = split(line);
        if (first) {
            first = false;
            width = cells.size();
            if (width < 2) fail(row, "expected a tick column and at least one stream column");
            double v = 0.0;
            if (!parse_number(cells[0], v)) {
                w.names.assign(cells.begin() + 1, cells.end());
                continue;
            }
            for (std::size_t l = 1; l < width; ++l) w.names.push_back("s" + std::to_string(l));
        }
        if (cells.size() != width) fail(row, "expected " + std::to_string(width) + " columns");
        std::vector<double> tick(width - 1);
        for (std::size_t l = 1; l < width; ++l) {
            if (!parse_number(cells[l], tick[l - 1])) fail(row, "value '" + cells[l] + "' is not a number");
        }
        w.ticks.push_back(std::move(tick));
        w.rows.push_back(row);
    }
    return w;
}

std::string format_double(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

}  // namespace pcusum
