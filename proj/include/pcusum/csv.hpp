#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace pcusum {

class CsvError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// One stream read from an (index, value[, period_start]) file.
struct Series {
    std::vector<double> values;
    std::vector<std::size_t> rows;               // 1-based file line of each value
    std::optional<std::vector<bool>> period_marks;  // present when a third column exists
};

/// Reads a single-stream CSV. A non-numeric first line is treated as a header.
/// Rows with one column are bare values; otherwise column 2 is the value.
Series read_series(std::istream& in);

/// Synchronous multi-stream samples: ticks[n][l] is stream l at tick n + 1.
struct WideSeries {
    std::vector<std::string> names;
    std::vector<std::vector<double>> ticks;
    std::vector<std::size_t> rows;
};

/// Reads a wide CSV: "tick,<stream 1>,...,<stream M>".
WideSeries read_wide(std::istream& in);

/// Shortest decimal text that round-trips to the same double.
std::string format_double(double v);

}  // namespace pcusum
