// Serial reference versus OpenMP path loop for the Monte Carlo estimators.
//
//   pcusum_bench [paths] [threshold]

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <iostream>

#include <omp.h>

#include "pcusum/multi.hpp"
#include "pcusum/sim.hpp"

namespace {

template <class Fn>
double time_ms(Fn&& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
    using namespace pcusum;
    const std::int64_t paths = argc > 1 ? std::atoll(argv[1]) : 5000;
    const double a = argc > 2 ? std::atof(argv[2]) : 6.0;
    const StreamLaws laws = reference_gaussian_scenario();
    const auto horizon = static_cast<std::int64_t>(std::ceil(10.0 * std::exp(a)));

    std::cout << "threads " << omp_get_max_threads() << ", paths " << paths << ", A " << a << '\n';
    std::cout << std::left << std::setw(12) << "kernel" << std::setw(14) << "serial_ms" << std::setw(14)
              << "parallel_ms" << std::setw(10) << "speedup" << "match\n";

    const auto row = [](const char* name, double ts, double tp, bool match) {
        std::cout << std::left << std::setw(12) << name << std::setw(14) << ts << std::setw(14) << tp << std::setw(10)
                  << ts / tp << (match ? "yes" : "NO") << '\n';
    };

    MtfaEstimate ms, mp;
    const double t_ms = time_ms([&] { ms = estimate_mtfa(laws, a, paths, horizon, 7, Exec::serial); });
    const double t_mp = time_ms([&] { mp = estimate_mtfa(laws, a, paths, horizon, 7, Exec::parallel); });
    row("mtfa", t_ms, t_mp, ms.mean == mp.mean && ms.ci_half == mp.ci_half);

    WaddEstimate ws, wp;
    const double t_ws = time_ms([&] { ws = estimate_wadd(laws, a, paths, 7, 1'000'000, Exec::serial); });
    const double t_wp = time_ms([&] { wp = estimate_wadd(laws, a, paths, 7, 1'000'000, Exec::parallel); });
    row("wadd", t_ws, t_wp, ws.mean == wp.mean && ws.per_nu == wp.per_nu);

    const std::vector<IpidLaw> posts{laws.post, IpidLaw({PhaseDensity::gaussian_unit_var(-0.5), PhaseDensity::gaussian_unit_var(0.25)})};
    MartingaleReport rs, rp;
    const std::set<std::int64_t> pts{10, 100};
    const double t_rs = time_ms([&] { rs = martingale_check(laws.pre, posts, pts, paths, 7, Exec::serial); });
    const double t_rp = time_ms([&] { rp = martingale_check(laws.pre, posts, pts, paths, 7, Exec::parallel); });
    row("martingale", t_rs, t_rp, rs.points.back().mean == rp.points.back().mean);
    return 0;
}
