#include <doctest.h>

#include <cmath>
#include <sstream>

#include "pcusum/csv.hpp"
#include "pcusum/detect.hpp"
#include "pcusum/sim.hpp"

using namespace pcusum;

namespace {

PhaseDensity g(double mu) { return PhaseDensity::gaussian_unit_var(mu); }

const StreamLaws ref = reference_gaussian_scenario();

}  // namespace

TEST_CASE("reference scenario") {
    CHECK(ref.pre.period() == 2);
    CHECK(ref.post.phase(1) == g(1.0));
    CHECK(ref.post.phase(2) == g(0.5));
    CHECK(avg_kl(ref.pre, ref.post) == doctest::Approx(0.3125).epsilon(1e-15));
}

TEST_CASE("generate") {
    const auto a = generate(ref.pre, ref.post, 40, 100, 9);
    const auto b = generate(ref.pre, ref.post, 40, 100, 9);
    const auto c = generate(ref.pre, ref.post, 40, 100, 10);
    CHECK(a == b);
    CHECK(a != c);
    CHECK(a.size() == 100);

    // Same seed, same draws: only the mean shift after the change differs.
    const auto never = generate(ref.pre, ref.post, std::nullopt, 100, 9);
    for (std::size_t i = 0; i < 39; ++i) CHECK(a[i] == never[i]);
    for (std::size_t i = 39; i < 100; ++i) {
        const double shift = (i % 2 == 0) ? 1.0 : 0.5;
        CHECK(a[i] == doctest::Approx(never[i] + shift).epsilon(1e-12));
    }

    const IpidLaw cp({PhaseDensity::poisson(3.0)}), cq({PhaseDensity::poisson(30.0)});
    const auto all_post = generate(cp, cq, 1, 20000, 4);
    double mean = 0.0;
    for (double x : all_post) mean += x;
    mean /= 20000.0;
    CHECK(std::abs(mean - 30.0) < 4.0 * std::sqrt(30.0 / 20000.0));
    const auto none = generate(cp, cq, std::nullopt, 20000, 4);
    mean = 0.0;
    for (double x : none) {
        CHECK(x == std::floor(x));
        mean += x;
    }
    mean /= 20000.0;
    CHECK(std::abs(mean - 3.0) < 4.0 * std::sqrt(3.0 / 20000.0));

    CHECK_THROWS_AS(generate(ref.pre, ref.post, 0, 10, 1), ConfigError);
    CHECK_THROWS_AS(generate(ref.pre, ref.post, 5, 0, 1), ConfigError);
    CHECK_THROWS_AS(generate(ref.pre, IpidLaw({g(1.0)}), 5, 10, 1), ConfigError);
}

TEST_CASE("generate honours the phase offset") {
    const IpidLaw pre({g(0.0), g(100.0)});
    const auto xs = generate(pre, pre, std::nullopt, 4, 1, 1);
    CHECK(xs[0] > 50.0);
    CHECK(xs[1] < 50.0);
}

TEST_CASE("run_path agrees with the detector on the same draws") {
    const LlrTable table(ref.pre, ref.post);
    const LawSampler post(ref.post);
    for (std::int64_t start : {1, 2, 7}) {
        for (std::uint64_t seed = 0; seed < 50; ++seed) {
            Rng r1(seed), r2(seed);
            const PathOutcome o = run_path(table, post, start, 5.0, 500, r1);
            std::vector<double> xs;
            for (std::int64_t k = 0; k < 500; ++k) xs.push_back(post.draw(phase_of(start + k, 2), r2));
            const DetectionRun d = run_detector(xs, ref.pre, ref.post, 5.0, 500, {.phase_offset = start - 1});
            CHECK(o.stopped == d.stopped);
            CHECK(o.steps == d.samples);
        }
    }
}

TEST_CASE("MTFA") {
    SUBCASE("identical laws are always censored") {
        const MtfaEstimate e = estimate_mtfa({ref.pre, ref.pre}, 1.0, 50, 300, 1, Exec::serial);
        CHECK(e.censor_frac == 1.0);
        CHECK(e.lower_bound);
        CHECK(e.mean == 300.0);
        CHECK(e.ci_half == 0.0);
    }
    SUBCASE("the false alarm bound holds for moderate thresholds") {
        for (double a : {3.0, 4.0}) {
            const MtfaEstimate e = estimate_mtfa(ref, a, 3000, static_cast<std::int64_t>(std::ceil(10.0 * std::exp(a))), 21);
            CHECK(e.mean - e.ci_half >= std::exp(a));
            CHECK(e.paths == 3000);
        }
    }
    SUBCASE("serial and parallel agree bitwise") {
        const MtfaEstimate s = estimate_mtfa(ref, 3.0, 500, 300, 8, Exec::serial);
        const MtfaEstimate p = estimate_mtfa(ref, 3.0, 500, 300, 8, Exec::parallel);
        CHECK(s.mean == p.mean);
        CHECK(s.ci_half == p.ci_half);
        CHECK(s.censor_frac == p.censor_frac);
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS(estimate_mtfa(ref, 3.0, 1, 100, 1), ConfigError);
        CHECK_THROWS_AS(estimate_mtfa(ref, 3.0, 10, 0, 1), ConfigError);
    }
}

TEST_CASE("WADD") {
    SUBCASE("delay sits between A/I and A/I plus a bounded overshoot") {
        const WaddEstimate e = estimate_wadd(ref, 6.0, 4000, 2);
        CHECK(e.per_nu.size() == 2);
        CHECK(e.mean == std::max(e.per_nu[0], e.per_nu[1]));
        CHECK(e.mean == e.per_nu[static_cast<std::size_t>(e.worst_nu - 1)]);
        CHECK(e.mean >= 6.0 / 0.3125 * 0.8);
        CHECK(e.mean <= 2.0 * 6.0 / 0.3125);
        CHECK(e.censor_frac == 0.0);
    }
    SUBCASE("period one matches the single-phase detector") {
        const StreamLaws iid{IpidLaw({g(0.0)}), IpidLaw({g(0.75)})};
        const WaddEstimate e = estimate_wadd(iid, 4.0, 2000, 3);
        CHECK(e.per_nu.size() == 1);
        CHECK(e.worst_nu == 1);
        // The same kernel run over a doubled period with identical phases gives the same draws per nu = 1.
        const StreamLaws twice{IpidLaw({g(0.0), g(0.0)}), IpidLaw({g(0.75), g(0.75)})};
        CHECK(estimate_wadd(twice, 4.0, 2000, 3).per_nu[0] == e.per_nu[0]);
    }
    SUBCASE("more information means shorter delays") {
        const IpidLaw pre({g(0.0), g(0.0)});
        double prev = INFINITY;
        for (double mu : {0.5, 0.75, 1.0, 1.5, 2.0}) {
            const WaddEstimate e = estimate_wadd({pre, IpidLaw({g(mu), g(mu)})}, 5.0, 3000, 4);
            CHECK(e.mean <= prev);
            prev = e.mean;
        }
        // Doubling the mean shift quadruples I; delays should drop by well over half.
        const double d1 = estimate_wadd({pre, IpidLaw({g(1.0), g(1.0)})}, 8.0, 3000, 5).mean;
        const double d2 = estimate_wadd({pre, IpidLaw({g(2.0), g(2.0)})}, 8.0, 3000, 5).mean;
        CHECK(d2 < 0.5 * d1);
    }
    SUBCASE("censoring is reported") {
        const WaddEstimate e = estimate_wadd(ref, 50.0, 20, 1, 10, Exec::serial);
        CHECK(e.censor_frac == 1.0);
        CHECK(e.mean == 10.0);
    }
    SUBCASE("serial and parallel agree bitwise") {
        const WaddEstimate s = estimate_wadd(ref, 4.0, 600, 6, 100000, Exec::serial);
        const WaddEstimate p = estimate_wadd(ref, 4.0, 600, 6, 100000, Exec::parallel);
        CHECK(s.per_nu == p.per_nu);
        CHECK(s.ci_half == p.ci_half);
    }
}

TEST_CASE("trade-off curve") {
    const std::vector<double> thresholds{2.0, 3.0};
    const auto pts = tradeoff_curve(ref, thresholds, 400, 7, {.exec = Exec::serial});
    const auto again = tradeoff_curve(ref, thresholds, 400, 7);
    REQUIRE(pts.size() == 2);
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(pts[i].threshold == thresholds[i]);
        CHECK(pts[i].theory_delay == doctest::Approx(thresholds[i] / 0.3125));
        CHECK(pts[i].mtfa.horizon == static_cast<std::int64_t>(std::ceil(10.0 * std::exp(thresholds[i]))));
        CHECK(pts[i].mtfa.mean == again[i].mtfa.mean);
        CHECK(pts[i].wadd.mean == again[i].wadd.mean);
    }
    CHECK(pts[1].wadd.mean > pts[0].wadd.mean);
    CHECK(pts[1].mtfa.mean > pts[0].mtfa.mean);

    // A threshold's estimate does not depend on its neighbours in the list.
    const std::vector<double> single{3.0};
    CHECK(tradeoff_curve(ref, single, 400, 7)[0].wadd.mean == pts[1].wadd.mean);

    CHECK_THROWS_AS(tradeoff_curve(ref, std::vector<double>{}, 10, 1), ConfigError);
    CHECK_THROWS_AS(tradeoff_curve({ref.pre, ref.pre}, thresholds, 10, 1), ConfigError);
    CHECK_THROWS_AS(tradeoff_curve(ref, std::vector<double>{-1.0}, 10, 1), ConfigError);

    std::ostringstream os;
    write_curve_csv(os, pts);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == "A,log_mtfa_est,mtfa_ci,wadd_est,wadd_ci,theory,censor_frac");
    std::getline(is, line);
    CHECK(line.rfind("2," + format_double(std::log(pts[0].mtfa.mean)) + ",", 0) == 0);
    int rows = 1;
    while (std::getline(is, line)) ++rows;
    CHECK(rows == 2);
}
