#include <doctest.h>

#include <cmath>
#include <sstream>

#include "oracles.hpp"
#include "pcusum/csv.hpp"
#include "pcusum/detect.hpp"
#include "pcusum/distributed.hpp"
#include "pcusum/multi.hpp"
#include "pcusum/rng.hpp"

using namespace pcusum;

namespace {

PhaseDensity g(double mu) { return PhaseDensity::gaussian_unit_var(mu); }

const IpidLaw null2({g(0.0), g(0.0)});
const StreamLaws gauss_stream{null2, IpidLaw({g(1.0), g(0.5)})};
const StreamLaws count_stream{IpidLaw({PhaseDensity::poisson(2.0), PhaseDensity::poisson(0.5)}),
                              IpidLaw({PhaseDensity::poisson(4.0), PhaseDensity::poisson(1.5)})};
const StreamLaws quiet_stream{null2, null2};

}  // namespace

TEST_CASE("one stream reduces to the single-law detector") {
    StreamBank bank({gauss_stream});
    CandidateBank cand(gauss_stream.pre, {gauss_stream.post});
    CusumState c = cusum_init();
    Rng rng(1);
    for (int n = 1; n <= 400; ++n) {
        const double x = rng.normal() + (n > 200 ? 0.7 : 0.0);
        bank.step(std::span<const double>(&x, 1));
        c = cusum_step(c, x, gauss_stream.pre, gauss_stream.post);
        cand.step(x);
        CHECK(bank.d()[0] == c.w);
        CHECK(bank.log_s()[0] == cand.state().log_r[0]);
        CHECK(bank.n() == n);
    }
}

TEST_CASE("each stream's statistic depends only on its own data") {
    const std::vector<StreamLaws> laws{gauss_stream, count_stream, gauss_stream};
    StreamBank a(laws), b(laws);
    std::vector<CusumState> solo(3, cusum_init());
    Rng rng(2);
    const LawSampler gs(gauss_stream.post), cs(count_stream.pre);
    for (int n = 1; n <= 300; ++n) {
        const std::int64_t ph = phase_of(n, 2);
        std::vector<double> xa{gs.draw(ph, rng), cs.draw(ph, rng), gs.draw(ph, rng) - 1.0};
        std::vector<double> xb = xa;
        xb[1] = cs.draw(ph, rng);  // perturb stream 2 only
        a.step(xa);
        b.step(xb);
        for (std::size_t l = 0; l < 3; ++l) solo[l] = cusum_step(solo[l], xa[l], laws[l].pre, laws[l].post);
        CHECK(a.d()[0] == b.d()[0]);
        CHECK(a.d()[2] == b.d()[2]);
        CHECK(a.log_s()[0] == b.log_s()[0]);
        for (std::size_t l = 0; l < 3; ++l) CHECK(a.d()[l] == solo[l].w);
    }
}

TEST_CASE("a stream with equal laws stays at zero") {
    StreamBank bank({quiet_stream, gauss_stream});
    Rng rng(3);
    for (int n = 1; n <= 200; ++n) {
        const std::vector<double> xs{rng.normal() * 5.0, rng.normal()};
        bank.step(xs);
        CHECK(bank.d()[0] == 0.0);
        CHECK(std::exp(bank.log_s()[0]) == doctest::Approx(static_cast<double>(n)).epsilon(1e-12));
    }
}

TEST_CASE("combined SR statistic matches the defining double sums") {
    const std::vector<StreamLaws> laws{gauss_stream, count_stream, gauss_stream};
    for (int trial = 0; trial < 100; ++trial) {
        Rng rng(derive_seed(5, static_cast<std::uint64_t>(trial)));
        const int len = 1 + static_cast<int>(rng.engine()() % 40);
        const LawSampler s0(laws[0].pre), s1(laws[1].pre);
        std::vector<std::vector<double>> data(3);
        StreamBank bank(laws);
        for (int n = 1; n <= len; ++n) {
            const std::int64_t ph = phase_of(n, 2);
            const std::vector<double> xs{s0.draw(ph, rng) + 0.5, s1.draw(ph, rng), s0.draw(ph, rng)};
            for (std::size_t l = 0; l < 3; ++l) data[l].push_back(xs[l]);
            bank.step(xs);
        }
        double total = 0.0;
        for (std::size_t l = 0; l < 3; ++l) {
            const double r = oracle::sr_double_sum(oracle::log_ratios(data[l], laws[l].pre, laws[l].post));
            CHECK(oracle::close(std::exp(bank.log_s()[l]), r, 1e-9));
            total += r;
        }
        CHECK(oracle::close(std::exp(bank.log_total()), total, 1e-9));
    }
}

TEST_CASE("stopping rules") {
    SUBCASE("max rule threshold is log(beta M)") {
        const double beta = std::exp(3.0);
        const double a = std::log(beta) + std::log(3.0);
        CHECK(a == 3.0 + std::log(3.0));
        StreamBank bank({quiet_stream, gauss_stream, quiet_stream});
        // Z = x - 0.5 on phase 1 for the middle stream.
        const double x = 0.5 + a;
        const std::vector<double> xs{0.0, x, 0.0};
        bank.step(xs);
        CHECK(stop_dm(bank, beta) == (bank.d()[1] >= a));
        CHECK(bank.d()[1] == doctest::Approx(a).epsilon(1e-14));
        CHECK(stop_dm(bank, beta * 0.999));
        CHECK_FALSE(stop_dm(bank, beta * 1.001));
        CHECK(bank.leading_stream() == 1);
    }
    SUBCASE("all-null streams fire at ceil(beta)") {
        for (double beta : {2.5, 6.1, 14.9}) {
            StreamBank bank({quiet_stream, quiet_stream, quiet_stream});
            const std::vector<double> xs{0.3, -0.2, 1.0};
            std::int64_t n = 0;
            do {
                bank.step(xs);
                ++n;
            } while (!stop_srd(bank, beta));
            CHECK(n == static_cast<std::int64_t>(std::ceil(beta)));
            CHECK_FALSE(stop_dm(bank, beta));
        }
    }
    SUBCASE("invalid beta") {
        const StreamBank bank({gauss_stream});
        CHECK_THROWS_AS(stop_dm(bank, 0.0), ConfigError);
        CHECK_THROWS_AS(stop_srd(bank, -2.0), ConfigError);
    }
}

TEST_CASE("a change in one stream is attributed to that stream") {
    const std::vector<StreamLaws> laws{gauss_stream, gauss_stream, gauss_stream};
    const LawSampler pre(null2), post(gauss_stream.post);
    const double beta = std::exp(5.0);
    const std::int64_t nu = 51;
    int attributed = 0, alarms = 0;
    for (int p = 0; p < 1000; ++p) {
        Rng rng(derive_seed(6, static_cast<std::uint64_t>(p)));
        StreamBank bank(laws);
        std::vector<double> xs(3);
        for (std::int64_t n = 1; n <= 2000; ++n) {
            const std::int64_t ph = phase_of(n, 2);
            for (std::size_t l = 0; l < 3; ++l) {
                xs[l] = (l == 1 && n >= nu) ? post.draw(ph, rng) : pre.draw(ph, rng);
            }
            bank.step(xs);
            if (stop_dm(bank, beta)) {
                ++alarms;
                if (bank.leading_stream() == 1) ++attributed;
                break;
            }
        }
    }
    CHECK(alarms > 950);
    CHECK(attributed > 900);
}

TEST_CASE("no change: the max rule stays quiet for a long stretch") {
    const std::vector<StreamLaws> laws{gauss_stream, gauss_stream, gauss_stream};
    const LawSampler pre(null2);
    Rng rng(7);
    StreamBank bank(laws);
    std::vector<double> xs(3);
    bool fired = false;
    for (std::int64_t n = 1; n <= 500 && !fired; ++n) {
        for (double& x : xs) x = pre.draw(phase_of(n, 2), rng);
        bank.step(xs);
        fired = stop_dm(bank, std::exp(12.0));
    }
    CHECK_FALSE(fired);
}

TEST_CASE("errors identify the offending stream") {
    StreamBank bank({gauss_stream, count_stream});
    const std::vector<double> ok{0.1, 2.0};
    bank.step(ok);
    const std::vector<double> d_before(bank.d().begin(), bank.d().end());
    const std::vector<double> bad{0.1, 1.5};
    try {
        bank.step(bad);
        FAIL("expected a stream error");
    } catch (const StreamError& e) {
        CHECK(e.stream() == 1);
        CHECK(std::string(e.what()).find("stream 2") != std::string::npos);
        CHECK(std::string(e.what()).find("tick 2") != std::string::npos);
    }
    CHECK(bank.n() == 1);
    CHECK(std::vector<double>(bank.d().begin(), bank.d().end()) == d_before);
    CHECK_THROWS_AS(bank.step(std::vector<double>{1.0}), ConfigError);
    CHECK_THROWS_AS(StreamBank({}), ConfigError);
    CHECK_THROWS_AS(StreamBank({gauss_stream, StreamLaws{IpidLaw({g(0.0)}), IpidLaw({g(1.0)})}}), ConfigError);
}

TEST_CASE("phase offset shifts every stream") {
    StreamBank bank({gauss_stream}, 1);
    CHECK(bank.phase_at(1) == 2);
    const double x = 1.0;
    bank.step(std::span<const double>(&x, 1));
    CHECK(bank.d()[0] == doctest::Approx(0.5 * 1.0 - 0.125));
}

TEST_CASE("dist_step and csv rows") {
    const IpidLaw null1({g(0.0)});
    const StreamBank start({StreamLaws{null1, IpidLaw({g(1.0)})}, StreamLaws{null1, null1}});
    const std::vector<double> xs{1.5, 0.0};  // Z = (1, 0)
    const StreamBank after = dist_step(start, xs);
    CHECK(start.n() == 0);
    CHECK(after.n() == 1);
    std::ostringstream os;
    write_dist_header(os, 2);
    write_dist_row(os, after);
    CHECK(os.str() == "tick,D1,D2,logS1,logS2,logS\n1,1,0,1,0," + format_double(after.log_total()) + "\n");
}
