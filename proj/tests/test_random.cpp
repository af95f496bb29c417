#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <map>
#include <vector>

#include "permacox/random.hpp"
#include "support/testutil.hpp"

using namespace permacox;

TEST_CASE("philox4x32-10 known-answer vectors") {
    // Reference vectors from the Random123 distribution.
    auto out = Philox4x32::run_rounds({0, 0, 0, 0}, {0, 0});
    CHECK(out[0] == 0x6627e8d5u);
    CHECK(out[1] == 0xe169c58du);
    CHECK(out[2] == 0xbc57ac4cu);
    CHECK(out[3] == 0x9b00dbd8u);

    out = Philox4x32::run_rounds({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                                 {0xffffffffu, 0xffffffffu});
    CHECK(out[0] == 0x408f276du);
    CHECK(out[1] == 0x41c83b0eu);
    CHECK(out[2] == 0xa20bc7c6u);
    CHECK(out[3] == 0x6d5451fdu);

    out = Philox4x32::run_rounds({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                                 {0xa4093822u, 0x299f31d0u});
    CHECK(out[0] == 0xd16cfe09u);
    CHECK(out[1] == 0x94fdccebu);
    CHECK(out[2] == 0x5001e420u);
    CHECK(out[3] == 0x24126ea1u);
}

TEST_CASE("streams are deterministic and distinct") {
    auto a = make_stream(42, Stream::field_noise, 7, 3);
    auto b = make_stream(42, Stream::field_noise, 7, 3);
    auto c = make_stream(42, Stream::field_noise, 8, 3);
    auto d = make_stream(42, Stream::counts, 7, 3);
    bool same = true, diff_rep = false, diff_purpose = false;
    for (int i = 0; i < 64; ++i) {
        const auto va = a();
        same = same && (va == b());
        diff_rep = diff_rep || (va != c());
        diff_purpose = diff_purpose || (va != d());
    }
    CHECK(same);
    CHECK(diff_rep);
    CHECK(diff_purpose);
}

TEST_CASE("uniform01 range and moments") {
    auto eng = make_stream(1, Stream::generic);
    const int n = 200000;
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double u = uniform01(eng);
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        sum += u;
        sum2 += u * u;
    }
    const double m = sum / n;
    const double v = sum2 / n - m * m;
    CHECK(std::fabs(m - 0.5) < 4.0 * std::sqrt(1.0 / 12.0 / n));
    CHECK(std::fabs(v - 1.0 / 12.0) < 4.0 * 0.0745 / std::sqrt(double(n)));
}

TEST_CASE("gaussian stream moments") {
    GaussianStream gauss(make_stream(7, Stream::generic));
    const int n = 200000;
    std::vector<double> z(n);
    for (auto& v : z) v = gauss();
    CHECK(std::fabs(testutil::mean(z)) < 4.0 / std::sqrt(double(n)));
    CHECK(std::fabs(testutil::sample_var(z) - 1.0) < 4.0 * std::sqrt(2.0 / n));
    double skew = 0.0;
    for (double v : z) skew += v * v * v;
    skew /= n;
    CHECK(std::fabs(skew) < 4.0 * std::sqrt(15.0 / n));
}

TEST_CASE("gaussian stream is reproducible") {
    GaussianStream a(make_stream(9, Stream::field_noise, 1, 2));
    GaussianStream b(make_stream(9, Stream::field_noise, 1, 2));
    for (int i = 0; i < 100; ++i) CHECK(a() == b());
}

namespace {

// Chi-square goodness of fit of Poisson draws against the exact pmf.
double poisson_gof_p(double mu, int n_draws, std::uint64_t seed) {
    auto eng = make_stream(seed, Stream::generic);
    std::map<std::uint32_t, int> freq;
    for (int i = 0; i < n_draws; ++i) ++freq[poisson_draw(eng, mu)];

    const int k_max = static_cast<int>(mu + 8.0 * std::sqrt(mu)) + 3;
    double chi2 = 0.0;
    int bins = 0;
    double tail_obs = 0.0, tail_exp = 0.0;
    for (int k = 0; k <= k_max; ++k) {
        const double pk = std::exp(k * std::log(mu) - mu - std::lgamma(k + 1.0));
        const double expected = pk * n_draws;
        const double observed = freq.count(k) ? freq[k] : 0;
        if (expected < 5.0) {
            tail_obs += observed;
            tail_exp += expected;
            continue;
        }
        chi2 += (observed - expected) * (observed - expected) / expected;
        ++bins;
    }
    double above = 0.0;
    for (const auto& [k, c] : freq)
        if (k > static_cast<std::uint32_t>(k_max)) above += c;
    tail_obs += above;
    // P(X > k_max) for Poisson is the regularized lower incomplete gamma.
    tail_exp += n_draws * testutil::gammp(k_max + 1.0, mu);
    if (tail_exp >= 5.0) {
        chi2 += (tail_obs - tail_exp) * (tail_obs - tail_exp) / tail_exp;
        ++bins;
    }
    return 1.0 - testutil::chi2_cdf(chi2, bins - 1);
}

}  // namespace

TEST_CASE("poisson draws match the pmf in both regimes") {
    CHECK(poisson_gof_p(3.7, 200000, 11) > 0.001);   // inversion branch
    CHECK(poisson_gof_p(47.3, 200000, 12) > 0.001);  // PTRS branch
}

TEST_CASE("poisson moments and edge cases") {
    auto eng = make_stream(5, Stream::generic);
    CHECK(poisson_draw(eng, 0.0) == 0);
    CHECK_THROWS_AS(poisson_draw(eng, -1.0), std::invalid_argument);

    const double mu = 20.5;
    const int n = 100000;
    std::vector<double> draws(n);
    for (auto& d : draws) d = poisson_draw(eng, mu);
    CHECK(std::fabs(testutil::mean(draws) - mu) < 4.0 * std::sqrt(mu / n));
    CHECK(std::fabs(testutil::sample_var(draws) - mu) < 4.0 * mu * std::sqrt(3.0 / n));
}
