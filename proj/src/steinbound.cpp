#include "permacox/steinbound.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <tuple>

namespace permacox {

namespace {
constexpr double kPi = 3.14159265358979323846;

void require_finite(double v, const char* name) {
    if (!std::isfinite(v))
        throw std::runtime_error(std::string("assoc_bound: non-finite ") + name);
}
}  // namespace

double local_dep_bound(const LocalDepParams& p) {
    if (!(p.sigma > 0.0)) throw std::invalid_argument("local_dep_bound: sigma must be > 0");
    if (!(p.neighborhood >= 1.0))
        throw std::invalid_argument("local_dep_bound: D must be >= 1");
    if (!(p.sum_abs3 >= 0.0) || !(p.sum_4 >= 0.0))
        throw std::invalid_argument("local_dep_bound: moment sums must be >= 0");
    const double term1 = p.neighborhood * p.neighborhood * p.sum_abs3
        / (p.sigma * p.sigma * p.sigma);
    const double term2 = std::sqrt(28.0) * std::pow(p.neighborhood, 1.5) * std::sqrt(p.sum_4)
        / (std::sqrt(kPi) * p.sigma * p.sigma);
    return term1 + term2;
}

void AssocBoundParams::validate() const {
    if (d < 1) throw std::invalid_argument("assoc_bound: d must be >= 1");
    if (!(M > 0.0) || !(kappa > 0.0) || !(lambda > 0.0) || !(gamma > 0.0) || !(K > 0.0) ||
        !(r_mu_nu > 0.0))
        throw std::invalid_argument("assoc_bound: M, kappa, lambda, gamma, K, r must be > 0");
    if (!(n >= 2.0)) throw std::invalid_argument("assoc_bound: n must be >= 2");
}

std::pair<double, double> mu_nu(double lambda, double r_mu_nu) {
    if (!(lambda > 0.0) || !(r_mu_nu > 0.0))
        throw std::invalid_argument("mu_nu: lambda and r must be > 0");
    const double q = lambda / r_mu_nu;
    if (q > 350.0) throw std::invalid_argument("mu_nu: lambda/r too large (exp overflow)");
    const double e = std::exp(q);
    const double denom = (e - 1.0) * (e - 1.0);
    return {e * e / denom, e / denom};
}

double theta(const AssocBoundParams& p) {
    p.validate();
    const auto [mu, nu] = mu_nu(p.lambda, p.r_mu_nu);
    const double d = p.d;
    const double shell = std::pow(4.0 * mu + 2.0 * nu, d) - std::pow(2.0 * nu, d);
    const double bracket = std::sqrt(2.0 * p.gamma) * std::cbrt(p.kappa) * shell
        / (std::pow(18.0, d + 1.0) * std::sqrt(kPi) * d * p.M);
    return p.lambda / 3.0 * std::pow(bracket, 1.0 / (2.0 * d + 1.0));
}

BoundBreakdown assoc_bound(const AssocBoundParams& p) {
    p.validate();
    const double d = p.d;
    BoundBreakdown b;
    std::tie(b.mu, b.nu) = mu_nu(p.lambda, p.r_mu_nu);

    const double shell = std::pow(4.0 * b.mu + 2.0 * b.nu, d) - std::pow(2.0 * b.nu, d);
    require_finite(shell, "(4mu+2nu)^d - (2nu)^d");

    const double bracket = std::sqrt(2.0 * p.gamma) * std::cbrt(p.kappa) * shell
        / (std::pow(18.0, d + 1.0) * std::sqrt(kPi) * d * p.M);
    b.theta = p.lambda / 3.0 * std::pow(bracket, 1.0 / (2.0 * d + 1.0));
    require_finite(b.theta, "theta");

    b.c1 = std::pow(9.0 * std::pow(36.0, d) * std::pow(p.M, 4.0 * d + 3.0)
                        * std::pow(shell, 2.0 * d)
                        / (std::pow(p.gamma, 2.0 * d + 1.5) * std::pow(kPi, d)),
                    1.0 / (2.0 * d + 1.0))
        * (1.0 / std::pow(2.0 * d, 2.0 * d / (2.0 * d + 1.0))
           + 2.0 * std::pow(2.0 * d, 1.0 / (2.0 * d + 1.0)));
    require_finite(b.c1, "C1");

    b.c2 = 3.0 * std::pow(6.0, d) * std::cbrt(p.kappa) * p.M * p.M
        * std::pow(b.theta, 4.0 * d / 3.0) / (std::sqrt(kPi) * p.gamma);
    require_finite(b.c2, "C2");

    b.c3 = std::pow(2.0, d + 1.0) * std::pow(p.kappa, 2.0 / 3.0) * p.M / std::sqrt(p.gamma);
    require_finite(b.c3, "C3");

    const double rate_exp = d / (4.0 * d + 2.0);   // the n^{d/(4d+2)} exponent
    const double n_rate = std::pow(p.n, rate_exp);
    const double log_n = std::log(p.n);

    b.t1 = (std::sqrt(28.0) * p.M * p.M * std::pow(2.0 * p.K, 1.5 * d) / (p.gamma * std::sqrt(kPi))
            + b.c1) / n_rate;
    require_finite(b.t1, "T1");

    b.t2 = std::pow(p.M, 3.0) * std::pow(2.0 * p.K, 2.0 * d)
        / (std::pow(p.gamma, 1.5) * std::pow(p.n, d / 6.0 - 1.0 / (6.0 * d + 3.0)));
    require_finite(b.t2, "T2");

    // Exponential terms in log space; exp() of a very negative value cleanly
    // underflows to zero while the logs stay finite for reporting.
    b.log_t3 = std::log(b.c2) + d * (4.0 * d + 1.0) / (6.0 * d + 3.0) * log_n - b.theta * n_rate;
    b.log_t4 = std::log(b.c3) + 7.0 * d / 6.0 * log_n - 2.0 * b.theta * n_rate;
    require_finite(b.log_t3, "log T3");
    require_finite(b.log_t4, "log T4");
    b.t3 = std::exp(b.log_t3);
    b.t4 = std::exp(b.log_t4);

    b.total = b.t1 + b.t2 + b.t3 + b.t4;
    require_finite(b.total, "total");
    return b;
}

BoundCurve bound_curve(AssocBoundParams p, const std::vector<double>& n_list) {
    for (std::size_t i = 1; i < n_list.size(); ++i)
        if (!(n_list[i] > n_list[i - 1]))
            throw std::invalid_argument("bound_curve: n_list must be strictly increasing");
    BoundCurve curve;
    for (double n : n_list) {
        p.n = n;
        curve.entries.emplace_back(n, assoc_bound(p));
    }
    // Dominance onset: suffix of the list where T1 exceeds the other terms.
    for (std::size_t i = curve.entries.size(); i-- > 0;) {
        const auto& b = curve.entries[i].second;
        if (b.t1 > b.t2 + b.t3 + b.t4) {
            curve.dominance_onset = curve.entries[i].first;
        } else {
            break;
        }
    }
    return curve;
}

ThresholdReport threshold_report(const AssocBoundParams& p) {
    p.validate();
    const double d = p.d;
    ThresholdReport rep;
    rep.thm31_exponent = (2.0 / 3.0) * ((4.0 * d - 1.0 - 1.0 / d) / (4.0 * d + 2.0));
    rep.thm32_exponent = d / (4.0 * d + 2.0);
    rep.thm31_threshold = p.K * std::pow(p.n, rep.thm31_exponent);
    rep.thm32_threshold = p.K * std::pow(p.n, rep.thm32_exponent);
    rep.consistent = std::fabs(rep.thm31_exponent - rep.thm32_exponent) < 1e-15;
    return rep;
}

}  // namespace permacox
