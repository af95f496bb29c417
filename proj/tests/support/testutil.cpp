#include "testutil.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace testutil {

namespace {

long double phi_density(long double t) {
    const long double inv_sqrt_2pi = 0.398942280401432677939946L;
    return inv_sqrt_2pi * std::exp(-0.5L * t * t);
}

// Upper tail Q(t) for t >= 0.
long double upper_tail(long double t) {
    if (t <= 3.0L) {
        // Phi(t) = 1/2 + phi(t) * sum_k t^{2k+1} / (2k+1)!!, all terms positive.
        long double term = t;
        long double sum = t;
        for (int k = 1; k < 200; ++k) {
            term *= t * t / (2 * k + 1);
            sum += term;
            if (term < 1e-25L * sum) break;
        }
        return 0.5L - phi_density(t) * sum;
    }
    // Mills ratio continued fraction: Q(t) = phi(t) / (t + 1/(t + 2/(t + ...))).
    long double cf = t;
    for (int k = 400; k >= 1; --k) cf = t + k / cf;
    return phi_density(t) / cf;
}

}  // namespace

long double phi_oracle(long double t) {
    if (t >= 0.0L) return 1.0L - upper_tail(t);
    return upper_tail(-t);
}

namespace {

double simpson(const std::function<double(double)>& f, double a, double fa, double b,
               double fb, double m, double fm) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adapt(const std::function<double(double)>& f, double a, double fa, double b, double fb,
             double m, double fm, double whole, double tol, int depth) {
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = simpson(f, a, fa, m, fm, lm, flm);
    const double right = simpson(f, m, fm, b, fb, rm, frm);
    if (depth <= 0 || std::fabs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adapt(f, a, fa, m, fm, lm, flm, left, tol / 2.0, depth - 1) +
           adapt(f, m, fm, b, fb, rm, frm, right, tol / 2.0, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol,
                        int max_depth) {
    if (a == b) return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = f(a), fb = f(b), fm = f(m);
    return adapt(f, a, fa, b, fb, m, fm, simpson(f, a, fa, b, fb, m, fm), tol, max_depth);
}

double w1_quadrature(std::span<const double> sample, double tol) {
    std::vector<double> x(sample.begin(), sample.end());
    std::sort(x.begin(), x.end());
    const std::size_t n = x.size();
    if (n == 0) throw std::invalid_argument("w1_quadrature: empty sample");

    auto empirical = [&](double t) {
        const auto it = std::upper_bound(x.begin(), x.end(), t);
        return double(it - x.begin()) / double(n);
    };
    auto integrand = [&](double t) {
        return std::fabs(empirical(t) - double(phi_oracle(t)));
    };

    std::vector<double> knots;
    knots.push_back(std::min(x.front(), -40.0) - 1.0);
    for (double v : x) knots.push_back(v);
    knots.push_back(std::max(x.back(), 40.0) + 1.0);

    double total = 0.0;
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
        if (knots[i + 1] <= knots[i]) continue;
        total += adaptive_simpson(integrand, knots[i], knots[i + 1], tol / double(knots.size()));
    }
    return total;  // mass beyond +-41 is below 1e-300
}

double gammp(double a, double x) {
    if (!(a > 0.0) || x < 0.0) throw std::invalid_argument("gammp: bad arguments");
    if (x == 0.0) return 0.0;
    const double lg = std::lgamma(a);
    if (x < a + 1.0) {
        double ap = a, del = 1.0 / a, sum = del;
        for (int i = 0; i < 500; ++i) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::fabs(del) < std::fabs(sum) * 1e-16) break;
        }
        return sum * std::exp(-x + a * std::log(x) - lg);
    }
    // Lentz continued fraction for Q(a, x).
    const double fpmin = 1e-300;
    double b = x + 1.0 - a, c = 1.0 / fpmin, d = 1.0 / b, h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -double(i) * (double(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = b + an / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < 1e-16) break;
    }
    const double q = std::exp(-x + a * std::log(x) - lg) * h;
    return 1.0 - q;
}

double chi2_cdf(double x, double dof) { return gammp(dof / 2.0, x / 2.0); }

namespace {

double kolmogorov_q(double lambda) {
    double sum = 0.0;
    for (int j = 1; j <= 200; ++j) {
        const double term = std::exp(-2.0 * j * j * lambda * lambda);
        sum += (j % 2 == 1 ? term : -term);
        if (term < 1e-18) break;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

}  // namespace

KSResult ks_test(std::span<const double> sample, const std::function<double(double)>& cdf) {
    std::vector<double> x(sample.begin(), sample.end());
    std::sort(x.begin(), x.end());
    const double n = double(x.size());
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double f = cdf(x[i]);
        d = std::max(d, std::fabs(f - double(i) / n));
        d = std::max(d, std::fabs(double(i + 1) / n - f));
    }
    const double sqrt_n = std::sqrt(n);
    KSResult res;
    res.statistic = d;
    res.p = kolmogorov_q((sqrt_n + 0.12 + 0.11 / sqrt_n) * d);
    return res;
}

double mean(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / double(v.size());
}

double sample_var(std::span<const double> v) {
    const double m = mean(v);
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return ss / double(v.size() - 1);
}

double se_of_mean(std::span<const double> v) {
    return std::sqrt(sample_var(v) / double(v.size()));
}

double t975(int dof) {
    static const double table[] = {12.7062, 4.3027, 3.1824, 2.7764, 2.5706, 2.4469, 2.3646,
                                   2.3060,  2.2622, 2.2281, 2.2010, 2.1788, 2.1604, 2.1448,
                                   2.1314,  2.1199, 2.1098, 2.1009, 2.0930, 2.0860, 2.0796,
                                   2.0739,  2.0687, 2.0639, 2.0595, 2.0555, 2.0518, 2.0484,
                                   2.0452,  2.0423};
    if (dof < 1) throw std::invalid_argument("t975: dof must be >= 1");
    if (dof <= 30) return table[dof - 1];
    return 1.96 + 2.4 / dof;  // adequate beyond the table
}

}  // namespace testutil
