#include "permacox/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace permacox {

namespace {
constexpr double kSqrt2 = 1.4142135623730950488;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;
}  // namespace

double normal_cdf(double t) {
    if (!std::isfinite(t)) throw std::invalid_argument("normal_cdf: t must be finite");
    return 0.5 * std::erfc(-t / kSqrt2);
}

double normal_pdf(double t) {
    return kInvSqrt2Pi * std::exp(-0.5 * t * t);
}

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0))
        throw std::invalid_argument("normal_quantile: p must be in (0,1)");
    // Acklam's rational approximation, then a Newton polish on Phi.
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double p_low = 0.02425;
    double x;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - p_low) {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    for (int i = 0; i < 2; ++i) {
        const double density = normal_pdf(x);
        if (density < 1e-300) break;
        x -= (normal_cdf(x) - p) / density;
    }
    return x;
}

std::vector<double> standardize(std::span<const double> values,
                                std::optional<std::pair<double, double>> external) {
    if (values.size() < 2 && !external)
        throw std::invalid_argument("standardize: need at least 2 samples");
    double mean, sd;
    if (external) {
        mean = external->first;
        sd = external->second;
    } else {
        mean = 0.0;
        for (double v : values) mean += v;
        mean /= double(values.size());
        double ss = 0.0;
        for (double v : values) ss += (v - mean) * (v - mean);
        sd = std::sqrt(ss / double(values.size() - 1));
    }
    if (!(sd > 0.0)) throw std::invalid_argument("standardize: zero standard deviation");
    std::vector<double> out(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) out[i] = (values[i] - mean) / sd;
    return out;
}

namespace {

// Antiderivative of Phi: G'(t) = Phi(t), G(-inf) = 0.
double big_g(double t) { return t * normal_cdf(t) + normal_pdf(t); }

// integral over [a,b] of |c - Phi(t)| when c - Phi has constant sign there.
double segment(double c, double a, double b) {
    return std::fabs(c * (b - a) - (big_g(b) - big_g(a)));
}

}  // namespace

W1Result w1_to_standard_normal(std::span<const double> standardized) {
    const std::size_t n = standardized.size();
    if (n == 0) throw std::invalid_argument("w1: empty sample");
    for (double v : standardized)
        if (!std::isfinite(v)) throw std::invalid_argument("w1: non-finite sample");

    std::vector<double> x(standardized.begin(), standardized.end());
    std::sort(x.begin(), x.end());

    // Left tail: F = 0, integrand Phi; right tail: integrand 1 - Phi.
    double total = big_g(x.front());
    total += normal_pdf(x.back()) - x.back() * (1.0 - normal_cdf(x.back()));

    for (std::size_t k = 1; k < n; ++k) {
        const double lo = x[k - 1], hi = x[k];
        if (lo == hi) continue;
        const double level = double(k) / double(n);
        const double cross = normal_quantile(level);
        if (cross <= lo || cross >= hi) {
            total += segment(level, lo, hi);
        } else {
            total += segment(level, lo, cross) + segment(level, cross, hi);
        }
    }

    W1Result res;
    res.distance = total;
    res.n = n;
    return res;
}

// ---------------------------------------------------------------------------
// Shapiro-Wilk, following Royston's AS R94 as published (and as used by R and
// scipy). Polynomial coefficients are the algorithm's constants.

namespace {

double poly(const double* cc, int nord, double x) {
    double result = cc[0];
    double p = 1.0;
    for (int i = 1; i < nord; ++i) {
        p *= x;
        result += cc[i] * p;
    }
    return result;
}

}  // namespace

SWResult shapiro_wilk(std::span<const double> samples) {
    static const double c1[6] = {0.0, 0.221157, -0.147981, -2.071190, 4.434685, -2.706056};
    static const double c2[6] = {0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633};
    static const double c3[4] = {0.544, -0.39978, 0.025054, -6.714e-4};
    static const double c4[4] = {1.3822, -0.77857, 0.062767, -0.0020322};
    static const double c5[4] = {-1.5861, -0.31082, -0.083751, 0.0038915};
    static const double c6[3] = {-0.4803, -0.082676, 0.0030302};
    static const double g[2] = {-2.273, 0.459};

    const int n = static_cast<int>(samples.size());
    if (n < 3 || n > 5000)
        throw std::invalid_argument("shapiro_wilk: n must be in [3, 5000]");

    std::vector<double> x(samples.begin(), samples.end());
    std::sort(x.begin(), x.end());
    const double range = x[n - 1] - x[0];
    if (!(range > 0.0)) throw std::invalid_argument("shapiro_wilk: sample is constant");

    const int n2 = n / 2;
    std::vector<double> a(n2 + 1, 0.0);  // 1-based
    if (n == 3) {
        a[1] = std::sqrt(0.5);
    } else {
        const double an25 = n + 0.25;
        std::vector<double> m(n2 + 1, 0.0);
        double summ2 = 0.0;
        for (int i = 1; i <= n2; ++i) {
            m[i] = normal_quantile((i - 0.375) / an25);
            summ2 += m[i] * m[i];
        }
        summ2 *= 2.0;
        const double ssumm2 = std::sqrt(summ2);
        const double rsn = 1.0 / std::sqrt(double(n));
        const double a1 = poly(c1, 6, rsn) - m[1] / ssumm2;

        int i1;
        double fac;
        if (n > 5) {
            i1 = 3;
            const double a2 = -m[2] / ssumm2 + poly(c2, 6, rsn);
            fac = std::sqrt((summ2 - 2.0 * m[1] * m[1] - 2.0 * m[2] * m[2]) /
                            (1.0 - 2.0 * a1 * a1 - 2.0 * a2 * a2));
            a[2] = a2;
        } else {
            i1 = 2;
            fac = std::sqrt((summ2 - 2.0 * m[1] * m[1]) / (1.0 - 2.0 * a1 * a1));
        }
        a[1] = a1;
        for (int i = i1; i <= n2; ++i) a[i] = -m[i] / fac;
    }

    // W is the squared correlation between the ordered sample and the
    // antisymmetric coefficient vector.
    double sx = 0.0, sa = 0.0;
    for (int i = 1, j = n; i <= n; ++i, --j) {
        sx += x[i - 1] / range;
        if (i != j) sa += (i < j ? -1.0 : 1.0) * a[std::min(i, j)];
    }
    sx /= n;
    sa /= n;
    double ssa = 0.0, ssx = 0.0, sax = 0.0;
    for (int i = 1, j = n; i <= n; ++i, --j) {
        const double asa = (i != j ? (i < j ? -1.0 : 1.0) * a[std::min(i, j)] : 0.0) - sa;
        const double xsx = x[i - 1] / range - sx;
        ssa += asa * asa;
        ssx += xsx * xsx;
        sax += asa * xsx;
    }
    const double ssassx = std::sqrt(ssa * ssx);
    const double w1 = (ssassx - sax) * (ssassx + sax) / (ssa * ssx);

    SWResult res;
    res.n = static_cast<std::size_t>(n);
    res.w = 1.0 - w1;

    if (n == 3) {
        const double pi6 = 1.90985931710274;   // 6/pi
        const double stqr = 1.04719755119660;  // asin(sqrt(3/4))
        res.p = std::clamp(pi6 * (std::asin(std::sqrt(res.w)) - stqr), 0.0, 1.0);
        return res;
    }

    const double y = std::log(w1);
    const double logn = std::log(double(n));
    double mean, sd;
    if (n <= 11) {
        const double gamma = poly(g, 2, double(n));
        if (y >= gamma) {
            res.p = 1e-99;
            return res;
        }
        const double y2 = -std::log(gamma - y);
        mean = poly(c3, 4, double(n));
        sd = std::exp(poly(c4, 4, double(n)));
        res.p = 1.0 - normal_cdf((y2 - mean) / sd);
        return res;
    }
    mean = poly(c5, 4, logn);
    sd = std::exp(poly(c6, 3, logn));
    res.p = 1.0 - normal_cdf((y - mean) / sd);
    return res;
}

// ---------------------------------------------------------------------------

namespace {

// Plain least squares on (log n, log value); returns slope and its SE.
void loglog_fit(const std::vector<RatePoint>& pts, double& slope, double& se) {
    const std::size_t k = pts.size();
    double xbar = 0.0, ybar = 0.0;
    std::vector<double> lx(k), ly(k);
    for (std::size_t i = 0; i < k; ++i) {
        lx[i] = std::log(pts[i].n);
        ly[i] = std::log(pts[i].value);
        xbar += lx[i];
        ybar += ly[i];
    }
    xbar /= double(k);
    ybar /= double(k);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        sxx += (lx[i] - xbar) * (lx[i] - xbar);
        sxy += (lx[i] - xbar) * (ly[i] - ybar);
    }
    slope = sxy / sxx;
    double ssr = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        const double resid = ly[i] - ybar - slope * (lx[i] - xbar);
        ssr += resid * resid;
    }
    se = k > 2 ? std::sqrt(ssr / double(k - 2) / sxx) : 0.0;
}

}  // namespace

RateCurve variance_rate_curve(const std::map<int, std::vector<double>>& totals_by_n, int d) {
    if (totals_by_n.empty()) throw std::invalid_argument("variance_rate_curve: empty input");
    RateCurve curve;
    curve.reference_exponent = double(d) / double(4 * d + 2);
    for (const auto& [n, totals] : totals_by_n) {
        if (totals.size() < 2)
            throw std::invalid_argument("variance_rate_curve: block size " + std::to_string(n) +
                                        " has fewer than 2 replicates");
        double mean = 0.0;
        for (double t : totals) mean += t;
        mean /= double(totals.size());
        double ss = 0.0;
        for (double t : totals) ss += (t - mean) * (t - mean);
        const double var = ss / double(totals.size() - 1);
        curve.points.push_back({double(n), var / std::pow(double(n), d)});
    }
    // Slope is reported only when every value is positive (log scale).
    bool positive = true;
    for (const auto& p : curve.points) positive = positive && p.value > 0.0;
    if (positive && curve.points.size() >= 2)
        loglog_fit(curve.points, curve.slope, curve.slope_se);
    return curve;
}

RateCurve rate_comparison(std::span<const std::pair<int, double>> w1_by_n, int d) {
    if (w1_by_n.size() < 3)
        throw std::invalid_argument("rate_comparison: need at least 3 points");
    RateCurve curve;
    curve.reference_exponent = -double(d) / double(4 * d + 2);
    for (const auto& [n, w1] : w1_by_n) {
        if (!(w1 > 0.0))
            throw std::invalid_argument("rate_comparison: W1 values must be positive");
        curve.points.push_back({double(n), w1});
    }
    loglog_fit(curve.points, curve.slope, curve.slope_se);
    return curve;
}

AssociationReport association_check(const DecayCurve& curve) {
    AssociationReport report;
    for (std::size_t i = 0; i < curve.bins.size(); ++i) {
        const auto& bin = curve.bins[i];
        if (bin.se > 0.0 && bin.cov < -3.0 * bin.se) {
            report.pass = false;
            report.flagged_bins.push_back(i);
        }
    }
    return report;
}

}  // namespace permacox
