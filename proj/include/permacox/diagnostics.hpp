#pragma once

// Normality diagnostics for simulated totals: standardization, exact
// Wasserstein-1 distance to the standard normal, the Shapiro-Wilk test
// (Royston's AS R94), variance-rate curves, and log-log rate comparison.

#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "permacox/estimate.hpp"

namespace permacox {

double normal_cdf(double t);       // Phi, absolute error <= 1e-12
double normal_pdf(double t);
double normal_quantile(double p);  // Phi^{-1} on (0,1)

// (x - mean) / sd with unbiased sample moments, or externally supplied ones.
std::vector<double> standardize(std::span<const double> values,
                                std::optional<std::pair<double, double>> external = {});

struct W1Result {
    double distance = 0.0;
    std::size_t n = 0;
    bool external_moments = false;
};

// Exact integral of |empirical CDF - Phi| via the piecewise closed form with
// antiderivative G(t) = t Phi(t) + phi(t).
W1Result w1_to_standard_normal(std::span<const double> standardized);

struct SWResult {
    double w = 0.0;
    double p = 0.0;
    std::size_t n = 0;
};

// Shapiro-Wilk per Royston 1995 (AS R94); 3 <= n <= 5000.
SWResult shapiro_wilk(std::span<const double> samples);

struct RatePoint {
    double n = 0.0;
    double value = 0.0;
};

struct RateCurve {
    std::vector<RatePoint> points;
    double slope = 0.0;     // log-log least-squares slope
    double slope_se = 0.0;
    double reference_exponent = 0.0;
};

// Sample variance of the totals at each block size divided by n^d.
RateCurve variance_rate_curve(const std::map<int, std::vector<double>>& totals_by_n, int d);

// Log-log slope of W1 against n, with the theoretical exponent -d/(4d+2).
RateCurve rate_comparison(std::span<const std::pair<int, double>> w1_by_n, int d);

struct AssociationReport {
    bool pass = true;
    std::vector<std::size_t> flagged_bins;  // indices into curve.bins
};

// Flags bins whose covariance falls below -3 standard errors.
AssociationReport association_check(const DecayCurve& curve);

}  // namespace permacox
