#pragma once

// Test-only oracles and helpers, independent of the library implementation
// paths they are used to check.

#include <functional>
#include <span>
#include <vector>

namespace testutil {

// Standard normal CDF in long double via Taylor series (|t| <= 3) or the
// Mills-ratio continued fraction (|t| > 3). Independent of std::erfc.
long double phi_oracle(long double t);

// Recursive adaptive Simpson quadrature.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-10, int max_depth = 40);

// Quadrature-based W1 distance between the empirical CDF of the sample and
// the standard normal, integrating |F_hat - Phi| piecewise between sample
// points with wide analytic-negligible tails.
double w1_quadrature(std::span<const double> sample, double tol = 1e-9);

// Regularized lower incomplete gamma P(a, x).
double gammp(double a, double x);
double chi2_cdf(double x, double dof);

struct KSResult {
    double statistic = 0.0;
    double p = 0.0;
};
// One-sample Kolmogorov-Smirnov against an arbitrary CDF.
KSResult ks_test(std::span<const double> sample, const std::function<double(double)>& cdf);

double mean(std::span<const double> v);
double sample_var(std::span<const double> v);
double se_of_mean(std::span<const double> v);

// Two-sided 97.5% Student t quantile (95% CI half-width multiplier).
double t975(int dof);

}  // namespace testutil
