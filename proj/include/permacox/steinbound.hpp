#pragma once

// Explicit Stein-method bounds: the local-dependence bound on the Wasserstein
// distance, and the four-term association bound with all of its constants,
// evaluated exactly as printed (exponential terms in log space).

#include <optional>
#include <vector>

namespace permacox {

struct LocalDepParams {
    double neighborhood = 1.0;  // D, max dependency-neighborhood size
    double sigma = 1.0;         // SD of the sum
    double sum_abs3 = 0.0;      // sum of E|X_i|^3
    double sum_4 = 0.0;         // sum of E X_i^4
};

// D^2 sum3 / sigma^3 + sqrt(28) D^{3/2} sqrt(sum4) / (sqrt(pi) sigma^2)
double local_dep_bound(const LocalDepParams& p);

struct AssocBoundParams {
    int d = 2;            // dimension
    double M = 1.0;       // fourth-moment bound sup ||Y_i||_4
    double kappa = 1.0;   // covariance decay amplitude
    double lambda = 1.0;  // covariance decay rate
    double gamma = 1.0;   // variance-rate lower bound constant
    double K = 1.0;       // neighborhood-scale constant
    double r_mu_nu = 1.0; // the r inside mu_lambda, nu_lambda
    double n = 2.0;       // block side

    void validate() const;
};

// mu = e^{2 lambda/r} / (e^{lambda/r}-1)^2, nu = e^{lambda/r} / (e^{lambda/r}-1)^2
std::pair<double, double> mu_nu(double lambda, double r_mu_nu);

double theta(const AssocBoundParams& p);

struct BoundBreakdown {
    double mu = 0.0, nu = 0.0;
    double theta = 0.0;
    double c1 = 0.0, c2 = 0.0, c3 = 0.0;
    double t1 = 0.0, t2 = 0.0, t3 = 0.0, t4 = 0.0;
    double log_t3 = 0.0, log_t4 = 0.0;  // always finite; t3/t4 may underflow
    double total = 0.0;
};

BoundBreakdown assoc_bound(const AssocBoundParams& p);

struct BoundCurve {
    std::vector<std::pair<double, BoundBreakdown>> entries;
    // Smallest listed n from which T1 > T2+T3+T4 holds for every larger n.
    std::optional<double> dominance_onset;
};

BoundCurve bound_curve(AssocBoundParams p, const std::vector<double>& n_list);

struct ThresholdReport {
    double thm31_exponent = 0.0;   // (2/3) (4d - 1 - 1/d) / (4d + 2)
    double thm31_threshold = 0.0;  // K n^exponent
    double thm32_exponent = 0.0;   // d / (4d + 2)
    double thm32_threshold = 0.0;
    bool consistent = false;       // the two printed exponents disagree for all d
};

ThresholdReport threshold_report(const AssocBoundParams& p);

}  // namespace permacox
