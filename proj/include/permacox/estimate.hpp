#pragma once

// Parameter estimation from a CountField: per-cell moments, (l, sigma^2)
// moment matching, empirical covariance-decay curves, exponential fits, and
// lambda_c calibration by grid search against a target decay rate.

#include <cstdint>
#include <optional>
#include <vector>

#include "permacox/lattice.hpp"
#include "permacox/process.hpp"

namespace permacox {

struct MomentSummary {
    std::vector<double> mean;  // per grid cell
    std::vector<double> var;   // unbiased, divisor R-1
    int replicates = 0;
};

MomentSummary cell_moments(const CountField& field);

struct FitOptions {
    int l_cap = 64;  // bound on floor(2 m^2 / v); also used for v = 0 cells
};

struct FitResult {
    int l = 1;                   // global field count (largest per-cell l)
    RegionMask support;          // cells with m > 0
    std::vector<std::vector<double>> sigma2;  // [field][supported cell]
    std::vector<int> cell_l;     // per supported cell
    int capped_cells = 0;        // cells where l_cap was binding

    PermanentalSpec to_spec(const LatticeSpec& lattice, double lambda_c) const;
};

FitResult fit_l_sigma(const MomentSummary& moments, int rows, int cols, FitOptions opts = {});

struct DecayBin {
    double r = 0.0;       // pair-count-weighted mean distance in the bin
    double cov = 0.0;     // mean pair covariance
    double se = 0.0;      // standard error of the bin mean over pairs
    std::int64_t pairs = 0;
};

struct DecayCurve {
    std::vector<DecayBin> bins;
    std::int64_t eligible_pairs = 0;
    std::int64_t used_pairs = 0;
    bool subsampled = false;
    std::uint64_t seed = 0;
};

struct DecayCurveOptions {
    double max_r = 10.0;
    double bin_width = 1.0;                 // integer max-norm bins by default
    std::int64_t pair_budget = 2'000'000;   // seeded thinning above this
    std::uint64_t seed = 0;
};

DecayCurve covariance_curve(const CountField& field, const RegionMask& mask,
                            const DecayCurveOptions& opts);

struct DecayFit {
    double rate = 0.0;       // decay per unit distance (= -slope of log cov)
    double amplitude = 0.0;  // exp(intercept)
    double r2 = 0.0;         // weighted log-linear goodness of fit
    int bins_used = 0;
};

// Pair-count-weighted least squares on (r, log cov) over strictly positive bins.
DecayFit fit_exponential_decay(const DecayCurve& curve);

struct CalibrationCandidate {
    double lambda_c = 0.0;
    double rate = 0.0;
    bool fit_ok = false;
};

struct Calibration {
    std::vector<CalibrationCandidate> candidates;
    double selected_lambda_c = 0.0;
    double target_rate = 0.0;
    double selected_rate = 0.0;
};

struct CalibrationOptions {
    double grid_step = 0.005;
    double grid_max = 0.5;
    int replicates = 200;        // simulation size per candidate
    std::uint64_t seed = 1;      // shared across candidates (common random numbers)
    DecayCurveOptions curve;
};

// For each candidate lambda_c on the grid, simulate with the fitted (l,
// sigma^2) map, fit the count-covariance decay, and select the candidate
// whose achieved rate is closest to the target; ties break toward smaller
// lambda_c.
Calibration calibrate_lambda_c(double target_rate, const FitResult& fit,
                               const LatticeSpec& lattice, const CalibrationOptions& opts);

}  // namespace permacox
