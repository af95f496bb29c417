#pragma once

// Permanental Cox process on the masked lattice. The random intensity is
// Lambda(x) = sum_j Y_j(x)^2 over l independent zero-mean Gaussian fields
// Y_j(x) = sigma_j(x) Z_j(x); counts are conditionally Poisson per cell.

#include <cstdint>
#include <span>
#include <vector>

#include "permacox/gaussfield.hpp"
#include "permacox/lattice.hpp"
#include "permacox/random.hpp"

namespace permacox {

struct PermanentalSpec {
    LatticeSpec lattice;
    RegionMask mask;
    int l = 1;
    double lambda_c = 0.0;
    // sigma2[j][k]: variance of field j at the k-th masked cell (mask order).
    std::vector<std::vector<double>> sigma2;

    void validate() const;
    static PermanentalSpec homogeneous(const LatticeSpec& lattice, const RegionMask& mask,
                                       int l, double sigma2_per_field, double lambda_c);
};

// Per-cell bounded weights over the masked cells (the p=1 functional).
struct WeightFunction {
    std::vector<double> weights;
    static WeightFunction ones(int n) { return {std::vector<double>(n, 1.0)}; }
};

struct SimulationRun {
    PermanentalSpec spec;
    CountField counts;           // full-grid CountField, one replicate per iteration
    std::vector<double> totals;  // functional value per replicate
    std::uint64_t master_seed = 0;
    int replicates = 0;
};

// Shared correlation factor: one Cholesky per (mask, lambda_c) serves every
// field and every replicate.
class ProcessSimulator {
public:
    explicit ProcessSimulator(const PermanentalSpec& spec, CholeskyOptions opts = {});

    const std::vector<CellRef>& cells() const { return cells_; }
    double jitter() const { return corr_.jitter(); }

    // Lambda over masked cells for one replicate.
    std::vector<double> intensity(std::uint64_t master_seed, std::uint64_t replicate) const;
    // Conditionally Poisson counts over masked cells.
    std::vector<std::uint32_t> counts(std::span<const double> intensity,
                                      std::uint64_t master_seed, std::uint64_t replicate) const;

private:
    PermanentalSpec spec_;
    std::vector<CellRef> cells_;
    std::vector<std::vector<double>> sigma_;  // sqrt(sigma2), [field][masked cell]
    DenseFieldSampler corr_;
};

std::vector<double> build_intensity(const PermanentalSpec& spec, std::uint64_t master_seed,
                                    std::uint64_t replicate = 0);

std::vector<std::uint32_t> sample_counts(std::span<const double> intensity,
                                         std::uint64_t master_seed, std::uint64_t replicate = 0);

double functional_f(std::span<const std::uint32_t> masked_counts, const WeightFunction& g);

SimulationRun run_replicates(const PermanentalSpec& spec, int replicates,
                             std::uint64_t master_seed, const WeightFunction* g = nullptr);

// Cov(N(a),N(b)) from the Gaussian fourth-moment identity for distinct masked
// cells; Var N(a) = sum_j sigma_j^2 + 2 sum_j sigma_j^4 when a == b.
double theoretical_count_cov(const PermanentalSpec& spec, int cell_a, int cell_b);

// Synthetic surrogate dataset: one replicate per year, points placed uniformly
// within their cell. Binning the result reproduces the generating counts
// exactly.
std::vector<GeoPoint> synth_dataset(const PermanentalSpec& spec, int years,
                                    std::uint64_t master_seed);

}  // namespace permacox
