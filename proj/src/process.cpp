#include "permacox/process.hpp"

#include <cmath>
#include <stdexcept>

namespace permacox {

void PermanentalSpec::validate() const {
    lattice.validate();
    mask.validate();
    if (mask.rows != lattice.rows || mask.cols != lattice.cols)
        throw std::invalid_argument("spec: mask dimensions do not match lattice");
    if (l < 1) throw std::invalid_argument("spec: l must be >= 1");
    if (l > 0xffff) throw std::invalid_argument("spec: l exceeds stream address space");
    if (!(lambda_c >= 0.0) || !std::isfinite(lambda_c))
        throw std::invalid_argument("spec: lambda_c must be finite and >= 0");
    const std::size_t n = std::size_t(mask.cell_count());
    if (sigma2.size() != std::size_t(l))
        throw std::invalid_argument("spec: sigma2 must have l field rows");
    for (const auto& row : sigma2) {
        if (row.size() != n)
            throw std::invalid_argument("spec: sigma2 row size must equal masked cell count");
        for (double v : row)
            if (!(v >= 0.0) || !std::isfinite(v))
                throw std::invalid_argument("spec: sigma2 entries must be finite and >= 0");
    }
}

PermanentalSpec PermanentalSpec::homogeneous(const LatticeSpec& lattice, const RegionMask& mask,
                                             int l, double sigma2_per_field, double lambda_c) {
    PermanentalSpec spec;
    spec.lattice = lattice;
    spec.mask = mask;
    spec.l = l;
    spec.lambda_c = lambda_c;
    spec.sigma2.assign(l, std::vector<double>(mask.cell_count(), sigma2_per_field));
    spec.validate();
    return spec;
}

namespace {

Eigen::MatrixXd correlation_matrix(const std::vector<CellRef>& cells, double lambda_c) {
    ExpKernel unit{1.0, lambda_c};
    std::vector<double> ones(cells.size(), 1.0);
    return build_covariance(cells, unit, ones);
}

}  // namespace

ProcessSimulator::ProcessSimulator(const PermanentalSpec& spec, CholeskyOptions opts)
    : spec_(spec),
      cells_(spec.mask.cells()),
      corr_(correlation_matrix(cells_, spec.lambda_c), opts) {
    spec_.validate();
    sigma_.resize(spec_.l);
    for (int j = 0; j < spec_.l; ++j) {
        sigma_[j].resize(cells_.size());
        for (std::size_t k = 0; k < cells_.size(); ++k)
            sigma_[j][k] = std::sqrt(spec_.sigma2[j][k]);
    }
}

std::vector<double> ProcessSimulator::intensity(std::uint64_t master_seed,
                                                std::uint64_t replicate) const {
    const std::size_t n = cells_.size();
    std::vector<double> lambda(n, 0.0);
    std::vector<double> z(n);
    for (int j = 0; j < spec_.l; ++j) {
        GaussianStream gauss(make_stream(master_seed, Stream::field_noise, replicate,
                                         static_cast<std::uint32_t>(j)));
        corr_.draw(gauss, z);
        const auto& sj = sigma_[j];
        for (std::size_t k = 0; k < n; ++k) {
            const double y = sj[k] * z[k];
            lambda[k] += y * y;
        }
    }
    return lambda;
}

std::vector<std::uint32_t> ProcessSimulator::counts(std::span<const double> intensity,
                                                    std::uint64_t master_seed,
                                                    std::uint64_t replicate) const {
    return sample_counts(intensity, master_seed, replicate);
}

std::vector<double> build_intensity(const PermanentalSpec& spec, std::uint64_t master_seed,
                                    std::uint64_t replicate) {
    ProcessSimulator sim(spec);
    return sim.intensity(master_seed, replicate);
}

std::vector<std::uint32_t> sample_counts(std::span<const double> intensity,
                                         std::uint64_t master_seed, std::uint64_t replicate) {
    for (double v : intensity)
        if (!(v >= 0.0) || !std::isfinite(v))
            throw std::invalid_argument("sample_counts: intensity must be finite and >= 0");
    Philox4x32 eng = make_stream(master_seed, Stream::counts, replicate);
    std::vector<std::uint32_t> counts(intensity.size());
    for (std::size_t k = 0; k < intensity.size(); ++k)
        counts[k] = poisson_draw(eng, intensity[k]);  // cell area = 1 grid unit^2
    return counts;
}

double functional_f(std::span<const std::uint32_t> masked_counts, const WeightFunction& g) {
    if (g.weights.size() != masked_counts.size())
        throw std::invalid_argument("functional_f: weight size mismatch");
    double total = 0.0;
    for (std::size_t k = 0; k < masked_counts.size(); ++k)
        total += g.weights[k] * masked_counts[k];
    return total;
}

SimulationRun run_replicates(const PermanentalSpec& spec, int replicates,
                             std::uint64_t master_seed, const WeightFunction* g) {
    if (replicates < 1) throw std::invalid_argument("run_replicates: need R >= 1");
    ProcessSimulator sim(spec);
    const auto& cells = sim.cells();
    WeightFunction ones = WeightFunction::ones(static_cast<int>(cells.size()));
    const WeightFunction& weight = g ? *g : ones;

    std::vector<int> labels(replicates);
    for (int r = 0; r < replicates; ++r) labels[r] = r;

    SimulationRun run;
    run.spec = spec;
    run.master_seed = master_seed;
    run.replicates = replicates;
    run.counts = CountField(spec.lattice.rows, spec.lattice.cols, labels);
    run.totals.resize(replicates);

    for (int r = 0; r < replicates; ++r) {
        const auto lambda = sim.intensity(master_seed, r);
        const auto counts = sim.counts(lambda, master_seed, r);
        for (std::size_t k = 0; k < cells.size(); ++k)
            run.counts.at(spec.lattice.index(cells[k].row, cells[k].col), r) = counts[k];
        run.totals[r] = functional_f(counts, weight);
    }
    return run;
}

double theoretical_count_cov(const PermanentalSpec& spec, int cell_a, int cell_b) {
    spec.validate();
    const auto cells = spec.mask.cells();
    const int n = static_cast<int>(cells.size());
    if (cell_a < 0 || cell_a >= n || cell_b < 0 || cell_b >= n)
        throw std::invalid_argument("theoretical_count_cov: cell index out of range");
    if (cell_a == cell_b) {
        double var = 0.0;
        for (int j = 0; j < spec.l; ++j) {
            const double s2 = spec.sigma2[j][cell_a];
            var += s2 + 2.0 * s2 * s2;
        }
        return var;
    }
    const double r = maxnorm(cells[cell_a], cells[cell_b]);
    const double decay = std::exp(-2.0 * spec.lambda_c * r);
    double sum = 0.0;
    for (int j = 0; j < spec.l; ++j)
        sum += spec.sigma2[j][cell_a] * spec.sigma2[j][cell_b];
    return 2.0 * decay * sum;
}

std::vector<GeoPoint> synth_dataset(const PermanentalSpec& spec, int years,
                                    std::uint64_t master_seed) {
    if (years < 1) throw std::invalid_argument("synth_dataset: years must be >= 1");
    ProcessSimulator sim(spec);
    const auto& cells = sim.cells();
    const auto& lat0 = spec.lattice.origin_lat;
    const auto& lon0 = spec.lattice.origin_lon;
    const double unit = spec.lattice.unit;

    // Placement keeps a small interior margin so that binning the emitted
    // coordinates recovers the generating cell exactly in floating point.
    const double margin = 1e-6;
    const double span = 1.0 - 2.0 * margin;

    std::vector<GeoPoint> points;
    for (int y = 0; y < years; ++y) {
        const auto lambda = sim.intensity(master_seed, y);
        const auto counts = sim.counts(lambda, master_seed, y);
        Philox4x32 place = make_stream(master_seed, Stream::placement, y);
        for (std::size_t k = 0; k < cells.size(); ++k) {
            for (std::uint32_t c = 0; c < counts[k]; ++c) {
                const double u = margin + span * uniform01(place);
                const double v = margin + span * uniform01(place);
                GeoPoint p;
                p.lat = lat0 - (cells[k].row + u) * unit;
                p.lon = lon0 + (cells[k].col + v) * unit;
                p.year = y;
                points.push_back(p);
            }
        }
    }
    return points;
}

}  // namespace permacox
