#include "permacox/estimate.hpp"

#include <cmath>
#include <stdexcept>

namespace permacox {

MomentSummary cell_moments(const CountField& field) {
    const int reps = field.replicates();
    if (reps < 2) throw std::invalid_argument("cell_moments: need at least 2 replicates");
    MomentSummary out;
    out.replicates = reps;
    out.mean.resize(field.cell_count());
    out.var.resize(field.cell_count());
    for (int cell = 0; cell < field.cell_count(); ++cell) {
        const auto counts = field.cell_counts(cell);
        double sum = 0.0;
        for (auto c : counts) sum += c;
        const double m = sum / reps;
        double ss = 0.0;
        for (auto c : counts) {
            const double d = c - m;
            ss += d * d;
        }
        out.mean[cell] = m;
        out.var[cell] = ss / (reps - 1);
    }
    return out;
}

FitResult fit_l_sigma(const MomentSummary& moments, int rows, int cols, FitOptions opts) {
    if (moments.mean.size() != std::size_t(rows) * cols)
        throw std::invalid_argument("fit_l_sigma: moment size does not match grid");
    if (opts.l_cap < 1) throw std::invalid_argument("fit_l_sigma: l_cap must be >= 1");

    FitResult fit;
    fit.support.rows = rows;
    fit.support.cols = cols;
    fit.support.flags.assign(std::size_t(rows) * cols, 0);

    std::vector<int> cell_l;
    std::vector<double> cell_m;
    for (int cell = 0; cell < rows * cols; ++cell) {
        const double m = moments.mean[cell];
        const double v = moments.var[cell];
        if (m <= 0.0) continue;
        fit.support.flags[cell] = 1;
        int l_cell;
        if (v > 0.0) {
            const double raw = std::floor(2.0 * m * m / v);
            if (raw >= opts.l_cap) {
                l_cell = opts.l_cap;
                ++fit.capped_cells;
            } else {
                l_cell = std::max(1, static_cast<int>(raw));
            }
        } else {
            // Degenerate deterministic cell: the moment formula divides by v.
            l_cell = opts.l_cap;
            ++fit.capped_cells;
        }
        cell_l.push_back(l_cell);
        cell_m.push_back(m);
    }
    if (cell_l.empty()) throw std::invalid_argument("fit_l_sigma: no signal");

    fit.l = 1;
    for (int l : cell_l) fit.l = std::max(fit.l, l);
    fit.cell_l = cell_l;

    const std::size_t n = cell_l.size();
    fit.sigma2.assign(fit.l, std::vector<double>(n, 0.0));
    for (std::size_t k = 0; k < n; ++k) {
        const double s2 = cell_m[k] / cell_l[k];
        for (int j = 0; j < cell_l[k]; ++j) fit.sigma2[j][k] = s2;
    }
    return fit;
}

PermanentalSpec FitResult::to_spec(const LatticeSpec& lattice, double lambda_c) const {
    PermanentalSpec spec;
    spec.lattice = lattice;
    spec.mask = support;
    spec.l = l;
    spec.lambda_c = lambda_c;
    spec.sigma2 = sigma2;
    spec.validate();
    return spec;
}

DecayCurve covariance_curve(const CountField& field, const RegionMask& mask,
                            const DecayCurveOptions& opts) {
    mask.validate();
    if (mask.rows != field.rows() || mask.cols != field.cols())
        throw std::invalid_argument("covariance_curve: mask dimensions do not match grid");
    const int reps = field.replicates();
    if (reps < 2) throw std::invalid_argument("covariance_curve: need at least 2 replicates");
    if (!(opts.bin_width > 0.0) || !(opts.max_r >= opts.bin_width))
        throw std::invalid_argument("covariance_curve: require max_r >= bin_width > 0");

    const int r_max = static_cast<int>(std::floor(opts.max_r));
    const int rows = field.rows(), cols = field.cols();

    std::vector<double> mean(std::size_t(rows) * cols, 0.0);
    for (int cell = 0; cell < rows * cols; ++cell) {
        if (!mask.flags[cell]) continue;
        const auto counts = field.cell_counts(cell);
        double sum = 0.0;
        for (auto c : counts) sum += c;
        mean[cell] = sum / reps;
    }

    // Unordered pairs, enumerated by lexicographically positive offsets.
    struct Offset { int di, dj, r; };
    std::vector<Offset> offsets;
    for (int di = 0; di <= r_max; ++di)
        for (int dj = (di == 0 ? 1 : -r_max); dj <= r_max; ++dj) {
            const int r = std::max(di, std::abs(dj));
            if (r >= 1 && r <= r_max) offsets.push_back({di, dj, r});
        }

    std::int64_t eligible = 0;
    for (const auto& o : offsets)
        for (int i = std::max(0, -o.di); i < rows - std::max(0, o.di); ++i)
            for (int j = std::max(0, -o.dj); j < cols - std::max(0, o.dj); ++j)
                if (mask.at(i, j) && mask.at(i + o.di, j + o.dj)) ++eligible;
    if (eligible == 0) throw std::invalid_argument("covariance_curve: no pairs in range");

    const bool thin = eligible > opts.pair_budget;
    const double keep_p = thin ? double(opts.pair_budget) / double(eligible) : 1.0;
    Philox4x32 thin_eng = make_stream(opts.seed, Stream::pair_thinning);

    const int n_bins = static_cast<int>(std::floor(r_max / opts.bin_width)) + 1;
    std::vector<double> sum_cov(n_bins, 0.0), sum_cov2(n_bins, 0.0), sum_r(n_bins, 0.0);
    std::vector<std::int64_t> count(n_bins, 0);

    std::int64_t used = 0;
    for (const auto& o : offsets) {
        const int bin = static_cast<int>(std::floor(o.r / opts.bin_width));
        for (int i = std::max(0, -o.di); i < rows - std::max(0, o.di); ++i)
            for (int j = std::max(0, -o.dj); j < cols - std::max(0, o.dj); ++j) {
                if (!mask.at(i, j) || !mask.at(i + o.di, j + o.dj)) continue;
                if (thin && uniform01(thin_eng) >= keep_p) continue;
                const int a = i * cols + j;
                const int b = (i + o.di) * cols + (j + o.dj);
                const auto ca = field.cell_counts(a);
                const auto cb = field.cell_counts(b);
                double dot = 0.0;
                for (int k = 0; k < reps; ++k) dot += double(ca[k]) * double(cb[k]);
                const double cov = (dot - reps * mean[a] * mean[b]) / (reps - 1);
                sum_cov[bin] += cov;
                sum_cov2[bin] += cov * cov;
                sum_r[bin] += o.r;
                ++count[bin];
                ++used;
            }
    }

    DecayCurve curve;
    curve.eligible_pairs = eligible;
    curve.used_pairs = used;
    curve.subsampled = thin;
    curve.seed = opts.seed;
    for (int b = 0; b < n_bins; ++b) {
        if (count[b] == 0) continue;
        DecayBin bin;
        bin.pairs = count[b];
        bin.r = sum_r[b] / count[b];
        bin.cov = sum_cov[b] / count[b];
        if (count[b] > 1) {
            const double var = (sum_cov2[b] - count[b] * bin.cov * bin.cov) / (count[b] - 1);
            bin.se = var > 0.0 ? std::sqrt(var / count[b]) : 0.0;
        }
        curve.bins.push_back(bin);
    }
    if (curve.bins.empty()) throw std::invalid_argument("covariance_curve: no pairs in any bin");
    return curve;
}

DecayFit fit_exponential_decay(const DecayCurve& curve) {
    std::vector<double> x, y, w;
    for (const auto& bin : curve.bins) {
        if (bin.cov > 0.0) {
            x.push_back(bin.r);
            y.push_back(std::log(bin.cov));
            w.push_back(static_cast<double>(bin.pairs));
        }
    }
    if (x.size() < 2)
        throw std::invalid_argument("fit_exponential_decay: need at least 2 positive bins");

    double wsum = 0.0, xbar = 0.0, ybar = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        wsum += w[i];
        xbar += w[i] * x[i];
        ybar += w[i] * y[i];
    }
    xbar /= wsum;
    ybar /= wsum;
    double sxx = 0.0, sxy = 0.0, sst = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += w[i] * (x[i] - xbar) * (x[i] - xbar);
        sxy += w[i] * (x[i] - xbar) * (y[i] - ybar);
        sst += w[i] * (y[i] - ybar) * (y[i] - ybar);
    }
    const double slope = sxy / sxx;
    const double intercept = ybar - slope * xbar;
    double ssr = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double resid = y[i] - (intercept + slope * x[i]);
        ssr += w[i] * resid * resid;
    }

    DecayFit fit;
    fit.rate = -slope;
    fit.amplitude = std::exp(intercept);
    fit.r2 = sst > 0.0 ? 1.0 - ssr / sst : 1.0;
    fit.bins_used = static_cast<int>(x.size());
    return fit;
}

Calibration calibrate_lambda_c(double target_rate, const FitResult& fit,
                               const LatticeSpec& lattice, const CalibrationOptions& opts) {
    if (!(opts.grid_step > 0.0) || opts.grid_step > 0.5)
        throw std::invalid_argument("calibrate_lambda_c: grid_step must be in (0, 0.5]");
    if (opts.replicates < 2)
        throw std::invalid_argument("calibrate_lambda_c: need at least 2 replicates");

    Calibration cal;
    cal.target_rate = target_rate;

    bool any_ok = false;
    double best = 0.0;
    for (double lam = 0.0; lam <= opts.grid_max + 1e-12; lam += opts.grid_step) {
        CalibrationCandidate cand;
        cand.lambda_c = lam;
        try {
            // Common random numbers: every candidate reuses the same seed so
            // the achieved-rate curve is smooth in lambda_c.
            const auto spec = fit.to_spec(lattice, lam);
            const auto run = run_replicates(spec, opts.replicates, opts.seed);
            const auto curve = covariance_curve(run.counts, fit.support, opts.curve);
            cand.rate = fit_exponential_decay(curve).rate;
            cand.fit_ok = true;
        } catch (const std::exception&) {
            cand.fit_ok = false;
        }
        if (cand.fit_ok) {
            const double miss = std::fabs(cand.rate - target_rate);
            if (!any_ok || miss < best) {
                any_ok = true;
                best = miss;
                cal.selected_lambda_c = cand.lambda_c;
                cal.selected_rate = cand.rate;
            }
        }
        cal.candidates.push_back(cand);
    }
    if (!any_ok)
        throw std::runtime_error("calibrate_lambda_c: no candidate produced a fittable curve");
    return cal;
}

}  // namespace permacox
