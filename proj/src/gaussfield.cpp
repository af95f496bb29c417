#include "permacox/gaussfield.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

#include <unsupported/Eigen/FFT>

namespace permacox {

void ExpKernel::validate() const {
    if (!(kappa_c >= 0.0) || !std::isfinite(kappa_c))
        throw std::invalid_argument("kernel: kappa_c must be finite and >= 0");
    if (!(lambda_c >= 0.0) || !std::isfinite(lambda_c))
        throw std::invalid_argument("kernel: lambda_c must be finite and >= 0");
}

double kernel_eval(const ExpKernel& kernel, double r) {
    kernel.validate();
    if (!(r >= 0.0)) throw std::invalid_argument("kernel_eval: r must be >= 0");
    return kernel.kappa_c * std::exp(-kernel.lambda_c * r);
}

Eigen::MatrixXd build_covariance(std::span<const CellRef> cells, const ExpKernel& kernel,
                                 std::span<const double> amplitude) {
    kernel.validate();
    const int n = static_cast<int>(cells.size());
    if (amplitude.size() != cells.size())
        throw std::invalid_argument("build_covariance: amplitude size mismatch");
    for (double a : amplitude)
        if (!(a >= 0.0)) throw std::invalid_argument("build_covariance: amplitudes must be >= 0");

    Eigen::MatrixXd cov(n, n);
    for (int i = 0; i < n; ++i) {
        cov(i, i) = amplitude[i] * amplitude[i];
        for (int j = i + 1; j < n; ++j) {
            const double c = amplitude[i] * amplitude[j]
                * std::exp(-kernel.lambda_c * maxnorm(cells[i], cells[j]));
            cov(i, j) = c;
            cov(j, i) = c;
        }
    }
    return cov;
}

DenseFieldSampler::DenseFieldSampler(const Eigen::MatrixXd& cov, CholeskyOptions opts) {
    const auto n = cov.rows();
    if (n < 1 || cov.cols() != n)
        throw std::invalid_argument("dense sampler: covariance must be square and non-empty");
    const double asym = (cov - cov.transpose()).cwiseAbs().maxCoeff();
    const double scale0 = cov.cwiseAbs().maxCoeff();
    if (asym > 1e-10 * (scale0 > 0 ? scale0 : 1.0))
        throw std::invalid_argument("dense sampler: covariance not symmetric");

    const double mean_diag = cov.diagonal().mean();
    if (mean_diag == 0.0 && scale0 == 0.0) {
        // Degenerate all-zero covariance: field is identically zero.
        chol_ = Eigen::MatrixXd::Zero(n, n);
        return;
    }
    const double scale = mean_diag > 0.0 ? mean_diag : 1.0;

    double jitter = 0.0;
    for (;;) {
        Eigen::MatrixXd work = cov;
        if (jitter > 0.0) work.diagonal().array() += jitter;
        Eigen::LLT<Eigen::MatrixXd> llt(work);
        if (llt.info() == Eigen::Success) {
            chol_ = llt.matrixL();
            jitter_ = jitter;
            return;
        }
        if (jitter == 0.0) {
            jitter = opts.jitter_rel_start * scale;
        } else {
            jitter *= opts.jitter_growth;
        }
        if (jitter > opts.jitter_rel_max * scale)
            throw std::runtime_error(
                "dense sampler: Cholesky failed at maximum jitter " +
                std::to_string(opts.jitter_rel_max * scale));
    }
}

void DenseFieldSampler::draw(GaussianStream& gauss, std::span<double> out) const {
    const int n = dim();
    if (static_cast<int>(out.size()) != n)
        throw std::invalid_argument("dense sampler: output size mismatch");
    Eigen::VectorXd z(n);
    for (int i = 0; i < n; ++i) z[i] = gauss();
    Eigen::Map<Eigen::VectorXd> result(out.data(), n);
    result.noalias() = chol_.triangularView<Eigen::Lower>() * z;
}

FieldSample sample_field_dense(const Eigen::MatrixXd& cov, std::uint64_t seed,
                               CholeskyOptions opts) {
    DenseFieldSampler sampler(cov, opts);
    FieldSample sample;
    sample.seed = seed;
    sample.jitter = sampler.jitter();
    sample.values.resize(sampler.dim());
    GaussianStream gauss(make_stream(seed, Stream::field_noise, 0, 0));
    sampler.draw(gauss, sample.values);
    return sample;
}

namespace {

int next_pow2(int v) {
    int p = 1;
    while (p < v) p <<= 1;
    return p;
}

// In-place 2D transform, one 1D pass per dimension.
void fft2_inplace(Eigen::MatrixXcd& m, bool inverse) {
    Eigen::FFT<double> fft;
    Eigen::VectorXcd in, out;
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        in = m.row(r);
        if (inverse) fft.inv(out, in); else fft.fwd(out, in);
        m.row(r) = out;
    }
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
        in = m.col(c);
        if (inverse) fft.inv(out, in); else fft.fwd(out, in);
        m.col(c) = out;
    }
}

}  // namespace

CirculantFieldSampler::CirculantFieldSampler(int rows, int cols, const ExpKernel& kernel,
                                             CirculantOptions opts)
    : rows_(rows), cols_(cols) {
    kernel.validate();
    if (rows < 1 || cols < 1)
        throw std::invalid_argument("circulant sampler: empty grid");
    if (opts.embed_factor < 2)
        throw std::invalid_argument("circulant sampler: embed_factor must be >= 2");

    m1_ = next_pow2(opts.embed_factor * rows);
    m2_ = next_pow2(opts.embed_factor * cols);

    // Kernel periodized on the torus: distance to the nearest image.
    Eigen::MatrixXcd embed(m1_, m2_);
    for (int k1 = 0; k1 < m1_; ++k1) {
        const int d1 = std::min(k1, m1_ - k1);
        for (int k2 = 0; k2 < m2_; ++k2) {
            const int d2 = std::min(k2, m2_ - k2);
            embed(k1, k2) = kernel.kappa_c * std::exp(-kernel.lambda_c * std::max(d1, d2));
        }
    }
    fft2_inplace(embed, /*inverse=*/false);

    double clipped = 0.0, total = 0.0;
    weight_.resize(m1_, m2_);
    const double cells = double(m1_) * double(m2_);
    for (int k1 = 0; k1 < m1_; ++k1)
        for (int k2 = 0; k2 < m2_; ++k2) {
            const double eig = embed(k1, k2).real();
            total += std::fabs(eig);
            if (eig < 0.0) {
                clipped += -eig;
                weight_(k1, k2) = 0.0;
            } else {
                weight_(k1, k2) = std::sqrt(eig * cells);
            }
        }
    clipped_ = total > 0.0 ? clipped / total : 0.0;
    if (clipped_ > opts.clip_tol)
        throw std::runtime_error(
            "circulant sampler: clipped spectral mass " + std::to_string(clipped_) +
            " exceeds tolerance " + std::to_string(opts.clip_tol) +
            "; use the dense sampler or a larger embedding");
}

void CirculantFieldSampler::draw(GaussianStream& gauss, std::span<double> out) const {
    if (static_cast<int>(out.size()) != rows_ * cols_)
        throw std::invalid_argument("circulant sampler: output size mismatch");
    Eigen::MatrixXcd freq(m1_, m2_);
    for (int k1 = 0; k1 < m1_; ++k1)
        for (int k2 = 0; k2 < m2_; ++k2) {
            const double re = gauss();
            const double im = gauss();
            freq(k1, k2) = weight_(k1, k2) * std::complex<double>(re, im);
        }
    fft2_inplace(freq, /*inverse=*/true);
    for (int r = 0; r < rows_; ++r)
        for (int c = 0; c < cols_; ++c)
            out[std::size_t(r) * cols_ + c] = freq(r, c).real();
}

FieldSample sample_field_circulant(const LatticeSpec& spec, const ExpKernel& kernel,
                                   std::uint64_t seed, CirculantOptions opts) {
    CirculantFieldSampler sampler(spec.rows, spec.cols, kernel, opts);
    FieldSample sample;
    sample.seed = seed;
    sample.clipped_mass = sampler.clipped_mass();
    sample.values.resize(std::size_t(spec.rows) * spec.cols);
    GaussianStream gauss(make_stream(seed, Stream::field_noise, 0, 0));
    sampler.draw(gauss, sample.values);
    return sample;
}

}  // namespace permacox
