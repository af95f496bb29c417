#pragma once

// Zero-mean Gaussian random fields on the masked lattice with exponential
// covariance under the max-norm distance. Two samplers: exact dense Cholesky
// for moderate cell counts, circulant embedding on the doubled torus for
// large stationary grids.

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "permacox/lattice.hpp"
#include "permacox/random.hpp"

namespace permacox {

// C(r) = kappa_c * exp(-lambda_c * r), r in grid units (max norm).
struct ExpKernel {
    double kappa_c = 1.0;
    double lambda_c = 0.0;
    void validate() const;
};

double kernel_eval(const ExpKernel& kernel, double r);

// Covariance of the separable model Y(x) = amp(x) * Z(x) with Z unit-variance
// stationary, corr(Z(a),Z(b)) = exp(-lambda_c * |a-b|_inf). kappa_c is folded
// into the amplitudes; the diagonal is amp^2.
Eigen::MatrixXd build_covariance(std::span<const CellRef> cells, const ExpKernel& kernel,
                                 std::span<const double> amplitude);

struct FieldSample {
    std::vector<double> values;
    std::uint64_t seed = 0;
    double jitter = 0.0;        // absolute diagonal jitter the factorization needed
    double clipped_mass = 0.0;  // circulant path only
};

struct CholeskyOptions {
    double jitter_rel_start = 1e-10;  // relative to the mean diagonal
    double jitter_growth = 10.0;
    double jitter_rel_max = 1e-4;
};

// Factors a covariance once and draws any number of fields from it.
class DenseFieldSampler {
public:
    explicit DenseFieldSampler(const Eigen::MatrixXd& cov, CholeskyOptions opts = {});

    int dim() const { return static_cast<int>(chol_.rows()); }
    double jitter() const { return jitter_; }

    void draw(GaussianStream& gauss, std::span<double> out) const;

private:
    Eigen::MatrixXd chol_;  // lower factor
    double jitter_ = 0.0;
};

FieldSample sample_field_dense(const Eigen::MatrixXd& cov, std::uint64_t seed,
                               CholeskyOptions opts = {});

struct CirculantOptions {
    int embed_factor = 2;    // torus side >= embed_factor * grid side, rounded to 2^k
    double clip_tol = 1e-3;  // max tolerated clipped fraction of spectral mass
};

// Stationary sampler on the full rows x cols grid via circulant embedding of
// the kernel on a doubled torus; fast cyclic convolution gives each draw.
// Negative embedding eigenvalues are clipped to zero and the clipped spectral
// mass fraction is reported.
class CirculantFieldSampler {
public:
    CirculantFieldSampler(int rows, int cols, const ExpKernel& kernel,
                          CirculantOptions opts = {});

    double clipped_mass() const { return clipped_; }
    int rows() const { return rows_; }
    int cols() const { return cols_; }

    // Fills rows*cols values in row-major order.
    void draw(GaussianStream& gauss, std::span<double> out) const;

private:
    int rows_ = 0, cols_ = 0;
    int m1_ = 0, m2_ = 0;              // torus dimensions (powers of two)
    Eigen::ArrayXXd weight_;           // sqrt(max(eig,0) * m1 * m2), torus layout
    double clipped_ = 0.0;
};

FieldSample sample_field_circulant(const LatticeSpec& spec, const ExpKernel& kernel,
                                   std::uint64_t seed, CirculantOptions opts = {});

}  // namespace permacox
