#ifndef EPBDF_LINALG_HPP
#define EPBDF_LINALG_HPP

#include <complex>
#include <span>
#include <vector>

#include "epbdf/polynomial.hpp"

namespace epbdf {

using Vector = std::vector<double>;

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
void axpy(double s, std::span<const double> x, std::span<double> y); // y += s*x

/// Row-major dense matrix. Sizes in this project stay around 10^3,
/// so everything is plain O(n^3) kernels without blocking.
class DenseMatrix {
  public:
    DenseMatrix() = default;
    DenseMatrix(int rows, int cols, double fill = 0.0)
        : r_(rows), c_(cols), a_(static_cast<std::size_t>(rows) * cols, fill) {}

    static DenseMatrix identity(int n);

    int rows() const { return r_; }
    int cols() const { return c_; }
    double& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * c_ + j]; }
    double operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * c_ + j]; }

    Vector apply(std::span<const double> x) const;            // A x
    Vector apply_transposed(std::span<const double> x) const; // A^T x
    DenseMatrix transposed() const;

    friend DenseMatrix operator+(const DenseMatrix& a, const DenseMatrix& b);
    friend DenseMatrix operator-(const DenseMatrix& a, const DenseMatrix& b);
    friend DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b);
    friend DenseMatrix operator*(double s, const DenseMatrix& a);

    double max_abs() const;
    double asymmetry() const; // max |a_ij - a_ji|

  private:
    int r_ = 0, c_ = 0;
    std::vector<double> a_;
};

DenseMatrix kron(const DenseMatrix& a, const DenseMatrix& b);

/// LU factorization with partial pivoting of a square matrix.
class Factorization {
  public:
    Factorization() = default;
    explicit Factorization(const DenseMatrix& a); // throws std::runtime_error if singular

    int size() const { return n_; }
    Vector solve(std::span<const double> rhs) const;
    DenseMatrix solve_matrix(const DenseMatrix& rhs) const; // columnwise solves
    double log_abs_det() const;
    int det_sign() const;
    /// max|U_ii| / min|U_ii|, a crude conditioning indicator for diagnostics.
    double pivot_ratio() const;

  private:
    int n_ = 0;
    DenseMatrix lu_;
    std::vector<int> perm_;
    int perm_sign_ = 1;
};

Vector lu_solve(const DenseMatrix& a, std::span<const double> rhs);

struct EigResult {
    Vector values;       // ascending
    DenseMatrix vectors; // columns, iff requested
};

/// Cyclic Jacobi for symmetric matrices; rejects inputs with asymmetry above tol_sym.
EigResult sym_eig(const DenseMatrix& a, bool want_vectors = false, double tol_sym = 1e-10);

/// Extreme eigenvalues of an SPD pencil A x = lambda M x without a full solve:
/// power iteration on M^{-1}A (largest) and inverse iteration on A^{-1}M (smallest).
double pencil_eig_largest(const DenseMatrix& a, const DenseMatrix& m, int iters = 200);
double pencil_eig_smallest(const DenseMatrix& a, const DenseMatrix& m, int iters = 200);

/// All complex roots by Aberth-Ehrlich simultaneous iteration with residual polishing.
/// Roots at zero (trailing low-order zero coefficients) are split off exactly.
std::vector<std::complex<double>> poly_roots(const Polynomial& p, double tol = 1e-13);

/// Resultant of two real polynomials via the Sylvester matrix, after scaling each
/// polynomial to unit max-norm; |det| of the scaled Sylvester matrix is returned.
double normalized_resultant(const Polynomial& p, const Polynomial& q);

/// Chebyshev-Gauss-Lobatto grid data on [-1,1].
struct SpectralGrid {
    int n = 0;       // polynomial degree; n+1 nodes
    Vector nodes;    // x_j = cos(j pi / n), j = 0..n (descending from 1 to -1)
    DenseMatrix d1;  // first-derivative collocation matrix
    Vector weights;  // Clenshaw-Curtis quadrature weights
};

SpectralGrid chebyshev_grid(int n);

/// Deterministic xorshift generator for property-style tests and estimators.
class Rng {
  public:
    explicit Rng(std::uint64_t seed = 0x9e3779b97f4a7c15ull) : s_(seed ? seed : 1) {}
    double uniform(); // [0,1)
    double sym();     // [-1,1)
    Vector vector(int n);

  private:
    std::uint64_t s_;
};

} // namespace epbdf

#endif
