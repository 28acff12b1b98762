#include "epbdf/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace epbdf {

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

void axpy(double s, std::span<const double> x, std::span<double> y) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += s * x[i];
}

DenseMatrix DenseMatrix::identity(int n) {
    DenseMatrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Vector DenseMatrix::apply(std::span<const double> x) const {
    Vector y(r_, 0.0);
    for (int i = 0; i < r_; ++i) {
        const double* row = &a_[static_cast<std::size_t>(i) * c_];
        double s = 0.0;
        for (int j = 0; j < c_; ++j) s += row[j] * x[j];
        y[i] = s;
    }
    return y;
}

Vector DenseMatrix::apply_transposed(std::span<const double> x) const {
    Vector y(c_, 0.0);
    for (int i = 0; i < r_; ++i) {
        const double* row = &a_[static_cast<std::size_t>(i) * c_];
        const double xi = x[i];
        for (int j = 0; j < c_; ++j) y[j] += row[j] * xi;
    }
    return y;
}

DenseMatrix DenseMatrix::transposed() const {
    DenseMatrix t(c_, r_);
    for (int i = 0; i < r_; ++i)
        for (int j = 0; j < c_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

DenseMatrix operator+(const DenseMatrix& a, const DenseMatrix& b) {
    DenseMatrix c = a;
    for (std::size_t i = 0; i < c.a_.size(); ++i) c.a_[i] += b.a_[i];
    return c;
}

DenseMatrix operator-(const DenseMatrix& a, const DenseMatrix& b) {
    DenseMatrix c = a;
    for (std::size_t i = 0; i < c.a_.size(); ++i) c.a_[i] -= b.a_[i];
    return c;
}

DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b) {
    DenseMatrix c(a.r_, b.c_);
    for (int i = 0; i < a.r_; ++i)
        for (int k = 0; k < a.c_; ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (int j = 0; j < b.c_; ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

DenseMatrix operator*(double s, const DenseMatrix& a) {
    DenseMatrix c = a;
    for (std::size_t i = 0; i < c.a_.size(); ++i) c.a_[i] *= s;
    return c;
}

double DenseMatrix::max_abs() const {
    double m = 0.0;
    for (double x : a_) m = std::max(m, std::abs(x));
    return m;
}

double DenseMatrix::asymmetry() const {
    double m = 0.0;
    for (int i = 0; i < r_; ++i)
        for (int j = i + 1; j < c_; ++j) m = std::max(m, std::abs((*this)(i, j) - (*this)(j, i)));
    return m;
}

DenseMatrix kron(const DenseMatrix& a, const DenseMatrix& b) {
    DenseMatrix c(a.rows() * b.rows(), a.cols() * b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) {
            const double aij = a(i, j);
            if (aij == 0.0) continue;
            for (int k = 0; k < b.rows(); ++k)
                for (int l = 0; l < b.cols(); ++l)
                    c(i * b.rows() + k, j * b.cols() + l) = aij * b(k, l);
        }
    return c;
}

Factorization::Factorization(const DenseMatrix& a) : n_(a.rows()), lu_(a), perm_(a.rows()) {
    if (a.rows() != a.cols()) throw std::invalid_argument("Factorization: matrix not square");
    for (int i = 0; i < n_; ++i) perm_[i] = i;
    for (int k = 0; k < n_; ++k) {
        int piv = k;
        double best = std::abs(lu_(k, k));
        for (int i = k + 1; i < n_; ++i)
            if (std::abs(lu_(i, k)) > best) { best = std::abs(lu_(i, k)); piv = i; }
        if (best == 0.0) throw std::runtime_error("Factorization: singular matrix");
        if (piv != k) {
            for (int j = 0; j < n_; ++j) std::swap(lu_(k, j), lu_(piv, j));
            std::swap(perm_[k], perm_[piv]);
            perm_sign_ = -perm_sign_;
        }
        const double d = lu_(k, k);
        for (int i = k + 1; i < n_; ++i) {
            const double m = lu_(i, k) / d;
            lu_(i, k) = m;
            if (m == 0.0) continue;
            for (int j = k + 1; j < n_; ++j) lu_(i, j) -= m * lu_(k, j);
        }
    }
}

Vector Factorization::solve(std::span<const double> rhs) const {
    Vector x(n_);
    for (int i = 0; i < n_; ++i) x[i] = rhs[perm_[i]];
    for (int i = 1; i < n_; ++i) {
        double s = x[i];
        for (int j = 0; j < i; ++j) s -= lu_(i, j) * x[j];
        x[i] = s;
    }
    for (int i = n_ - 1; i >= 0; --i) {
        double s = x[i];
        for (int j = i + 1; j < n_; ++j) s -= lu_(i, j) * x[j];
        x[i] = s / lu_(i, i);
    }
    return x;
}

DenseMatrix Factorization::solve_matrix(const DenseMatrix& rhs) const {
    DenseMatrix x(rhs.rows(), rhs.cols());
    Vector col(rhs.rows());
    for (int j = 0; j < rhs.cols(); ++j) {
        for (int i = 0; i < rhs.rows(); ++i) col[i] = rhs(i, j);
        Vector sol = solve(col);
        for (int i = 0; i < rhs.rows(); ++i) x(i, j) = sol[i];
    }
    return x;
}

double Factorization::log_abs_det() const {
    double s = 0.0;
    for (int i = 0; i < n_; ++i) s += std::log(std::abs(lu_(i, i)));
    return s;
}

int Factorization::det_sign() const {
    int s = perm_sign_;
    for (int i = 0; i < n_; ++i)
        if (lu_(i, i) < 0) s = -s;
    return s;
}

double Factorization::pivot_ratio() const {
    double lo = std::abs(lu_(0, 0)), hi = lo;
    for (int i = 1; i < n_; ++i) {
        const double d = std::abs(lu_(i, i));
        lo = std::min(lo, d);
        hi = std::max(hi, d);
    }
    return lo > 0 ? hi / lo : std::numeric_limits<double>::infinity();
}

Vector lu_solve(const DenseMatrix& a, std::span<const double> rhs) {
    return Factorization(a).solve(rhs);
}

EigResult sym_eig(const DenseMatrix& a, bool want_vectors, double tol_sym) {
    const int n = a.rows();
    if (a.cols() != n) throw std::invalid_argument("sym_eig: matrix not square");
    const double scale = std::max(a.max_abs(), 1.0);
    if (a.asymmetry() > tol_sym * scale)
        throw std::invalid_argument("sym_eig: matrix not symmetric");

    DenseMatrix m = a;
    DenseMatrix q = want_vectors ? DenseMatrix::identity(n) : DenseMatrix();

    auto off_norm = [&]() {
        double s = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) s += m(i, j) * m(i, j);
        return std::sqrt(2.0 * s);
    };

    const double target = 1e-14 * std::max(scale, 1e-300);
    for (int sweep = 0; sweep < 60 && off_norm() > target; ++sweep) {
        for (int p = 0; p < n - 1; ++p)
            for (int qi = p + 1; qi < n; ++qi) {
                const double apq = m(p, qi);
                if (std::abs(apq) <= 1e-300) continue;
                const double theta = (m(qi, qi) - m(p, p)) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double mkp = m(k, p), mkq = m(k, qi);
                    m(k, p) = c * mkp - s * mkq;
                    m(k, qi) = s * mkp + c * mkq;
                }
                for (int k = 0; k < n; ++k) {
                    const double mpk = m(p, k), mqk = m(qi, k);
                    m(p, k) = c * mpk - s * mqk;
                    m(qi, k) = s * mpk + c * mqk;
                }
                if (want_vectors)
                    for (int k = 0; k < n; ++k) {
                        const double qkp = q(k, p), qkq = q(k, qi);
                        q(k, p) = c * qkp - s * qkq;
                        q(k, qi) = s * qkp + c * qkq;
                    }
            }
    }

    std::vector<int> idx(n);
    for (int i = 0; i < n; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](int i, int j) { return m(i, i) < m(j, j); });

    EigResult r;
    r.values.resize(n);
    for (int i = 0; i < n; ++i) r.values[i] = m(idx[i], idx[i]);
    if (want_vectors) {
        r.vectors = DenseMatrix(n, n);
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) r.vectors(i, j) = q(i, idx[j]);
    }
    return r;
}

double pencil_eig_largest(const DenseMatrix& a, const DenseMatrix& m, int iters) {
    Factorization mf(m);
    Rng rng(17);
    Vector x = rng.vector(a.rows());
    double lambda = 0.0;
    for (int it = 0; it < iters; ++it) {
        Vector y = mf.solve(a.apply(x));
        const double nrm = norm2(y);
        if (nrm == 0.0) return 0.0;
        for (double& v : y) v /= nrm;
        x = std::move(y);
        Vector ax = a.apply(x);
        Vector mx = m.apply(x);
        lambda = dot(ax, x) / dot(mx, x);
    }
    return lambda;
}

double pencil_eig_smallest(const DenseMatrix& a, const DenseMatrix& m, int iters) {
    Factorization af(a);
    Rng rng(29);
    Vector x = rng.vector(a.rows());
    double lambda = 0.0;
    for (int it = 0; it < iters; ++it) {
        Vector y = af.solve(m.apply(x));
        const double nrm = norm2(y);
        if (nrm == 0.0) return 0.0;
        for (double& v : y) v /= nrm;
        x = std::move(y);
        Vector ax = a.apply(x);
        Vector mx = m.apply(x);
        lambda = dot(ax, x) / dot(mx, x);
    }
    return lambda;
}

std::vector<std::complex<double>> poly_roots(const Polynomial& p, double tol) {
    using cplx = std::complex<double>;
    const double scale = p.max_abs_coeff();
    const int deg = p.degree(1e-14 * scale);
    if (deg < 1) throw std::invalid_argument("poly_roots: degree < 1");
    const int val = p.valuation(1e-14 * scale);

    std::vector<cplx> roots(val, cplx(0.0, 0.0)); // exact zero roots split off

    std::vector<double> c(p.coeffs().begin() + val, p.coeffs().begin() + deg + 1);
    const int n = static_cast<int>(c.size()) - 1;
    if (n == 0) return roots;
    for (double& x : c) x /= c.back(); // monic

    Polynomial q{std::vector<double>(c)};
    Polynomial dq = q.derivative();

    // Cauchy-style radius, starting points spread on a circle
    double radius = 0.0;
    for (int i = 0; i < n; ++i) radius = std::max(radius, std::pow(std::abs(c[i]), 1.0 / (n - i)));
    radius = std::max(1e-8, 1.5 * radius);
    std::vector<cplx> z(n);
    for (int i = 0; i < n; ++i) {
        const double ang = 2.0 * std::numbers::pi * i / n + 0.4;
        z[i] = radius * cplx(std::cos(ang), std::sin(ang));
    }

    bool converged = false;
    for (int it = 0; it < 500 && !converged; ++it) {
        converged = true;
        for (int i = 0; i < n; ++i) {
            const cplx pv = q(z[i]);
            const cplx dv = dq(z[i]);
            if (std::abs(pv) == 0.0) continue;
            cplx newton = dv != cplx(0.0) ? pv / dv : cplx(1e-8, 1e-8);
            cplx sum = 0.0;
            for (int j = 0; j < n; ++j)
                if (j != i) {
                    const cplx d = z[i] - z[j];
                    sum += (std::abs(d) > 1e-300) ? 1.0 / d : cplx(1e12, 1e12);
                }
            const cplx denom = 1.0 - newton * sum;
            const cplx step = std::abs(denom) > 1e-300 ? newton / denom : newton;
            z[i] -= step;
            if (std::abs(step) > tol * std::max(1.0, std::abs(z[i]))) converged = false;
        }
    }

    // Newton polishing; for clustered (multiple) roots the step stalls, which is fine.
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < 5; ++k) {
            const cplx dv = dq(z[i]);
            if (std::abs(dv) < 1e-250) break;
            z[i] -= q(z[i]) / dv;
        }

    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
        const double denom = std::max(1.0, std::pow(std::abs(z[i]), n));
        worst = std::max(worst, std::abs(q(z[i])) / denom);
    }
    if (worst > 1e-6)
        throw std::runtime_error("poly_roots: iteration did not converge, residual " +
                                 std::to_string(worst));

    roots.insert(roots.end(), z.begin(), z.end());
    return roots;
}

double normalized_resultant(const Polynomial& p, const Polynomial& q) {
    const int dp = p.degree();
    const int dq = q.degree();
    if (dp < 0 || dq < 0) return 0.0;
    const double sp = p.max_abs_coeff();
    const double sq = q.max_abs_coeff();
    const int n = dp + dq;
    if (n == 0) return 1.0;
    DenseMatrix syl(n, n);
    for (int i = 0; i < dq; ++i)
        for (int j = 0; j <= dp; ++j) syl(i, i + j) = p.coeff(dp - j) / sp;
    for (int i = 0; i < dp; ++i)
        for (int j = 0; j <= dq; ++j) syl(dq + i, i + j) = q.coeff(dq - j) / sq;
    try {
        Factorization f(syl);
        return std::exp(f.log_abs_det());
    } catch (const std::runtime_error&) {
        return 0.0; // exactly singular Sylvester matrix
    }
}

SpectralGrid chebyshev_grid(int n) {
    if (n < 2) throw std::invalid_argument("chebyshev_grid: need degree >= 2");
    SpectralGrid g;
    g.n = n;
    g.nodes.resize(n + 1);
    for (int j = 0; j <= n; ++j) g.nodes[j] = std::cos(std::numbers::pi * j / n);

    // standard CGL differentiation matrix, diagonal by negative row sums
    g.d1 = DenseMatrix(n + 1, n + 1);
    auto cfac = [&](int j) { return (j == 0 || j == n) ? 2.0 : 1.0; };
    for (int i = 0; i <= n; ++i)
        for (int j = 0; j <= n; ++j) {
            if (i == j) continue;
            const double sign = ((i + j) % 2 == 0) ? 1.0 : -1.0;
            g.d1(i, j) = cfac(i) / cfac(j) * sign / (g.nodes[i] - g.nodes[j]);
        }
    for (int i = 0; i <= n; ++i) {
        double s = 0.0;
        for (int j = 0; j <= n; ++j)
            if (j != i) s += g.d1(i, j);
        g.d1(i, i) = -s;
    }

    // Clenshaw-Curtis weights from the cosine series of 2/(1-k^2)
    g.weights.assign(n + 1, 0.0);
    for (int j = 0; j <= n; ++j) {
        double s = 1.0;
        for (int k = 1; k <= n / 2; ++k) {
            const double bk = (2 * k == n) ? 1.0 : 2.0;
            s -= bk * std::cos(2.0 * k * j * std::numbers::pi / n) / (4.0 * k * k - 1.0);
        }
        g.weights[j] = 2.0 * s / n;
        if (j == 0 || j == n) g.weights[j] /= 2.0;
    }
    return g;
}

double Rng::uniform() {
    s_ ^= s_ << 13;
    s_ ^= s_ >> 7;
    s_ ^= s_ << 17;
    return static_cast<double>(s_ >> 11) * 0x1.0p-53;
}

double Rng::sym() { return 2.0 * uniform() - 1.0; }

Vector Rng::vector(int n) {
    Vector v(n);
    for (double& x : v) x = sym();
    return v;
}

} // namespace epbdf
