#include "epbdf/polynomial.hpp"

#include <cmath>
#include <stdexcept>

namespace epbdf {

Polynomial Polynomial::monomial(int degree, double coeff) {
    std::vector<double> c(degree + 1, 0.0);
    c[degree] = coeff;
    return Polynomial(std::move(c));
}

int Polynomial::degree(double tol) const {
    for (int i = static_cast<int>(c_.size()) - 1; i >= 0; --i)
        if (std::abs(c_[i]) > tol) return i;
    return -1;
}

double Polynomial::operator()(double x) const {
    double r = 0.0;
    for (int i = static_cast<int>(c_.size()) - 1; i >= 0; --i) r = r * x + c_[i];
    return r;
}

std::complex<double> Polynomial::operator()(std::complex<double> z) const {
    std::complex<double> r = 0.0;
    for (int i = static_cast<int>(c_.size()) - 1; i >= 0; --i) r = r * z + c_[i];
    return r;
}

Polynomial Polynomial::derivative() const {
    if (c_.size() <= 1) return Polynomial{};
    std::vector<double> d(c_.size() - 1);
    for (std::size_t i = 1; i < c_.size(); ++i) d[i - 1] = static_cast<double>(i) * c_[i];
    return Polynomial(std::move(d));
}

int Polynomial::valuation(double tol) const {
    for (std::size_t i = 0; i < c_.size(); ++i)
        if (std::abs(c_[i]) > tol) return static_cast<int>(i);
    return static_cast<int>(c_.size());
}

Polynomial Polynomial::shifted_down(int k) const {
    if (k == 0) return *this;
    if (valuation() < k) throw std::invalid_argument("shifted_down: nonzero low-order coefficients");
    if (k >= static_cast<int>(c_.size())) return Polynomial{};
    return Polynomial(std::vector<double>(c_.begin() + k, c_.end()));
}

Polynomial operator+(const Polynomial& a, const Polynomial& b) {
    std::vector<double> c(std::max(a.c_.size(), b.c_.size()), 0.0);
    for (std::size_t i = 0; i < a.c_.size(); ++i) c[i] += a.c_[i];
    for (std::size_t i = 0; i < b.c_.size(); ++i) c[i] += b.c_[i];
    return Polynomial(std::move(c));
}

Polynomial operator-(const Polynomial& a, const Polynomial& b) {
    std::vector<double> c(std::max(a.c_.size(), b.c_.size()), 0.0);
    for (std::size_t i = 0; i < a.c_.size(); ++i) c[i] += a.c_[i];
    for (std::size_t i = 0; i < b.c_.size(); ++i) c[i] -= b.c_[i];
    return Polynomial(std::move(c));
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    if (a.c_.empty() || b.c_.empty()) return Polynomial{};
    std::vector<double> c(a.c_.size() + b.c_.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.c_.size(); ++i)
        for (std::size_t j = 0; j < b.c_.size(); ++j) c[i + j] += a.c_[i] * b.c_[j];
    return Polynomial(std::move(c));
}

Polynomial operator*(double s, const Polynomial& p) {
    std::vector<double> c = p.c_;
    for (double& x : c) x *= s;
    return Polynomial(std::move(c));
}

double Polynomial::max_abs_coeff() const {
    double m = 0.0;
    for (double x : c_) m = std::max(m, std::abs(x));
    return m;
}

RationalPoly rp_add(const RationalPoly& a, const RationalPoly& b) {
    RationalPoly c(std::max(a.size(), b.size()));
    for (std::size_t i = 0; i < a.size(); ++i) c[i] = c[i] + a[i];
    for (std::size_t i = 0; i < b.size(); ++i) c[i] = c[i] + b[i];
    return c;
}

RationalPoly rp_mul(const RationalPoly& a, const RationalPoly& b) {
    if (a.empty() || b.empty()) return {};
    RationalPoly c(a.size() + b.size() - 1);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) c[i + j] = c[i + j] + a[i] * b[j];
    return c;
}

RationalPoly rp_scale(const Rational& s, const RationalPoly& a) {
    RationalPoly c = a;
    for (Rational& x : c) x = x * s;
    return c;
}

Polynomial rp_to_poly(const RationalPoly& a) {
    std::vector<double> c(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) c[i] = a[i].value();
    return Polynomial(std::move(c));
}

std::vector<std::int64_t> chebyshev_T_int(int n) {
    // T_{k+1} = 2x T_k - T_{k-1}
    std::vector<std::int64_t> prev{1}, cur{0, 1};
    if (n == 0) return prev;
    for (int k = 1; k < n; ++k) {
        std::vector<std::int64_t> next(k + 2, 0);
        for (int i = 0; i <= k; ++i) next[i + 1] += 2 * cur[i];
        for (int i = 0; i < k; ++i) next[i] -= prev[i];
        prev = std::move(cur);
        cur = std::move(next);
    }
    return cur;
}

std::vector<std::int64_t> chebyshev_U_int(int n) {
    std::vector<std::int64_t> prev{1}, cur{0, 2};
    if (n == 0) return prev;
    for (int k = 1; k < n; ++k) {
        std::vector<std::int64_t> next(k + 2, 0);
        for (int i = 0; i <= k; ++i) next[i + 1] += 2 * cur[i];
        for (int i = 0; i < k; ++i) next[i] -= prev[i];
        prev = std::move(cur);
        cur = std::move(next);
    }
    return cur;
}

} // namespace epbdf
