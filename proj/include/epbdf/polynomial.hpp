#ifndef EPBDF_POLYNOMIAL_HPP
#define EPBDF_POLYNOMIAL_HPP

#include <complex>
#include <vector>

#include "epbdf/rational.hpp"

namespace epbdf {

/// Real polynomial, coefficients in ascending degree order.
class Polynomial {
  public:
    Polynomial() = default;
    explicit Polynomial(std::vector<double> coeffs) : c_(std::move(coeffs)) {}

    static Polynomial zero() { return Polynomial{}; }
    static Polynomial monomial(int degree, double coeff = 1.0);

    const std::vector<double>& coeffs() const { return c_; }
    double coeff(int i) const { return i >= 0 && i < static_cast<int>(c_.size()) ? c_[i] : 0.0; }

    /// Degree after dropping trailing (near-)zero coefficients; -1 for the zero polynomial.
    int degree(double tol = 0.0) const;

    double operator()(double x) const;
    std::complex<double> operator()(std::complex<double> z) const;

    Polynomial derivative() const;

    /// Index of the lowest-order nonzero coefficient (order of the root at 0);
    /// degree()+1 semantics do not apply: returns coefficient count for the zero polynomial.
    int valuation(double tol = 0.0) const;

    /// Divide by x^k, requires the first k coefficients to vanish.
    Polynomial shifted_down(int k) const;

    friend Polynomial operator+(const Polynomial& a, const Polynomial& b);
    friend Polynomial operator-(const Polynomial& a, const Polynomial& b);
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
    friend Polynomial operator*(double s, const Polynomial& p);

    double max_abs_coeff() const;

  private:
    std::vector<double> c_;
};

/// Exact-coefficient polynomial arithmetic used when generating scheme tables.
using RationalPoly = std::vector<Rational>; // ascending degree

RationalPoly rp_add(const RationalPoly& a, const RationalPoly& b);
RationalPoly rp_mul(const RationalPoly& a, const RationalPoly& b);
RationalPoly rp_scale(const Rational& s, const RationalPoly& a);
Polynomial rp_to_poly(const RationalPoly& a);

/// Chebyshev polynomials with exact integer coefficients, ascending degree.
/// T: cos(n phi) = T_n(cos phi);  U: sin(n phi) = U_{n-1}(cos phi) sin phi.
std::vector<std::int64_t> chebyshev_T_int(int n);
std::vector<std::int64_t> chebyshev_U_int(int n);

} // namespace epbdf

#endif
