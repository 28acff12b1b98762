#ifndef EPBDF_BDF_HPP
#define EPBDF_BDF_HPP

#include <functional>
#include <span>
#include <vector>

#include "epbdf/linalg.hpp"
#include "epbdf/polynomial.hpp"

namespace epbdf {

/// Coefficient tables of the q-step BDF pair, generated exactly from
///   alpha(z) = sum_{j=1..q} (1/j) z^{q-j} (z-1)^j      (implicit derivative)
///   gamma(z) = z^q - (z-1)^q                           (explicit extrapolation)
/// together with the composites alpha_tilde = alpha*z^q and alpha_hat = alpha*gamma
/// that turn the decoupled scheme into a 2q-step recursion.
struct BdfScheme {
    int q = 0;
    RationalPoly alpha;       // degree q
    RationalPoly gamma;       // degree q-1
    RationalPoly alpha_tilde; // degree 2q
    RationalPoly alpha_hat;   // degree 2q-1

    std::vector<double> alpha_d, gamma_d, alpha_tilde_d, alpha_hat_d;

    /// alpha_tilde + m*alpha_hat for exact rational m.
    RationalPoly composite(const Rational& m) const;
    Polynomial composite_poly(double m) const;
};

/// q outside 1..6 throws std::invalid_argument (implicit BDF loses zero-stability beyond 6).
BdfScheme make_scheme(int q);

/// Fixed-capacity window of the most recent vectors, oldest first.
/// Steppers own the buffer; the discrete-calculus operations below only read
/// contiguous snapshots out of it.
class HistoryBuffer {
  public:
    HistoryBuffer() = default;
    explicit HistoryBuffer(int capacity) : cap_(capacity) {}

    void push(Vector v);
    int size() const { return static_cast<int>(buf_.size()); }
    int capacity() const { return cap_; }
    long step_index() const { return step_; } // index of the newest entry

    /// Last k entries, oldest first.
    std::vector<std::span<const double>> window(int k) const;
    const Vector& newest(int back = 0) const; // back=0 newest, back=1 previous, ...

  private:
    int cap_ = 0;
    long step_ = -1;
    std::vector<Vector> buf_; // rotated so that buf_.back() is newest
};

/// (1/tau) sum_i alpha_i v^{n-q+i}; window holds v^{n-q}..v^n, oldest first.
Vector discrete_derivative(const BdfScheme& s, std::span<const std::span<const double>> window,
                           double tau);

/// sum_{i<q} gamma_i v^{n-q+i}: value at t_n of the degree-(q-1) interpolant
/// through the last q entries; window holds v^{n-q}..v^{n-1}, oldest first.
Vector extrapolate(const BdfScheme& s, std::span<const std::span<const double>> window);

/// Back-substitution for the negative starting history: the unique
/// p^{-1},...,p^{-q} with extrapolated value == p^n for n = q-1 down to 0.
/// Input p^0..p^{q-1} oldest first; returns p^{-q}..p^{-1} oldest first.
std::vector<Vector> solve_negative_history(const BdfScheme& s, std::span<const Vector> p_start);

struct ConsistencyResult {
    std::vector<double> taus;
    std::vector<double> max_defects; // max over grid of |discrete derivative - exact|
    std::vector<double> slopes;      // pairwise log-log slopes, size = taus-1
};

/// Defect of the discrete time derivative on nodal samples of a smooth scalar
/// function over [0, t_end]; needs at least two step sizes for slope estimates.
ConsistencyResult consistency_probe(const BdfScheme& s, const std::function<double(double)>& f,
                                    const std::function<double(double)>& df,
                                    std::span<const double> taus, double t_end = 1.0);

} // namespace epbdf

#endif
