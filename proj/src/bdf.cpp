#include "epbdf/bdf.hpp"

#include <cmath>
#include <stdexcept>

namespace epbdf {

namespace {

RationalPoly binomial_power(int j) {
    // (z - 1)^j
    RationalPoly p{Rational(1)};
    const RationalPoly lin{Rational(-1), Rational(1)};
    for (int k = 0; k < j; ++k) p = rp_mul(p, lin);
    return p;
}

std::vector<double> to_doubles(const RationalPoly& p) {
    std::vector<double> d(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) d[i] = p[i].value();
    return d;
}

} // namespace

BdfScheme make_scheme(int q) {
    if (q < 1 || q > 6)
        throw std::invalid_argument("make_scheme: q must be in 1..6 (implicit BDF is not "
                                    "zero-stable for q >= 7)");
    BdfScheme s;
    s.q = q;

    s.alpha.assign(q + 1, Rational(0));
    for (int j = 1; j <= q; ++j) {
        RationalPoly term = binomial_power(j); // (z-1)^j
        // shift by z^{q-j} and scale by 1/j
        RationalPoly shifted(q + 1, Rational(0));
        for (std::size_t i = 0; i < term.size(); ++i)
            shifted[q - j + i] = term[i] * Rational(1, j);
        s.alpha = rp_add(s.alpha, shifted);
    }

    // gamma(z) = z^q - (z-1)^q, degree q-1
    RationalPoly zq(q + 1, Rational(0));
    zq[q] = Rational(1);
    RationalPoly g = rp_add(zq, rp_scale(Rational(-1), binomial_power(q)));
    g.resize(q); // top coefficients cancel exactly
    s.gamma = g;

    RationalPoly beta(q + 1, Rational(0));
    beta[q] = Rational(1);
    s.alpha_tilde = rp_mul(s.alpha, beta);
    s.alpha_hat = rp_mul(s.alpha, s.gamma);

    s.alpha_d = to_doubles(s.alpha);
    s.gamma_d = to_doubles(s.gamma);
    s.alpha_tilde_d = to_doubles(s.alpha_tilde);
    s.alpha_hat_d = to_doubles(s.alpha_hat);
    return s;
}

RationalPoly BdfScheme::composite(const Rational& m) const {
    RationalPoly c = alpha_tilde;
    for (std::size_t i = 0; i < alpha_hat.size(); ++i) c[i] = c[i] + m * alpha_hat[i];
    return c;
}

Polynomial BdfScheme::composite_poly(double m) const {
    std::vector<double> c = alpha_tilde_d;
    for (std::size_t i = 0; i < alpha_hat_d.size(); ++i) c[i] += m * alpha_hat_d[i];
    return Polynomial(std::move(c));
}

void HistoryBuffer::push(Vector v) {
    if (static_cast<int>(buf_.size()) == cap_ && cap_ > 0)
        buf_.erase(buf_.begin());
    buf_.push_back(std::move(v));
    ++step_;
}

std::vector<std::span<const double>> HistoryBuffer::window(int k) const {
    if (k > size()) throw std::runtime_error("HistoryBuffer: insufficient history");
    std::vector<std::span<const double>> w;
    w.reserve(k);
    for (int i = size() - k; i < size(); ++i) w.emplace_back(buf_[i]);
    return w;
}

const Vector& HistoryBuffer::newest(int back) const {
    if (back >= size()) throw std::runtime_error("HistoryBuffer: insufficient history");
    return buf_[buf_.size() - 1 - back];
}

Vector discrete_derivative(const BdfScheme& s, std::span<const std::span<const double>> window,
                           double tau) {
    if (static_cast<int>(window.size()) < s.q + 1)
        throw std::runtime_error("discrete_derivative: window shorter than q+1");
    const std::size_t offset = window.size() - (s.q + 1);
    Vector out(window[0].size(), 0.0);
    for (int i = 0; i <= s.q; ++i) axpy(s.alpha_d[i] / tau, window[offset + i], out);
    return out;
}

Vector extrapolate(const BdfScheme& s, std::span<const std::span<const double>> window) {
    if (static_cast<int>(window.size()) < s.q)
        throw std::runtime_error("extrapolate: window shorter than q");
    const std::size_t offset = window.size() - s.q;
    Vector out(window[0].size(), 0.0);
    for (int i = 0; i < s.q; ++i) axpy(s.gamma_d[i], window[offset + i], out);
    return out;
}

std::vector<Vector> solve_negative_history(const BdfScheme& s, std::span<const Vector> p_start) {
    const int q = s.q;
    if (static_cast<int>(p_start.size()) != q)
        throw std::runtime_error("solve_negative_history: expected q starting values");
    // values[j] holds p^{j-q}, j = 0..2q-1; the first q slots get filled
    // backwards from the condition  sum_i gamma_i p^{n-q+i} = p^n, n = q-1..0,
    // whose pivot is gamma_0 = (-1)^{q-1}.
    std::vector<Vector> values(2 * q);
    for (int i = 0; i < q; ++i) values[q + i] = p_start[i];
    const double g0 = s.gamma_d[0];
    for (int n = q - 1; n >= 0; --n) {
        Vector rhs = p_start[n]; // p^n
        for (int i = 1; i < q; ++i) axpy(-s.gamma_d[i], values[n + i], rhs);
        for (double& x : rhs) x /= g0;
        values[n] = std::move(rhs);
    }
    return {values.begin(), values.begin() + q}; // p^{-q}..p^{-1}
}

ConsistencyResult consistency_probe(const BdfScheme& s, const std::function<double(double)>& f,
                                    const std::function<double(double)>& df,
                                    std::span<const double> taus, double t_end) {
    if (taus.size() < 2)
        throw std::invalid_argument("consistency_probe: need at least two step sizes");
    ConsistencyResult r;
    for (double tau : taus) {
        const int n_steps = static_cast<int>(std::llround(t_end / tau));
        double worst = 0.0;
        for (int n = s.q; n <= n_steps; ++n) {
            double acc = 0.0;
            for (int i = 0; i <= s.q; ++i) acc += s.alpha_d[i] * f((n - s.q + i) * tau);
            const double defect = acc / tau - df(n * tau);
            worst = std::max(worst, std::abs(defect));
        }
        r.taus.push_back(tau);
        r.max_defects.push_back(worst);
    }
    for (std::size_t k = 1; k < r.taus.size(); ++k) {
        const double num = std::log(r.max_defects[k - 1] / r.max_defects[k]);
        const double den = std::log(r.taus[k - 1] / r.taus[k]);
        r.slopes.push_back(num / den);
    }
    return r;
}

} // namespace epbdf
