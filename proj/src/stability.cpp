#include "epbdf/stability.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace epbdf {

namespace {

struct MinPoint {
    double value = 0.0;
    double x = 0.0;
};

MinPoint golden_refine(const Polynomial& p, double a, double b) {
    constexpr double inv_phi = 0.6180339887498949;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = p(x1), f2 = p(x2);
    for (int it = 0; it < 80 && (b - a) > 1e-15; ++it) {
        if (f1 < f2) {
            b = x2; x2 = x1; f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = p(x1);
        } else {
            a = x1; x1 = x2; f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = p(x2);
        }
    }
    return f1 < f2 ? MinPoint{f1, x1} : MinPoint{f2, x2};
}

/// Minimum via critical points (real roots of p') plus interval endpoints.
MinPoint poly_min_critical(const Polynomial& p, double a, double b) {
    MinPoint best{p(a), a};
    if (p(b) < best.value) best = {p(b), b};
    const Polynomial dp = p.derivative();
    if (dp.degree(1e-300) >= 1) {
        for (const auto& r : poly_roots(dp)) {
            if (std::abs(r.imag()) > 1e-8 * (1.0 + std::abs(r.real()))) continue;
            const double x = r.real();
            if (x < a || x > b) continue;
            const double v = p(x);
            if (v < best.value) best = {v, x};
        }
    }
    return best;
}

/// Dense sampling at cosine-spaced points with golden-section refinement of
/// every local minimum that dips below the refine threshold.
MinPoint poly_min_sampled(const Polynomial& p, int grid, double refine_below = 1e-6) {
    grid = std::max(grid, 16);
    std::vector<double> xs(grid), vs(grid);
    for (int k = 0; k < grid; ++k) {
        xs[k] = std::cos(std::numbers::pi * (grid - 1 - k) / (grid - 1)); // ascending in x
        vs[k] = p(xs[k]);
    }
    MinPoint best{vs[0], xs[0]};
    for (int k = 1; k < grid; ++k)
        if (vs[k] < best.value) best = {vs[k], xs[k]};
    for (int k = 1; k + 1 < grid; ++k) {
        const bool local_min = vs[k] <= vs[k - 1] && vs[k] <= vs[k + 1];
        if (!local_min || (vs[k] > refine_below && vs[k] > best.value)) continue;
        const MinPoint refined = golden_refine(p, xs[k - 1], xs[k + 1]);
        if (refined.value < best.value) best = refined;
    }
    return best;
}

RationalPoly strip_valuation(const RationalPoly& p, int k) {
    return RationalPoly(p.begin() + k, p.end());
}

int valuation(const RationalPoly& p) {
    for (std::size_t i = 0; i < p.size(); ++i)
        if (!p[i].is_zero()) return static_cast<int>(i);
    return static_cast<int>(p.size());
}

} // namespace

std::vector<double> Multiplier::values() const {
    std::vector<double> v(mu.size());
    for (std::size_t i = 0; i < mu.size(); ++i) v[i] = mu[i].value();
    return v;
}

RationalPoly Multiplier::mu_poly_exact(int deg) const {
    if (deg < 0) deg = q;
    if (deg < q) throw std::invalid_argument("Multiplier: degree below q");
    RationalPoly p(deg + 1, Rational(0));
    p[deg] = Rational(1);
    for (int j = 1; j <= q; ++j) p[deg - j] = -mu[j - 1];
    return p;
}

Polynomial Multiplier::mu_poly(int deg) const { return rp_to_poly(mu_poly_exact(deg)); }

Multiplier Multiplier::zero(int q) {
    Multiplier m;
    m.q = q;
    m.mu.assign(q, Rational(0));
    return m;
}

Multiplier Multiplier::published(int q) {
    Multiplier m = zero(q);
    switch (q) {
    case 4: m.mu[0] = Rational(1, 2); break;
    case 5: m.mu[0] = Rational(1); m.mu[1] = Rational(-1, 4); break;
    case 6: m.mu[0] = Rational(1); m.mu[1] = Rational(-9, 10); m.mu[2] = Rational(3, 10); break;
    default: break; // one- and two-step methods need no multiplier
    }
    return m;
}

RationalPoly reduce_cos_series_exact(std::span<const Rational> cos_coeffs) {
    RationalPoly out;
    for (std::size_t l = 0; l < cos_coeffs.size(); ++l) {
        if (cos_coeffs[l].is_zero()) continue;
        const auto t = chebyshev_T_int(static_cast<int>(l));
        if (out.size() < t.size()) out.resize(t.size(), Rational(0));
        for (std::size_t i = 0; i < t.size(); ++i)
            if (t[i] != 0) out[i] = out[i] + cos_coeffs[l] * Rational(t[i]);
    }
    if (out.empty()) out.push_back(Rational(0));
    return out;
}

TrigForm trig_to_chebyshev(std::span<const double> cos_coeffs,
                           std::span<const double> sin_coeffs) {
    TrigForm f;
    {
        std::vector<double> acc{0.0};
        for (std::size_t l = 0; l < cos_coeffs.size(); ++l) {
            if (cos_coeffs[l] == 0.0) continue;
            const auto t = chebyshev_T_int(static_cast<int>(l));
            if (acc.size() < t.size()) acc.resize(t.size(), 0.0);
            for (std::size_t i = 0; i < t.size(); ++i)
                acc[i] += cos_coeffs[l] * static_cast<double>(t[i]);
        }
        f.cos_part = Polynomial(std::move(acc));
    }
    {
        // sin coefficients are b_1..b_L: sin(l phi) = U_{l-1}(x) sin phi
        std::vector<double> acc{0.0};
        for (std::size_t k = 0; k < sin_coeffs.size(); ++k) {
            if (sin_coeffs[k] == 0.0) continue;
            const auto u = chebyshev_U_int(static_cast<int>(k));
            if (acc.size() < u.size()) acc.resize(u.size(), 0.0);
            for (std::size_t i = 0; i < u.size(); ++i)
                acc[i] += sin_coeffs[k] * static_cast<double>(u[i]);
        }
        f.sin_part = Polynomial(std::move(acc));
    }
    return f;
}

PositivityResult check_positivity_property(const Multiplier& m, double margin) {
    std::vector<Rational> cos_coeffs(m.q + 1, Rational(0));
    cos_coeffs[0] = Rational(1);
    for (int j = 1; j <= m.q; ++j) cos_coeffs[j] = -m.mu[j - 1];
    const Polynomial p = rp_to_poly(reduce_cos_series_exact(cos_coeffs));

    const MinPoint critical = poly_min_critical(p, -1.0, 1.0);
    const MinPoint sampled = poly_min_sampled(p, 20000);
    const MinPoint best = critical.value <= sampled.value ? critical : sampled;

    PositivityResult r;
    r.min_value = best.value;
    r.argmin_x = best.x;
    r.margin = margin;
    r.pass = best.value >= margin;
    return r;
}

RootDiskResult roots_in_unit_disk(const Polynomial& p, double tol) {
    RootDiskResult r;
    r.roots = poly_roots(p);
    for (const auto& z : r.roots) r.max_modulus = std::max(r.max_modulus, std::abs(z));
    r.pass = r.max_modulus < 1.0 - tol;
    return r;
}

AConditionResult check_A_condition(const BdfScheme& s, const Rational& m, const Multiplier& mult,
                                   int grid) {
    if (grid < 10000) grid = 10000;
    AConditionResult r;

    RationalPoly a = s.composite(m);            // alpha_tilde + m*alpha_hat, degree 2q
    RationalPoly u = mult.mu_poly_exact(2 * s.q);

    // Common powers of zeta cancel on the unit circle and do not affect (A).
    const int strip = std::min(valuation(a), valuation(u));
    a = strip_valuation(a, strip);
    u = strip_valuation(u, strip);
    const Polynomial a_d = rp_to_poly(a);
    const Polynomial u_d = rp_to_poly(u);

    // (i) roots of the multiplier polynomial strictly inside the unit disk
    {
        const int v = u_d.valuation(1e-14);
        const Polynomial core = u_d.shifted_down(v); // remaining zero roots are inside anyway
        r.mu_roots_inside = core.degree() < 1 || roots_in_unit_disk(core).pass;
    }

    // (ii) ratio of leading coefficients (limit of Re at infinity)
    r.leading_positive = s.alpha.back().value() > 0.0;

    // (iii) no common divisor: resultant magnitude, cross-checked by root separation
    r.resultant = normalized_resultant(a_d, u_d);
    bool roots_separated = true;
    {
        const auto ra = poly_roots(a_d);
        const int v = u_d.valuation(1e-14);
        std::vector<std::complex<double>> ru(v, 0.0);
        if (u_d.shifted_down(v).degree() >= 1)
            for (const auto& z : poly_roots(u_d.shifted_down(v))) ru.push_back(z);
        for (const auto& za : ra)
            for (const auto& zu : ru)
                if (std::abs(za - zu) < 1e-5) roots_separated = false;
    }
    r.no_common_divisor = r.resultant > 1e-8 || roots_separated;
    if (!r.no_common_divisor)
        throw std::runtime_error("check_A_condition: alpha and mu share a divisor "
                                 "(resultant " + std::to_string(r.resultant) + ")");

    // (iv) boundary positivity: Re[a(e^{i phi}) conj(u(e^{i phi}))] as an exact
    // polynomial in x = cos(phi), minimized by sampling plus critical points.
    const int da = static_cast<int>(a.size()) - 1;
    const int du = static_cast<int>(u.size()) - 1;
    const int dmax = std::max(da, du);
    std::vector<Rational> cos_coeffs(dmax + 1, Rational(0));
    for (int d = 0; d <= dmax; ++d) {
        Rational w(0);
        for (int i = 0; i <= da; ++i) {
            const int k1 = i - d;
            if (k1 >= 0 && k1 <= du) w = w + a[i] * u[k1];
            if (d > 0) {
                const int k2 = i + d;
                if (k2 <= du) w = w + a[i] * u[k2];
            }
        }
        cos_coeffs[d] = w;
    }
    r.boundary_poly = rp_to_poly(reduce_cos_series_exact(cos_coeffs));

    const MinPoint sampled = poly_min_sampled(r.boundary_poly, grid);
    const MinPoint critical = poly_min_critical(r.boundary_poly, -1.0, 1.0);
    const MinPoint best = critical.value <= sampled.value ? critical : sampled;
    r.boundary_min = best.value;
    r.boundary_argmin_x = best.x;

    const double scale = std::max(1.0, r.boundary_poly.max_abs_coeff());
    r.pass = r.mu_roots_inside && r.leading_positive && r.no_common_divisor &&
             r.boundary_min >= -1e-12 * scale;
    return r;
}

std::optional<StabilityWitness> necessary_condition_witness(int q, double ell) {
    if (ell < 0) throw std::invalid_argument("necessary_condition_witness: ell must be >= 0");
    const BdfScheme s = make_scheme(q);
    const Polynomial h = Polynomial(s.alpha_tilde_d) + ell * Polynomial(s.alpha_hat_d);

    constexpr double lo = -4.0, hi = -1.0 - 1e-6;
    constexpr int n_scan = 10000;
    std::vector<double> zs(n_scan), hs(n_scan);
    for (int k = 0; k < n_scan; ++k) {
        zs[k] = lo + (hi - lo) * k / (n_scan - 1);
        hs[k] = h(zs[k]);
    }

    // x(zeta) = -h(zeta)/zeta^{2q} > 0 exactly where h < 0
    const auto x_of = [&](double z) { return -h(z) / std::pow(z, 2 * q); };
    int best = -1;
    double x_max = 0.0;
    for (int k = 0; k < n_scan; ++k) {
        if (hs[k] >= 0.0) continue;
        const double x = x_of(zs[k]);
        if (x > x_max) { x_max = x; best = k; }
    }
    if (best < 0) return std::nullopt;

    // onset of the unstable root interval, bisection-refined
    double onset = lo;
    for (int k = best; k > 0; --k)
        if (hs[k - 1] >= 0.0 && hs[k] < 0.0) {
            double za = zs[k - 1], zb = zs[k];
            for (int it = 0; it < 80; ++it) {
                const double zm = 0.5 * (za + zb);
                (h(zm) >= 0.0 ? za : zb) = zm;
            }
            onset = 0.5 * (za + zb);
            break;
        }

    // pick x_star at half the strongest instability and bisect kappa(., x_star)
    // between the onset (kappa > 0) and the maximizer (kappa < 0)
    StabilityWitness w;
    w.x_star = 0.5 * x_max;
    w.zeta_onset = onset;
    const auto kappa = [&](double z) { return h(z) + w.x_star * std::pow(z, 2 * q); };
    double za = onset, zb = zs[best];
    // kappa -> +infinity for zeta -> -infinity, so a positive endpoint always exists
    for (int guard = 0; kappa(za) <= 0.0 && guard < 60; ++guard) za *= 2.0;
    for (int it = 0; it < 200; ++it) {
        const double zm = 0.5 * (za + zb);
        (kappa(zm) > 0.0 ? za : zb) = zm;
    }
    w.zeta_star = 0.5 * (za + zb);
    w.residual = std::abs(kappa(w.zeta_star));
    return w;
}

RecursionResult run_scalar_recursion(int q, double ell, double x, int n_steps,
                                     std::span<const double> seed_values) {
    if (n_steps < 10 * q)
        throw std::invalid_argument("run_scalar_recursion: n_steps below 10q");
    const BdfScheme s = make_scheme(q);
    const int depth = 2 * q;
    if (static_cast<int>(seed_values.size()) != depth)
        throw std::invalid_argument("run_scalar_recursion: need 2q seed values");

    std::vector<double> coeff(depth + 1);
    for (int i = 0; i <= depth; ++i) {
        coeff[i] = s.alpha_tilde_d[i];
        if (i < depth) coeff[i] += ell * s.alpha_hat_d[i];
    }

    std::vector<double> v(seed_values.begin(), seed_values.end());
    double seed_scale = 0.0;
    for (double sv : v) seed_scale = std::max(seed_scale, std::abs(sv));

    RecursionResult r;
    if (seed_scale == 0.0) return r; // zero seeds stay identically zero

    double max_abs = seed_scale;
    for (int n = 0; n < n_steps; ++n) {
        double acc = 0.0;
        const std::size_t base = v.size() - depth;
        for (int i = 0; i < depth; ++i) acc += coeff[i] * v[base + i];
        const double vn = -acc / (coeff[depth] + x);
        if (!std::isfinite(vn) || std::abs(vn) > 1e250) {
            r.diverged = true;
            max_abs = 1e250;
            break;
        }
        v.push_back(vn);
        max_abs = std::max(max_abs, std::abs(vn));
    }
    r.growth = max_abs / seed_scale;
    if (r.growth > 1e12) r.diverged = true;
    return r;
}

ToeplitzResult toeplitz_positivity(const Multiplier& m, const Rational& mu0, int n) {
    if (n < 2 * m.q) throw std::invalid_argument("toeplitz_positivity: n below 2q");
    ToeplitzResult r;

    std::vector<Rational> band(m.q + 1, Rational(0)); // band[j] = -mu_j
    band[0] = -mu0;
    for (int j = 1; j <= m.q; ++j) band[j] = -m.mu[j - 1];

    // generating function of (L + L^T)/2: g(s) = -mu_0 - sum_j mu_j cos(j s)
    r.cos_coeffs.resize(m.q + 1);
    for (int j = 0; j <= m.q; ++j) r.cos_coeffs[j] = band[j].value();
    const Polynomial g = rp_to_poly(reduce_cos_series_exact(band));
    const MinPoint gmin = poly_min_critical(g, -1.0, 1.0);
    const Polynomial neg = -1.0 * g;
    const MinPoint gmax = poly_min_critical(neg, -1.0, 1.0);
    r.generating_min = gmin.value;
    r.generating_max = -gmax.value;

    DenseMatrix ls(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= m.q; ++j)
            if (i - j >= 0) {
                ls(i, i - j) += 0.5 * band[j].value();
                ls(i - j, i) += 0.5 * band[j].value();
            }
    const EigResult eig = sym_eig(ls);
    r.symmetric_min_eig = eig.values.front();
    r.symmetric_max_eig = eig.values.back();
    r.pass = r.generating_min > 0.0 && r.symmetric_min_eig >= r.generating_min - 1e-10;
    return r;
}

StabilityReport run_stability_report(int q, const Multiplier& mult, int m_count, int grid) {
    StabilityReport rep;
    rep.q = q;
    rep.multiplier = mult.values();

    const double margin = q == 6 ? 0.09 : 0.0;
    rep.positivity_margin = margin;
    rep.positivity = check_positivity_property(mult, margin);

    const BdfScheme s = make_scheme(q);
    const std::int64_t denom = (1ll << q) - 1;
    rep.a_condition_all_pass = true;
    for (int k = 0; k < m_count; ++k) {
        const Rational m = m_count == 1 ? Rational(0)
                                        : Rational(k, denom * (m_count - 1));
        AConditionResult res = check_A_condition(s, m, mult, grid);
        rep.a_condition_all_pass = rep.a_condition_all_pass && res.pass;
        rep.a_condition.emplace_back(m.value(), std::move(res));
    }

    const double threshold = 1.0 / static_cast<double>(denom);
    rep.witness_none_at_threshold = !necessary_condition_witness(q, threshold).has_value();
    rep.witness_above = necessary_condition_witness(q, 1.5 * threshold);
    if (rep.witness_above) {
        std::vector<double> seeds(2 * q, 1.0);
        rep.witness_growth =
            run_scalar_recursion(q, 1.5 * threshold, rep.witness_above->x_star, 500, seeds).growth;
    }

    const Rational mu0 = q == 6 ? Rational(-91, 100) : Rational(-99, 100);
    rep.toeplitz = toeplitz_positivity(mult, mu0, 24);

    rep.pass = rep.positivity.pass && rep.a_condition_all_pass &&
               rep.witness_none_at_threshold && rep.witness_above.has_value() &&
               rep.toeplitz.pass;
    return rep;
}

} // namespace epbdf
