#ifndef EPBDF_STABILITY_HPP
#define EPBDF_STABILITY_HPP

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "epbdf/bdf.hpp"

namespace epbdf {

/// Multiplier tuple (mu_1..mu_q) for a q-step method, kept in exact rationals
/// so that the trigonometric reductions below stay exact.
struct Multiplier {
    int q = 0;
    std::vector<Rational> mu;

    std::vector<double> values() const;
    /// z^deg - mu_1 z^{deg-1} - ... - mu_q z^{deg-q}; deg defaults to q,
    /// the A-condition pairing against alpha_tilde + m*alpha_hat uses deg = 2q.
    Polynomial mu_poly(int deg = -1) const;
    RationalPoly mu_poly_exact(int deg = -1) const;

    static Multiplier zero(int q);
    /// The published tuples: q=4 (1/2,0,0,0); q=5 (1,-1/4,0,0,0); q=6 (1,-9/10,3/10,0,0,0).
    static Multiplier published(int q);
};

/// Polynomial pair (in x = cos phi) reducing a trigonometric expression
/// sum a_l cos(l phi) + i sin(phi) sum b_l U_{l-1}: evaluating
/// cos_part(cos phi) + i sin_part(cos phi) sin phi reproduces the source.
struct TrigForm {
    Polynomial cos_part;
    Polynomial sin_part;
};

/// Exact Chebyshev reduction: cos coefficients a_0..a_L, sin coefficients b_1..b_L.
TrigForm trig_to_chebyshev(std::span<const double> cos_coeffs, std::span<const double> sin_coeffs);
RationalPoly reduce_cos_series_exact(std::span<const Rational> cos_coeffs);

struct PositivityResult {
    double min_value = 0.0; // global min of 1 - sum mu_j T_j(x) on [-1,1]
    double argmin_x = 0.0;
    double margin = 0.0;
    bool pass = false;
};

/// Positivity property: 1 - mu_1 cos(phi) - ... - mu_q cos(q phi) >= margin for all phi,
/// checked through the exact polynomial reduction and its critical points.
PositivityResult check_positivity_property(const Multiplier& m, double margin);

struct RootDiskResult {
    double max_modulus = 0.0;
    bool pass = false;
    std::vector<std::complex<double>> roots;
};

RootDiskResult roots_in_unit_disk(const Polynomial& p, double tol = 1e-8);

struct AConditionResult {
    bool mu_roots_inside = false;
    bool leading_positive = false;
    bool no_common_divisor = false;
    double boundary_min = 0.0; // min over the unit circle of Re[alpha_check(e^{i phi}) mu(e^{-i phi})]
    double boundary_argmin_x = 0.0;
    double resultant = 0.0;
    bool pass = false;
    Polynomial boundary_poly; // exact reduction, polynomial in x = cos(phi)
};

/// A-stability of the pair (alpha_tilde + m*alpha_hat, mu) via boundary positivity:
/// mu roots strictly inside the unit disk, positive leading ratio, no common divisor,
/// and Re[...] >= 0 on the unit circle (dense sampling plus critical-point refinement).
AConditionResult check_A_condition(const BdfScheme& s, const Rational& m, const Multiplier& mult,
                                   int grid = 100000);

struct StabilityWitness {
    double zeta_star = 0.0;  // real characteristic root < -1
    double x_star = 0.0;     // tau*lambda > 0 at which the root condition fails
    double residual = 0.0;   // |kappa(zeta_star, x_star)|
    double zeta_onset = 0.0; // boundary of the unstable root interval
};

/// Scan of kappa(zeta, x) = alpha_tilde(zeta) + ell*alpha_hat(zeta) + x*zeta^{2q}
/// over zeta in [-4, -1-1e-6]: returns a root pair with x_star > 0 when the
/// coupling ratio ell exceeds 1/(2^q - 1), none otherwise.
std::optional<StabilityWitness> necessary_condition_witness(int q, double ell);

struct RecursionResult {
    double growth = 0.0; // max_n |v^n| / max seed
    bool diverged = false;
};

/// Iterates sum_i (alpha_tilde_i + ell*alpha_hat_i) v^{n-2q+i} + x v^n = 0
/// from 2q seed values; overflow is clamped and reported as divergence.
RecursionResult run_scalar_recursion(int q, double ell, double x, int n_steps,
                                     std::span<const double> seed_values);

struct ToeplitzResult {
    double generating_min = 0.0;
    double generating_max = 0.0;
    double symmetric_min_eig = 0.0;
    double symmetric_max_eig = 0.0;
    bool pass = false;
    std::vector<double> cos_coeffs; // generating function g = c_0 + sum c_j cos(j s)
};

/// Banded lower-triangular Toeplitz matrix L with l_{i,i-j} = -mu_j (mu_0 given);
/// checks the Grenander-Szego sandwich for the symmetric part (L + L^T)/2.
ToeplitzResult toeplitz_positivity(const Multiplier& m, const Rational& mu0, int n);

/// Aggregated verification report for one scheme order, used by the CLI.
struct StabilityReport {
    int q = 0;
    std::vector<double> multiplier;
    PositivityResult positivity;
    double positivity_margin = 0.0;
    std::vector<std::pair<double, AConditionResult>> a_condition; // per m
    bool a_condition_all_pass = false;
    std::optional<StabilityWitness> witness_above;  // at 1.5x threshold
    bool witness_none_at_threshold = false;
    double witness_growth = 0.0;
    ToeplitzResult toeplitz;
    bool pass = false;
};

StabilityReport run_stability_report(int q, const Multiplier& mult, int m_count, int grid);

} // namespace epbdf

#endif
