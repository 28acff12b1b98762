#ifndef EPBDF_SYSTEMS_HPP
#define EPBDF_SYSTEMS_HPP

#include <functional>
#include <memory>

#include "epbdf/linalg.hpp"

namespace epbdf {

/// Assembled discrete elliptic-parabolic system
///   A u - D^T p = f,   D u_t + C p_t + B p = g,
/// with A, B, C symmetric positive definite and D the coupling map.
/// Unknowns are coefficient vectors; f and g live in the dual pairing,
/// so D^T is exactly the adjoint of D. Everything is immutable after
/// assembly, including the factorization of A and the Schur complement.
struct EllipticParabolicSystem {
    int dim_u = 0, dim_p = 0;

    DenseMatrix A, B, C, D; // D: dim_p x dim_u
    Factorization A_lu;
    DenseMatrix schur; // M = D A^{-1} D^T

    // Gram matrices of the discrete norms (identity blocks for the matrix ODE)
    DenseMatrix mass_p; // L2 for p
    DenseMatrix h1_p;   // H1 for p
    DenseMatrix h1_u;   // H1 for u (blockwise)

    // coercivity / continuity data
    double c_a = 0, C_a = 0, c_b = 0, C_b = 0, c_c = 0, C_c = 0, C_d = 0;
    double omega = 0;         // coupling strength (3-form value used by experiments)
    double omega_numeric = 0; // C_d^2/(c_a c_c) from the estimated constants

    // interior node coordinates for nodal evaluation (poroelastic instance only)
    std::vector<double> xs, ys;

    Vector apply_A(std::span<const double> v) const { return A.apply(v); }
    Vector solve_A(std::span<const double> rhs) const { return A_lu.solve(rhs); }
    Vector apply_B(std::span<const double> v) const { return B.apply(v); }
    Vector apply_C(std::span<const double> v) const { return C.apply(v); }
    Vector apply_D(std::span<const double> v) const { return D.apply(v); }
    Vector apply_D_star(std::span<const double> v) const { return D.apply_transposed(v); }
    Vector apply_M(std::span<const double> v) const { return schur.apply(v); }

    /// Factorization of c_coeff*C + b_coeff*B (+ m_coeff*M), the shifted
    /// parabolic operator behind every per-step pressure solve. Runs factor it
    /// once and reuse it, since the step size stays constant.
    Factorization factor_parabolic(double c_coeff, double b_coeff, double m_coeff = 0.0) const;

    double norm_p_l2(std::span<const double> v) const;
    double norm_p_h1(std::span<const double> v) const;
    double norm_u_h1(std::span<const double> v) const;
    double norm_u_energy(std::span<const double> v) const;
    double norm_p_c(std::span<const double> v) const; // c-norm sqrt(v^T C v)

    /// Interior nodal vector of a scalar field (poroelastic instance).
    Vector nodal_p(const std::function<double(double, double)>& f) const;
    /// Interior nodal vector of a displacement field, components stacked.
    Vector nodal_u(const std::function<double(double, double)>& fx,
                   const std::function<double(double, double)>& fy) const;
};

using SystemPtr = std::shared_ptr<const EllipticParabolicSystem>;

/// 3-dof/1-dof test system: A = tridiag(-1,2,-1)/(2-sqrt(2)) (smallest eigenvalue 1),
/// coupling row sqrt(omega) * (2,1,2)/sqrt(13(2-sqrt(2))), B = C = 1. Then
/// D A^{-1} D^T = 1 and M = omega * C exactly.
SystemPtr make_matrix_ode_system(double omega);

/// Chebyshev-Gauss-Lobatto collocation of linear poroelasticity on (-1,1)^2 with
/// homogeneous Dirichlet conditions on both fields; N is the polynomial degree per
/// direction. Operators are assembled from the quadrature forms so A, B, C come out
/// exactly symmetric. The coupling strength is eta^2 * biot_M / (mu + lambda).
SystemPtr make_poroelastic_system(int n, double eta, double mu, double lambda, double biot_m,
                                  double kappa);

double coupling_strength(const EllipticParabolicSystem& sys);

/// Exact fields with their discrete forcing: f(t) = A u*(t) - D^T p*(t) and
/// g(t) = D u*_t(t) + C p*_t(t) + B p*(t), so the nodal fields solve the
/// semi-discrete system exactly and measured errors are purely temporal.
struct ManufacturedSolution {
    std::function<Vector(double)> u, p;     // exact nodal values
    std::function<Vector(double)> u_t, p_t; // exact time derivatives
    std::function<Vector(double)> f, g;     // induced forcing
};

ManufacturedSolution manufacture(SystemPtr sys, std::function<Vector(double)> u_star,
                                 std::function<Vector(double)> p_star,
                                 std::function<Vector(double)> u_star_t,
                                 std::function<Vector(double)> p_star_t);

/// u(t) = (sin t, cos t, e^t), p(t) = (2t)^7 + 1 on the matrix ODE system.
ManufacturedSolution matrix_ode_manufactured(SystemPtr sys);

/// u = (t^7+1) ((cos(pi x)+1) sin(pi y), sin(pi x)(cos(pi y)+1)),
/// p = (t^7+1) sin(pi x) sin(pi y) on the poroelastic system.
ManufacturedSolution poroelastic_manufactured(SystemPtr sys);

/// All-zero fields and forcing (free-evolution runs).
ManufacturedSolution zero_manufactured(SystemPtr sys);

} // namespace epbdf

#endif
