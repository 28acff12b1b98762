#include "epbdf/systems.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace epbdf {

namespace {

double quad_norm(const DenseMatrix& g, std::span<const double> v) {
    return std::sqrt(std::max(0.0, dot(g.apply(v), v)));
}

} // namespace

double EllipticParabolicSystem::norm_p_l2(std::span<const double> v) const {
    return quad_norm(mass_p, v);
}
double EllipticParabolicSystem::norm_p_h1(std::span<const double> v) const {
    return quad_norm(h1_p, v);
}
double EllipticParabolicSystem::norm_u_h1(std::span<const double> v) const {
    return quad_norm(h1_u, v);
}
double EllipticParabolicSystem::norm_u_energy(std::span<const double> v) const {
    return quad_norm(A, v);
}
double EllipticParabolicSystem::norm_p_c(std::span<const double> v) const {
    return quad_norm(C, v);
}

Factorization EllipticParabolicSystem::factor_parabolic(double c_coeff, double b_coeff,
                                                        double m_coeff) const {
    DenseMatrix op = c_coeff * C + b_coeff * B;
    if (m_coeff != 0.0) op = op + m_coeff * schur;
    return Factorization(op);
}

Vector EllipticParabolicSystem::nodal_p(const std::function<double(double, double)>& f) const {
    if (xs.empty()) throw std::runtime_error("nodal_p: system has no spatial grid");
    Vector v(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) v[i] = f(xs[i], ys[i]);
    return v;
}

Vector EllipticParabolicSystem::nodal_u(const std::function<double(double, double)>& fx,
                                        const std::function<double(double, double)>& fy) const {
    if (xs.empty()) throw std::runtime_error("nodal_u: system has no spatial grid");
    Vector v(2 * xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        v[i] = fx(xs[i], ys[i]);
        v[xs.size() + i] = fy(xs[i], ys[i]);
    }
    return v;
}

SystemPtr make_matrix_ode_system(double omega) {
    if (omega < 0) throw std::invalid_argument("make_matrix_ode_system: omega must be >= 0");
    auto sys = std::make_shared<EllipticParabolicSystem>();
    sys->dim_u = 3;
    sys->dim_p = 1;

    const double s2 = std::sqrt(2.0);
    sys->A = DenseMatrix(3, 3);
    const double pref = 1.0 / (2.0 - s2);
    const double tri[3][3] = {{2, -1, 0}, {-1, 2, -1}, {0, -1, 2}};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) sys->A(i, j) = pref * tri[i][j];

    sys->D = DenseMatrix(1, 3);
    const double dpref = std::sqrt(omega) / std::sqrt(13.0 * (2.0 - s2));
    sys->D(0, 0) = 2.0 * dpref;
    sys->D(0, 1) = 1.0 * dpref;
    sys->D(0, 2) = 2.0 * dpref;

    sys->B = DenseMatrix(1, 1);
    sys->B(0, 0) = 1.0;
    sys->C = DenseMatrix(1, 1);
    sys->C(0, 0) = 1.0;

    sys->A_lu = Factorization(sys->A);
    sys->schur = sys->D * sys->A_lu.solve_matrix(sys->D.transposed());

    sys->mass_p = DenseMatrix::identity(1);
    sys->h1_p = DenseMatrix::identity(1);
    sys->h1_u = DenseMatrix::identity(3);

    sys->c_a = 1.0; // prefactor chosen so the smallest eigenvalue of A is 1
    sys->C_a = pref * (2.0 + s2);
    sys->c_b = sys->C_b = 1.0;
    sys->c_c = sys->C_c = 1.0;
    sys->C_d = std::sqrt(omega);
    sys->omega = omega;
    sys->omega_numeric = omega;
    return sys;
}

SystemPtr make_poroelastic_system(int n, double eta, double mu, double lambda, double biot_m,
                                  double kappa) {
    if (n < 8) throw std::invalid_argument("make_poroelastic_system: need N >= 8");
    if (mu <= 0 || lambda <= 0 || biot_m <= 0 || kappa <= 0 || eta <= 0)
        throw std::invalid_argument("make_poroelastic_system: physical parameters must be > 0");

    const SpectralGrid grid = chebyshev_grid(n);
    const int np = n + 1;     // nodes per direction
    const int ni1 = n - 1;    // interior per direction
    const int ni = ni1 * ni1; // interior nodes per scalar field

    auto sys = std::make_shared<EllipticParabolicSystem>();
    sys->dim_p = ni;
    sys->dim_u = 2 * ni;

    // node ordering: full index = ix*np + iy; interior index = (ix-1)*ni1 + (iy-1)
    sys->xs.resize(ni);
    sys->ys.resize(ni);
    for (int ix = 1; ix < n; ++ix)
        for (int iy = 1; iy < n; ++iy) {
            sys->xs[(ix - 1) * ni1 + (iy - 1)] = grid.nodes[ix];
            sys->ys[(ix - 1) * ni1 + (iy - 1)] = grid.nodes[iy];
        }

    // extension by zero to the full grid and tensor quadrature weights
    DenseMatrix ext(np * np, ni);
    for (int ix = 1; ix < n; ++ix)
        for (int iy = 1; iy < n; ++iy) ext(ix * np + iy, (ix - 1) * ni1 + (iy - 1)) = 1.0;
    Vector w2(np * np);
    for (int ix = 0; ix < np; ++ix)
        for (int iy = 0; iy < np; ++iy) w2[ix * np + iy] = grid.weights[ix] * grid.weights[iy];

    const DenseMatrix eye = DenseMatrix::identity(np);
    const DenseMatrix px = kron(grid.d1, eye) * ext; // d/dx of interior fields, all nodes
    const DenseMatrix py = kron(eye, grid.d1) * ext;

    auto weighted_gram = [&](const DenseMatrix& l, const DenseMatrix& r) {
        // l^T diag(w2) r
        DenseMatrix wr = r;
        for (int i = 0; i < wr.rows(); ++i)
            for (int j = 0; j < wr.cols(); ++j) wr(i, j) *= w2[i];
        return l.transposed() * wr;
    };

    const DenseMatrix kxx = weighted_gram(px, px);
    const DenseMatrix kyy = weighted_gram(py, py);
    const DenseMatrix cyx = weighted_gram(py, px); // <dx u, dy v>_w
    const DenseMatrix cxy = cyx.transposed();

    // a(u,v) = int 2 mu eps(u):eps(v) + lambda (div u)(div v)
    sys->A = DenseMatrix(2 * ni, 2 * ni);
    for (int i = 0; i < ni; ++i)
        for (int j = 0; j < ni; ++j) {
            sys->A(i, j) = (2 * mu + lambda) * kxx(i, j) + mu * kyy(i, j);
            sys->A(ni + i, ni + j) = (2 * mu + lambda) * kyy(i, j) + mu * kxx(i, j);
            const double a12 = mu * cyx(i, j) + lambda * cxy(i, j);
            sys->A(i, ni + j) = a12;
            sys->A(ni + j, i) = a12;
        }

    sys->B = kappa * (kxx + kyy);

    // interior tensor weights give the diagonal mass matrix
    sys->mass_p = DenseMatrix(ni, ni);
    for (int ix = 1; ix < n; ++ix)
        for (int iy = 1; iy < n; ++iy) {
            const int k = (ix - 1) * ni1 + (iy - 1);
            sys->mass_p(k, k) = w2[ix * np + iy];
        }
    sys->C = (1.0 / biot_m) * sys->mass_p;

    // d(u,w) = eta int (div u) w
    const DenseMatrix extw = [&] {
        DenseMatrix t = ext;
        for (int i = 0; i < t.rows(); ++i)
            for (int j = 0; j < t.cols(); ++j) t(i, j) *= w2[i];
        return t.transposed();
    }();
    sys->D = DenseMatrix(ni, 2 * ni);
    const DenseMatrix dx_part = extw * px;
    const DenseMatrix dy_part = extw * py;
    for (int i = 0; i < ni; ++i)
        for (int j = 0; j < ni; ++j) {
            sys->D(i, j) = eta * dx_part(i, j);
            sys->D(i, ni + j) = eta * dy_part(i, j);
        }

    sys->h1_p = sys->mass_p + kxx + kyy;
    sys->h1_u = DenseMatrix(2 * ni, 2 * ni);
    for (int i = 0; i < ni; ++i)
        for (int j = 0; j < ni; ++j) {
            sys->h1_u(i, j) = sys->h1_p(i, j);
            sys->h1_u(ni + i, ni + j) = sys->h1_p(i, j);
        }

    sys->A_lu = Factorization(sys->A);
    sys->schur = sys->D * sys->A_lu.solve_matrix(sys->D.transposed());

    // constants: c_c exact from the diagonal scaling, the rest from extreme
    // eigenvalues of the pencils against the H1 Gram matrices
    sys->c_c = 1.0 / biot_m;
    sys->C_c = 1.0 / biot_m;
    sys->c_a = pencil_eig_smallest(sys->A, sys->h1_u);
    sys->C_a = pencil_eig_largest(sys->A, sys->h1_u);
    sys->c_b = pencil_eig_smallest(sys->B, sys->h1_p);
    sys->C_b = pencil_eig_largest(sys->B, sys->h1_p);
    {
        // C_d^2 = sup d(u,w)^2 / (|u|_V^2 |w|_HW^2) = lambda_max(h1_u^{-1} D^T mass_p^{-1} D)
        DenseMatrix dtmd(2 * ni, 2 * ni);
        DenseMatrix md = sys->D;
        for (int i = 0; i < ni; ++i) {
            const double inv = 1.0 / sys->mass_p(i, i);
            for (int j = 0; j < 2 * ni; ++j) md(i, j) *= inv;
        }
        dtmd = sys->D.transposed() * md;
        sys->C_d = std::sqrt(std::max(0.0, pencil_eig_largest(dtmd, sys->h1_u)));
    }

    sys->omega = eta * eta * biot_m / (mu + lambda);
    sys->omega_numeric = sys->C_d * sys->C_d / (sys->c_a * sys->c_c);
    return sys;
}

double coupling_strength(const EllipticParabolicSystem& sys) { return sys.omega; }

ManufacturedSolution manufacture(SystemPtr sys, std::function<Vector(double)> u_star,
                                 std::function<Vector(double)> p_star,
                                 std::function<Vector(double)> u_star_t,
                                 std::function<Vector(double)> p_star_t) {
    ManufacturedSolution m;
    m.u = u_star;
    m.p = p_star;
    m.u_t = u_star_t;
    m.p_t = p_star_t;
    m.f = [sys, u_star, p_star](double t) {
        Vector f = sys->apply_A(u_star(t));
        axpy(-1.0, sys->apply_D_star(p_star(t)), f);
        return f;
    };
    m.g = [sys, u_star_t, p_star, p_star_t](double t) {
        Vector g = sys->apply_D(u_star_t(t));
        axpy(1.0, sys->apply_C(p_star_t(t)), g);
        axpy(1.0, sys->apply_B(p_star(t)), g);
        return g;
    };
    return m;
}

ManufacturedSolution matrix_ode_manufactured(SystemPtr sys) {
    auto u = [](double t) { return Vector{std::sin(t), std::cos(t), std::exp(t)}; };
    auto ut = [](double t) { return Vector{std::cos(t), -std::sin(t), std::exp(t)}; };
    auto p = [](double t) { return Vector{std::pow(2.0 * t, 7) + 1.0}; };
    auto pt = [](double t) { return Vector{14.0 * std::pow(2.0 * t, 6)}; };
    return manufacture(sys, u, p, ut, pt);
}

ManufacturedSolution poroelastic_manufactured(SystemPtr sys) {
    constexpr double pi = std::numbers::pi;
    const Vector u0 = sys->nodal_u(
        [&](double x, double y) { return (std::cos(pi * x) + 1.0) * std::sin(pi * y); },
        [&](double x, double y) { return std::sin(pi * x) * (std::cos(pi * y) + 1.0); });
    const Vector p0 =
        sys->nodal_p([&](double x, double y) { return std::sin(pi * x) * std::sin(pi * y); });

    auto scaled = [](const Vector& base, double s) {
        Vector v = base;
        for (double& x : v) x *= s;
        return v;
    };
    auto theta = [](double t) { return std::pow(t, 7) + 1.0; };
    auto theta_t = [](double t) { return 7.0 * std::pow(t, 6); };

    auto u = [=](double t) { return scaled(u0, theta(t)); };
    auto ut = [=](double t) { return scaled(u0, theta_t(t)); };
    auto p = [=](double t) { return scaled(p0, theta(t)); };
    auto pt = [=](double t) { return scaled(p0, theta_t(t)); };
    return manufacture(sys, u, p, ut, pt);
}

ManufacturedSolution zero_manufactured(SystemPtr sys) {
    const int du = sys->dim_u, dp = sys->dim_p;
    ManufacturedSolution m;
    m.u = [du](double) { return Vector(du, 0.0); };
    m.u_t = [du](double) { return Vector(du, 0.0); };
    m.p = [dp](double) { return Vector(dp, 0.0); };
    m.p_t = [dp](double) { return Vector(dp, 0.0); };
    m.f = [du](double) { return Vector(du, 0.0); };
    m.g = [dp](double) { return Vector(dp, 0.0); };
    return m;
}

} // namespace epbdf
