#include <doctest.h>

#include <cmath>

#include "epbdf/steppers.hpp"

using namespace epbdf;

namespace {

// scalar decoupled system: A = C = B = 1, D = 0; the parabolic part is p' + p = g
SystemPtr scalar_system() {
    auto sys = std::make_shared<EllipticParabolicSystem>();
    sys->dim_u = 1;
    sys->dim_p = 1;
    sys->A = DenseMatrix::identity(1);
    sys->B = DenseMatrix::identity(1);
    sys->C = DenseMatrix::identity(1);
    sys->D = DenseMatrix(1, 1);
    sys->A_lu = Factorization(sys->A);
    sys->schur = DenseMatrix(1, 1);
    sys->mass_p = DenseMatrix::identity(1);
    sys->h1_p = DenseMatrix::identity(1);
    sys->h1_u = DenseMatrix::identity(1);
    sys->c_a = sys->c_c = sys->c_b = 1.0;
    sys->omega = 0.0;
    return sys;
}

ManufacturedSolution polynomial_manufactured(const SystemPtr& sys, int degree) {
    // p*(t) = phi * (t^d + 1), u* solving the elliptic identity with f = 0
    const Vector phi{1.0};
    auto p = [=](double t) { return Vector{std::pow(t, degree) + 1.0}; };
    auto pt = [=](double t) { return Vector{degree * std::pow(t, degree - 1)}; };
    auto u = [=, s = sys](double t) {
        Vector rhs = s->apply_D_star(p(t));
        return s->solve_A(rhs);
    };
    auto ut = [=, s = sys](double t) {
        Vector rhs = s->apply_D_star(pt(t));
        return s->solve_A(rhs);
    };
    return manufacture(sys, u, p, ut, pt);
}

double rel_diff(const Vector& a, const Vector& b) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num = std::max(num, std::abs(a[i] - b[i]));
        den = std::max(den, std::abs(b[i]));
    }
    return num / std::max(den, 1e-300);
}

} // namespace

TEST_CASE("starting values satisfy the elliptic consistency equation") {
    const SystemPtr sys = make_matrix_ode_system(0.015);
    const auto ms = matrix_ode_manufactured(sys);
    for (int q : {1, 6}) {
        const BdfScheme s = make_scheme(q);
        const StartingValues sv = seed_starting_values(*sys, ms, s, 1.0 / 50);
        REQUIRE(static_cast<int>(sv.p.size()) == q);
        for (int i = 0; i < q; ++i) {
            Vector r = sys->apply_A(sv.u[i]);
            axpy(-1.0, sys->apply_D_star(sv.p[i]), r);
            axpy(-1.0, ms.f(i / 50.0), r);
            CHECK(norm2(r) <= 1e-12 * std::max(1.0, norm2(ms.f(i / 50.0))));
        }
    }
}

TEST_CASE("zero manufactured solution seeds zero starting values") {
    const SystemPtr sys = make_matrix_ode_system(0.1);
    const auto ms = zero_manufactured(sys);
    const StartingValues sv = seed_starting_values(*sys, ms, make_scheme(3), 0.1);
    for (const auto& v : sv.p) CHECK(norm2(v) == 0.0);
    for (const auto& v : sv.u) CHECK(norm2(v) == 0.0);
}

TEST_CASE("backward Euler on p' + p = 0 gives (1+tau)^{-n}") {
    const SystemPtr sys = scalar_system();
    ManufacturedSolution ms = zero_manufactured(sys);
    StartingValues sv;
    sv.p = {Vector{1.0}};
    sv.u = {Vector{0.0}};

    const double tau = 0.125;
    const int n_steps = 16;
    StepperRun run(sys, ms, make_scheme(1), StepMode::implicit_coupled, tau, n_steps, sv);
    const IntegrationResult res = run.integrate(false, true);
    REQUIRE_FALSE(res.diverged);
    REQUIRE(static_cast<int>(res.p_states.size()) == n_steps);
    for (int n = 1; n <= n_steps; ++n)
        CHECK(res.p_states[n - 1][0] ==
              doctest::Approx(std::pow(1.0 + tau, -n)).epsilon(1e-13));
}

TEST_CASE("coupled and reduced implicit trajectories agree to 1e-12") {
    const SystemPtr sys = make_matrix_ode_system(0.015);
    const auto ms = matrix_ode_manufactured(sys);
    const double tau = 1.0 / 50;
    StepperRun coupled(sys, ms, make_scheme(6), StepMode::implicit_coupled, tau, 50);
    StepperRun reduced(sys, ms, make_scheme(6), StepMode::implicit_reduced, tau, 50);
    const auto rc = coupled.integrate(false, true);
    const auto rr = reduced.integrate(false, true);
    REQUIRE(rc.p_states.size() == rr.p_states.size());
    for (std::size_t n = 0; n < rc.p_states.size(); ++n) {
        CHECK(rel_diff(rc.p_states[n], rr.p_states[n]) < 1e-12);
        CHECK(rel_diff(rc.u_states[n], rr.u_states[n]) < 1e-12);
    }
}

TEST_CASE("scheme equivalence on the matrix ODE for all orders") {
    Rng rng(314);
    for (int q = 1; q <= 6; ++q) {
        const double threshold = 1.0 / ((1 << q) - 1);
        for (int trial = 0; trial < 3; ++trial) {
            const double omega = threshold * rng.uniform();
            const SystemPtr sys = make_matrix_ode_system(omega);
            const auto ms = matrix_ode_manufactured(sys);
            const double tau = 0.01;
            const int n_steps = 100;

            StepperRun a(sys, ms, make_scheme(q), StepMode::implicit_coupled, tau, n_steps);
            StepperRun b(sys, ms, make_scheme(q), StepMode::implicit_reduced, tau, n_steps);
            const auto ra = a.integrate(false, true);
            const auto rb = b.integrate(false, true);
            for (std::size_t n = 0; n < ra.p_states.size(); ++n)
                CHECK(rel_diff(ra.p_states[n], rb.p_states[n]) < 1e-11);

            StepperRun c(sys, ms, make_scheme(q), StepMode::imex, tau, n_steps);
            StepperRun d(sys, ms, make_scheme(q), StepMode::imex_reduced, tau, n_steps);
            const auto rc = c.integrate(false, true);
            const auto rd = d.integrate(false, true);
            for (std::size_t n = 0; n < rc.p_states.size(); ++n) {
                CHECK(rel_diff(rc.p_states[n], rd.p_states[n]) < 1e-11);
                CHECK(rel_diff(rc.u_states[n], rd.u_states[n]) < 1e-11);
            }
        }
    }
}

TEST_CASE("imex with zero coupling matches the implicit scheme exactly") {
    const SystemPtr sys = make_matrix_ode_system(0.0);
    const auto ms = matrix_ode_manufactured(sys);
    StepperRun a(sys, ms, make_scheme(4), StepMode::implicit_coupled, 0.02, 50);
    StepperRun b(sys, ms, make_scheme(4), StepMode::imex, 0.02, 50);
    const auto ra = a.integrate(false, true);
    const auto rb = b.integrate(false, true);
    for (std::size_t n = 0; n < ra.p_states.size(); ++n)
        CHECK(rel_diff(ra.p_states[n], rb.p_states[n]) < 1e-12);
}

TEST_CASE("polynomial exactness at the consistency order") {
    // the implicit scheme reproduces time-polynomial data of degree q to
    // roundoff; the decoupled scheme is exact one degree lower (its
    // extrapolation reproduces degree q-1) and order-q accurate at degree q
    const SystemPtr sys = make_matrix_ode_system(0.02);
    for (int q = 1; q <= 6; ++q) {
        const auto ms = polynomial_manufactured(sys, q);
        const double tau = 0.1;
        const int n_steps = 10;

        StepperRun imp(sys, ms, make_scheme(q), StepMode::implicit_coupled, tau, n_steps);
        const auto ri = imp.integrate();
        CHECK(ri.err_p_l2 < 1e-11);
        CHECK(ri.err_u_h1 < 1e-11);

        if (q >= 2) {
            const auto ms_low = polynomial_manufactured(sys, q - 1);
            StepperRun imex_low(sys, ms_low, make_scheme(q), StepMode::imex, tau, n_steps);
            const auto rl = imex_low.integrate();
            CHECK(rl.err_p_l2 < 1e-11);
            CHECK(rl.err_u_h1 < 1e-11);
        }

        // degree exactly q: the seed-to-scheme transition injects an O(tau^q)
        // pressure error and the displacement carries the extrapolation shift
        // of size ~ q! tau^q |A^{-1} D^T phi|
        StepperRun ax(sys, ms, make_scheme(q), StepMode::imex, tau, n_steps);
        StepperRun bx(sys, ms, make_scheme(q), StepMode::imex, tau / 2, 2 * n_steps);
        const auto ra = ax.integrate();
        const auto rb = bx.integrate();
        CHECK(ra.err_p_l2 > 1e-11);
        const double ratio = ra.err_p_l2 / rb.err_p_l2;
        CHECK(ratio > 0.7 * (1 << q));
        CHECK(ratio < 1.5 * (1 << q));

        double fact = 1.0;
        for (int k = 2; k <= q; ++k) fact *= k;
        const Vector shift = sys->solve_A(sys->apply_D_star(Vector{1.0}));
        const double leading = fact * std::pow(tau, q) * norm2(shift);
        CHECK(ra.err_u_h1 > 0.6 * leading);
        CHECK(ra.err_u_h1 < 1.4 * leading);
    }
}

TEST_CASE("implicit scheme stays bounded without forcing at any step size") {
    // no coupling condition: omega far above the decoupled threshold included
    Rng rng(808);
    for (int q : {2, 4, 6}) {
        for (double tau : {1e-3, 1.0, 10.0}) {
            const SystemPtr sys = make_matrix_ode_system(q % 4 == 0 ? 0.5 : 0.01);
            const auto ms = zero_manufactured(sys);
            StartingValues sv;
            for (int i = 0; i < q; ++i) {
                Vector p = rng.vector(1);
                sv.u.push_back(sys->solve_A(sys->apply_D_star(p)));
                sv.p.push_back(std::move(p));
            }
            StepperRun run(sys, ms, make_scheme(q), StepMode::implicit_coupled, tau, 10000, sv);
            const auto res = run.integrate();
            CHECK_FALSE(res.diverged);
            CHECK(res.max_p_c_norm <= 20.0 * res.seed_p_c_norm);
        }
    }
}

TEST_CASE("imex threshold: bounded below, divergent above") {
    Rng rng(909);
    for (int q = 1; q <= 6; ++q) {
        const double threshold = 1.0 / ((1 << q) - 1);
        StartingValues sv;
        for (int i = 0; i < q; ++i) sv.p.push_back(rng.vector(1));

        auto run_free = [&](double omega) {
            const SystemPtr sys = make_matrix_ode_system(omega);
            const auto ms = zero_manufactured(sys);
            StartingValues seeds;
            for (int i = 0; i < q; ++i) {
                seeds.p.push_back(sv.p[i]);
                seeds.u.push_back(sys->solve_A(sys->apply_D_star(sv.p[i])));
            }
            StepperRun run(sys, ms, make_scheme(q), StepMode::imex, 0.01, 3000, seeds);
            return run.integrate();
        };

        const auto below = run_free(0.9 * threshold);
        CHECK_FALSE(below.diverged);
        CHECK(below.max_p_c_norm <= 20.0 * below.seed_p_c_norm);

        const auto above = run_free(2.0 * threshold);
        const bool blown =
            above.diverged || above.max_p_c_norm > 1e6 * above.seed_p_c_norm;
        CHECK(blown);
    }
}

TEST_CASE("recovered displacement error is controlled by the pressure error") {
    // from the elliptic difference equation: |u(t_n) - u^n| <= |A^{-1} D^T| |p(t_n) - p^n|
    const SystemPtr sys = make_matrix_ode_system(0.015);
    const auto ms = matrix_ode_manufactured(sys);
    const DenseMatrix aidt = sys->A_lu.solve_matrix(sys->D.transposed());
    double opnorm = 0.0; // 2-norm of the 3x1 map
    for (int i = 0; i < 3; ++i) opnorm += aidt(i, 0) * aidt(i, 0);
    opnorm = std::sqrt(opnorm);

    StepperRun run(sys, ms, make_scheme(6), StepMode::implicit_coupled, 0.02, 50);
    const auto res = run.integrate(true);
    for (const auto& row : res.trajectory)
        CHECK(row.err_u_h1 <= (opnorm + 1e-9) * row.err_p_l2 * (1.0 + 1e-6));
}

TEST_CASE("divergence detection reports the step index") {
    const SystemPtr sys = make_matrix_ode_system(0.9); // far above the q=6 threshold
    const auto ms = matrix_ode_manufactured(sys);
    StepperRun run(sys, ms, make_scheme(6), StepMode::imex, 0.01, 2000);
    const auto res = run.integrate();
    CHECK(res.diverged);
    CHECK(res.divergence_step > 6);
    CHECK(res.divergence_step <= 2000);
}

TEST_CASE("zero forcing and zero seeds give the zero trajectory") {
    const SystemPtr sys = make_matrix_ode_system(0.015);
    const auto ms = zero_manufactured(sys);
    StepperRun run(sys, ms, make_scheme(3), StepMode::imex, 0.1, 10);
    const auto res = run.integrate(false, true);
    for (const auto& p : res.p_states) CHECK(norm2(p) == 0.0);
}
