#include "epbdf/steppers.hpp"

#include <cmath>
#include <stdexcept>

namespace epbdf {

const char* step_mode_name(StepMode m) {
    switch (m) {
    case StepMode::implicit_coupled: return "implicit";
    case StepMode::implicit_reduced: return "implicit-reduced";
    case StepMode::imex: return "imex";
    case StepMode::imex_reduced: return "imex-reduced";
    }
    return "?";
}

StartingValues seed_starting_values(const EllipticParabolicSystem& sys,
                                    const ManufacturedSolution& ms, const BdfScheme& scheme,
                                    double tau) {
    StartingValues sv;
    for (int i = 0; i < scheme.q; ++i) {
        Vector p = ms.p(i * tau);
        Vector rhs = ms.f(i * tau);
        axpy(1.0, sys.apply_D_star(p), rhs);
        sv.u.push_back(sys.solve_A(rhs));
        sv.p.push_back(std::move(p));
    }
    return sv;
}

StepperRun::StepperRun(SystemPtr sys, ManufacturedSolution forcing, BdfScheme scheme,
                       StepMode mode, double tau, int n_steps,
                       std::optional<StartingValues> seeds)
    : sys_(std::move(sys)), ms_(std::move(forcing)), scheme_(std::move(scheme)), mode_(mode),
      tau_(tau), n_steps_(n_steps) {
    const int q = scheme_.q;
    StartingValues sv = seeds ? std::move(*seeds) : seed_starting_values(*sys_, ms_, scheme_, tau_);
    if (static_cast<int>(sv.p.size()) != q || static_cast<int>(sv.u.size()) != q)
        throw std::invalid_argument("StepperRun: need exactly q starting pairs");

    const int p_cap = mode_ == StepMode::imex_reduced ? 2 * q + 1 : q + 1;
    p_hist_ = HistoryBuffer(p_cap);
    u_hist_ = HistoryBuffer(q + 1);
    f_hist_ = HistoryBuffer(q + 1);

    if (mode_ == StepMode::imex_reduced) {
        for (Vector& v : solve_negative_history(scheme_, sv.p)) p_hist_.push(std::move(v));
    }
    for (int i = 0; i < q; ++i) {
        seed_scale_ = std::max(seed_scale_, sys_->norm_p_c(sv.p[i]));
        p_hist_.push(std::move(sv.p[i]));
        u_hist_.push(std::move(sv.u[i]));
        f_hist_.push(ms_.f(i * tau_));
    }
    seed_scale_ = std::max(seed_scale_, 1e-14);

    const double aq = scheme_.alpha_d[q];
    try {
        switch (mode_) {
        case StepMode::implicit_coupled: {
            // [ A, -D^T; aq*D, aq*C + tau*B ]
            const int nu = sys_->dim_u, np = sys_->dim_p;
            DenseMatrix block(nu + np, nu + np);
            for (int i = 0; i < nu; ++i)
                for (int j = 0; j < nu; ++j) block(i, j) = sys_->A(i, j);
            for (int i = 0; i < np; ++i)
                for (int j = 0; j < nu; ++j) {
                    block(nu + i, j) = aq * sys_->D(i, j);
                    block(j, nu + i) = -sys_->D(i, j);
                }
            for (int i = 0; i < np; ++i)
                for (int j = 0; j < np; ++j)
                    block(nu + i, nu + j) = aq * sys_->C(i, j) + tau_ * sys_->B(i, j);
            step_lu_.emplace(block);
            break;
        }
        case StepMode::implicit_reduced:
            step_lu_.emplace(sys_->factor_parabolic(aq, tau_, aq));
            break;
        case StepMode::imex:
        case StepMode::imex_reduced:
            step_lu_.emplace(sys_->factor_parabolic(aq, tau_));
            break;
        }
    } catch (const std::runtime_error& e) {
        throw std::runtime_error(std::string("StepperRun: step operator breakdown (") + e.what() +
                                 ")");
    }
    if (step_lu_->pivot_ratio() > 1e15)
        throw std::runtime_error("StepperRun: step operator nearly singular, pivot ratio " +
                                 std::to_string(step_lu_->pivot_ratio()));
}

Vector StepperRun::recover_u(int n) const {
    // decoupled elliptic recovery A u^n = f^n + D^T phat^n, called before p^n
    // is pushed, so the newest q entries are exactly the extrapolation window
    auto w = p_hist_.window(scheme_.q);
    Vector rhs = ms_.f(n * tau_);
    axpy(1.0, sys_->apply_D_star(extrapolate(scheme_, w)), rhs);
    return sys_->solve_A(rhs);
}

void StepperRun::step(int n) {
    const int q = scheme_.q;
    const double t = n * tau_;
    Vector fn = ms_.f(t);
    Vector gn = ms_.g(t);
    f_hist_.push(fn);

    switch (mode_) {
    case StepMode::implicit_coupled: {
        const int nu = sys_->dim_u, np = sys_->dim_p;
        Vector rhs(nu + np);
        for (int i = 0; i < nu; ++i) rhs[i] = fn[i];
        // tau*g - sum_{i<q} alpha_i (D u^{n-q+i} + C p^{n-q+i})
        Vector low(np, 0.0);
        for (int i = 0; i < q; ++i) {
            const double a = scheme_.alpha_d[i];
            if (a == 0.0) continue;
            axpy(a, sys_->apply_D(u_hist_.newest(q - 1 - i)), low);
            axpy(a, sys_->apply_C(p_hist_.newest(q - 1 - i)), low);
        }
        for (int i = 0; i < np; ++i) rhs[nu + i] = tau_ * gn[i] - low[i];
        Vector sol = step_lu_->solve(rhs);
        u_hist_.push(Vector(sol.begin(), sol.begin() + nu));
        p_hist_.push(Vector(sol.begin() + nu, sol.end()));
        break;
    }
    case StepMode::implicit_reduced: {
        // (aq (M+C) + tau B) p^n = tau g - D A^{-1} sum alpha_i f^{n-q+i}
        //                          - (M+C) sum_{i<q} alpha_i p^{n-q+i}
        Vector fsum(sys_->dim_u, 0.0);
        for (int i = 0; i <= q; ++i)
            axpy(scheme_.alpha_d[i], f_hist_.newest(q - i), fsum);
        Vector rhs = gn;
        for (double& x : rhs) x *= tau_;
        axpy(-1.0, sys_->apply_D(sys_->solve_A(fsum)), rhs);
        Vector plow(sys_->dim_p, 0.0);
        for (int i = 0; i < q; ++i)
            axpy(scheme_.alpha_d[i], p_hist_.newest(q - 1 - i), plow);
        axpy(-1.0, sys_->apply_M(plow), rhs);
        axpy(-1.0, sys_->apply_C(plow), rhs);
        Vector pn = step_lu_->solve(rhs);
        Vector urhs = fn;
        axpy(1.0, sys_->apply_D_star(pn), urhs);
        u_hist_.push(sys_->solve_A(urhs));
        p_hist_.push(std::move(pn));
        break;
    }
    case StepMode::imex: {
        // elliptic solve with extrapolated pressure, then the parabolic step
        auto pw = p_hist_.window(q);
        Vector phat = extrapolate(scheme_, pw);
        Vector urhs = fn;
        axpy(1.0, sys_->apply_D_star(phat), urhs);
        u_hist_.push(sys_->solve_A(urhs));

        Vector usum(sys_->dim_u, 0.0);
        for (int i = 0; i <= q; ++i)
            axpy(scheme_.alpha_d[i], u_hist_.newest(q - i), usum);
        Vector rhs = gn;
        for (double& x : rhs) x *= tau_;
        axpy(-1.0, sys_->apply_D(usum), rhs);
        Vector plow(sys_->dim_p, 0.0);
        for (int i = 0; i < q; ++i)
            axpy(scheme_.alpha_d[i], p_hist_.newest(q - 1 - i), plow);
        axpy(-1.0, sys_->apply_C(plow), rhs);
        p_hist_.push(step_lu_->solve(rhs));
        break;
    }
    case StepMode::imex_reduced: {
        // 2q-step recursion: (aq C + tau B) p^n = tau g - D A^{-1} sum alpha_i f
        //   - C sum_{i<2q} at_i p^{n-2q+i} - M sum_{i<2q} ah_i p^{n-2q+i}
        Vector fsum(sys_->dim_u, 0.0);
        for (int i = 0; i <= q; ++i)
            axpy(scheme_.alpha_d[i], f_hist_.newest(q - i), fsum);
        Vector rhs = gn;
        for (double& x : rhs) x *= tau_;
        axpy(-1.0, sys_->apply_D(sys_->solve_A(fsum)), rhs);

        Vector csum(sys_->dim_p, 0.0), msum(sys_->dim_p, 0.0);
        for (int i = 0; i < 2 * q; ++i) {
            const int back = 2 * q - 1 - i;
            if (scheme_.alpha_tilde_d[i] != 0.0)
                axpy(scheme_.alpha_tilde_d[i], p_hist_.newest(back), csum);
            if (scheme_.alpha_hat_d[i] != 0.0)
                axpy(scheme_.alpha_hat_d[i], p_hist_.newest(back), msum);
        }
        axpy(-1.0, sys_->apply_C(csum), rhs);
        axpy(-1.0, sys_->apply_M(msum), rhs);
        Vector pn = step_lu_->solve(rhs);
        u_hist_.push(recover_u(n));
        p_hist_.push(std::move(pn));
        break;
    }
    }
}

IntegrationResult StepperRun::integrate(bool record_trajectory, bool record_states) {
    const int q = scheme_.q;
    IntegrationResult out;
    out.seed_p_c_norm = seed_scale_;
    out.max_p_c_norm = seed_scale_;

    auto record = [&](int n) {
        const Vector& pn = p_hist_.newest();
        const Vector& un = u_hist_.newest();
        Vector ep = ms_.p(n * tau_);
        Vector eu = ms_.u(n * tau_);
        for (std::size_t i = 0; i < ep.size(); ++i) ep[i] -= pn[i];
        for (std::size_t i = 0; i < eu.size(); ++i) eu[i] -= un[i];
        out.trajectory.push_back({n, n * tau_, sys_->norm_u_h1(eu), sys_->norm_p_l2(ep)});
    };

    // previous finite state, so diverged runs can report their last finite error
    Vector prev_p, prev_u;
    int prev_n = -1;
    for (int n = q; n <= n_steps_; ++n) {
        step(n);
        const Vector& pn = p_hist_.newest();
        bool bad = false;
        for (double x : pn)
            if (!std::isfinite(x)) bad = true;
        const double pnorm = bad ? std::numeric_limits<double>::infinity() : sys_->norm_p_c(pn);
        out.max_p_c_norm = std::max(out.max_p_c_norm, pnorm);
        if (bad || pnorm > 1e12 * seed_scale_) {
            out.diverged = true;
            out.divergence_step = n;
            if (prev_n >= 0) {
                Vector ep = ms_.p(prev_n * tau_);
                Vector eu = ms_.u(prev_n * tau_);
                for (std::size_t i = 0; i < ep.size(); ++i) ep[i] -= prev_p[i];
                for (std::size_t i = 0; i < eu.size(); ++i) eu[i] -= prev_u[i];
                out.last_finite_err_p = sys_->norm_p_l2(ep);
                out.last_finite_err_u = sys_->norm_u_h1(eu);
            }
            return out;
        }
        prev_p = p_hist_.newest();
        prev_u = u_hist_.newest();
        prev_n = n;
        if (record_trajectory) record(n);
        if (record_states) {
            out.p_states.push_back(p_hist_.newest());
            out.u_states.push_back(u_hist_.newest());
        }
    }

    const int n = n_steps_;
    Vector ep = ms_.p(n * tau_);
    Vector eu = ms_.u(n * tau_);
    const Vector& pn = p_hist_.newest();
    const Vector& un = u_hist_.newest();
    for (std::size_t i = 0; i < ep.size(); ++i) ep[i] -= pn[i];
    for (std::size_t i = 0; i < eu.size(); ++i) eu[i] -= un[i];
    out.err_p_l2 = sys_->norm_p_l2(ep);
    out.err_u_h1 = sys_->norm_u_h1(eu);
    out.err_u_energy = sys_->norm_u_energy(eu);
    out.last_finite_err_u = out.err_u_h1;
    out.last_finite_err_p = out.err_p_l2;
    return out;
}

IntegrationResult integrate(SystemPtr sys, const ManufacturedSolution& ms, int q, StepMode mode,
                            double tau, double t_end, bool record_trajectory) {
    const int n_steps = static_cast<int>(std::llround(t_end / tau));
    StepperRun run(sys, ms, make_scheme(q), mode, tau, n_steps);
    return run.integrate(record_trajectory);
}

} // namespace epbdf
