#ifndef EPBDF_STEPPERS_HPP
#define EPBDF_STEPPERS_HPP

#include <optional>

#include "epbdf/bdf.hpp"
#include "epbdf/systems.hpp"

namespace epbdf {

enum class StepMode {
    implicit_coupled, // one block solve per step
    implicit_reduced, // Schur-eliminated q-step recursion in p
    imex,             // decoupled elliptic solve with extrapolated pressure
    imex_reduced      // eliminated 2q-step recursion in p (negative history seed)
};

const char* step_mode_name(StepMode m);

struct StartingValues {
    std::vector<Vector> p; // p^0..p^{q-1}
    std::vector<Vector> u; // u^0..u^{q-1}, solved from A u^i = f(t_i) + D^T p^i
    bool exact_nodal = true;
};

/// p^i from the exact nodal solution, u^i from the elliptic consistency equation.
StartingValues seed_starting_values(const EllipticParabolicSystem& sys,
                                    const ManufacturedSolution& ms, const BdfScheme& scheme,
                                    double tau);

struct TrajectoryRow {
    int n = 0;
    double t = 0;
    double err_u_h1 = 0;
    double err_p_l2 = 0;
};

struct IntegrationResult {
    double err_u_h1 = 0, err_u_energy = 0, err_p_l2 = 0;
    bool diverged = false;
    int divergence_step = -1;
    double last_finite_err_u = 0, last_finite_err_p = 0;
    double max_p_c_norm = 0; // max over steps of |p^n|_c, for boundedness studies
    double seed_p_c_norm = 0;
    std::vector<TrajectoryRow> trajectory;     // iff record_trajectory
    std::vector<Vector> p_states;              // iff record_states
    std::vector<Vector> u_states;              // iff record_states
};

/// One time-integration run at fixed step size; per-step linear solves reuse
/// factorizations computed once at construction.
class StepperRun {
  public:
    StepperRun(SystemPtr sys, ManufacturedSolution forcing, BdfScheme scheme, StepMode mode,
               double tau, int n_steps, std::optional<StartingValues> seeds = std::nullopt);

    /// Advance n = q..n_steps; NaN or a p-norm beyond 1e12 x seed scale aborts
    /// the run and marks it diverged.
    IntegrationResult integrate(bool record_trajectory = false, bool record_states = false);

    const BdfScheme& scheme() const { return scheme_; }
    double tau() const { return tau_; }

  private:
    void step(int n);
    Vector recover_u(int n) const;

    SystemPtr sys_;
    ManufacturedSolution ms_;
    BdfScheme scheme_;
    StepMode mode_;
    double tau_;
    int n_steps_;

    HistoryBuffer p_hist_, u_hist_, f_hist_;
    std::optional<Factorization> step_lu_; // block matrix or shifted parabolic operator
    double seed_scale_ = 0.0;
};

/// Convenience wrapper: seed, run, report final errors.
IntegrationResult integrate(SystemPtr sys, const ManufacturedSolution& ms, int q, StepMode mode,
                            double tau, double t_end, bool record_trajectory = false);

} // namespace epbdf

#endif
