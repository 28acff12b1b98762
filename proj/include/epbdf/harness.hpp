#ifndef EPBDF_HARNESS_HPP
#define EPBDF_HARNESS_HPP

#include <optional>
#include <string>

#include "epbdf/steppers.hpp"

namespace epbdf {

struct SystemConfig {
    std::string kind = "matrix-ode"; // "matrix-ode" | "poroelastic"
    double omega = 0.015;            // matrix-ode coupling
    int n = 20;                      // poroelastic polynomial degree
    double eta = 0.3, mu = 0.3, lambda = 0.3, biot_m = 0.1, kappa = 0.05;
};

struct ExperimentConfig {
    SystemConfig system;
    int q = 6;
    StepMode mode = StepMode::imex;
    std::vector<double> tau_list; // strictly decreasing, T/tau integral
    double final_time = 1.0;
    std::vector<double> omega_list; // sweep only
    std::string out_dir = ".";
    std::string format = "csv"; // "csv" | "json" | "both"
    bool trajectory = false;
    int jobs = 1;
    std::string seed_mode = "exact-nodal";

    void validate() const; // throws std::invalid_argument with a usage message
};

ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

SystemPtr build_system(const SystemConfig& c);
ManufacturedSolution build_manufactured(const SystemConfig& c, const SystemPtr& sys);

struct ConvergenceRow {
    double tau = 0;
    double err_u = 0, err_p = 0;
    std::optional<double> rate_u, rate_p;
    std::string status = "ok"; // "ok" | "diverged"
};

struct ConvergenceReport {
    int q = 0;
    StepMode mode = StepMode::imex;
    double omega = 0;
    std::string norm_u = "H1", norm_p = "L2";
    std::vector<ConvergenceRow> rows;

    std::string to_csv() const;
    std::string to_json() const;
};

/// rate_k = log(e_{k-1}/e_k) / log(tau_{k-1}/tau_k); rows with nonpositive or
/// nonfinite errors are flagged and get no rate.
std::vector<std::optional<double>> compute_rates(std::span<const double> errors,
                                                 std::span<const double> taus);

ConvergenceReport run_convergence(const ExperimentConfig& cfg);

struct SweepRow {
    double omega = 0, tau = 0;
    double err_p = 0, err_u = 0;
    std::string status = "ok";
};

struct SweepReport {
    std::vector<SweepRow> rows;                          // sorted by tau then omega
    std::vector<std::pair<double, double>> onset_per_tau; // (tau, smallest blow-up omega)
    std::string to_csv() const;
    std::string to_json() const;
};

/// Final-time error over the omega x tau grid on the matrix ODE; the blow-up
/// onset per tau is the smallest omega whose error exceeds 1e3 x the omega=0 error.
SweepReport run_sweep(const ExperimentConfig& cfg);

/// Round-trip helper for report fidelity tests: parse an emitted CSV body.
std::vector<ConvergenceRow> parse_convergence_csv(const std::string& csv);

std::string format_sig(double v, int significant = 6);

} // namespace epbdf

#endif
