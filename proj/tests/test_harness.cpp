#include <doctest.h>

#include <cmath>

#include "epbdf/harness.hpp"

using namespace epbdf;

TEST_CASE("rate computation basics") {
    const std::vector<double> errors{1e-2, 1e-4};
    const std::vector<double> taus{0.1, 0.01};
    const auto rates = compute_rates(errors, taus);
    REQUIRE(rates.size() == 2);
    CHECK_FALSE(rates[0].has_value());
    CHECK(*rates[1] == doctest::Approx(2.0));

    // equal errors give rate zero
    const std::vector<double> flat{1e-3, 1e-3};
    CHECK(*compute_rates(flat, taus)[1] == doctest::Approx(0.0));

    // nonpositive errors are flagged rows without a rate
    const std::vector<double> bad{1e-3, -1.0};
    CHECK_FALSE(compute_rates(bad, taus)[1].has_value());

    CHECK_THROWS_AS(compute_rates(std::vector<double>{1.0}, std::vector<double>{0.1}),
                    std::invalid_argument);
}

TEST_CASE("rate of the published implicit pair") {
    // 1.7802e-08 at 1/50 and 2.6747e-10 at 1/100 give 6.0565
    const std::vector<double> errors{1.7802e-08, 2.6747e-10};
    const std::vector<double> taus{1.0 / 50, 1.0 / 100};
    CHECK(*compute_rates(errors, taus)[1] == doctest::Approx(6.0565).epsilon(1e-4));
}

TEST_CASE("config parsing and validation") {
    const std::string text = R"({
      "system": {"kind": "matrix-ode", "omega": 0.015},
      "scheme": {"q": 6, "mode": "imex"},
      "tau_list": [0.025, 0.0125],
      "final_time": 1.0
    })";
    const ExperimentConfig cfg = parse_config(text);
    CHECK(cfg.q == 6);
    CHECK(cfg.mode == StepMode::imex);
    CHECK(cfg.system.omega == doctest::Approx(0.015));

    CHECK_THROWS_AS(parse_config("not json"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config(R"({"scheme":{"q":9},"tau_list":[0.1]})"),
                    std::invalid_argument);
    CHECK_THROWS_AS(parse_config(R"({"scheme":{"q":2},"tau_list":[0.1,0.2]})"),
                    std::invalid_argument);
    CHECK_THROWS_AS(parse_config(R"({"scheme":{"q":2},"tau_list":[0.3]})"),
                    std::invalid_argument); // T/tau not integral
    CHECK_THROWS_AS(parse_config(R"({"system":{"kind":"alien"},"tau_list":[0.1]})"),
                    std::invalid_argument);
    CHECK_THROWS_AS(parse_config(R"({"tau_list":[0.1],"seed_mode":"random"})"),
                    std::invalid_argument);
}

TEST_CASE("convergence report round-trips through its CSV form") {
    ExperimentConfig cfg;
    cfg.system.kind = "matrix-ode";
    cfg.system.omega = 0.01;
    cfg.q = 2;
    cfg.mode = StepMode::imex;
    cfg.tau_list = {1.0 / 10, 1.0 / 20};
    const ConvergenceReport rep = run_convergence(cfg);
    REQUIRE(rep.rows.size() == 2);
    CHECK(rep.rows[1].rate_p.has_value());

    const std::string csv = rep.to_csv();
    const auto parsed = parse_convergence_csv(csv);
    REQUIRE(parsed.size() == rep.rows.size());

    ConvergenceReport back = rep;
    back.rows = parsed;
    CHECK(back.to_csv() == csv); // bit-exact at the printed precision
}

TEST_CASE("convergence runs are deterministic") {
    ExperimentConfig cfg;
    cfg.system.kind = "matrix-ode";
    cfg.system.omega = 0.012;
    cfg.q = 3;
    cfg.mode = StepMode::implicit_coupled;
    cfg.tau_list = {1.0 / 8, 1.0 / 16};
    const std::string a = run_convergence(cfg).to_csv();
    const std::string b = run_convergence(cfg).to_csv();
    CHECK(a == b);

    cfg.jobs = 2;
    CHECK(run_convergence(cfg).to_csv() == a);
}

TEST_CASE("matrix ODE rates land at the scheme order") {
    ExperimentConfig cfg;
    cfg.system.kind = "matrix-ode";
    cfg.system.omega = 0.01;
    cfg.q = 2;
    cfg.mode = StepMode::implicit_coupled;
    cfg.tau_list = {1.0 / 20, 1.0 / 40, 1.0 / 80};
    const ConvergenceReport rep = run_convergence(cfg);
    for (std::size_t i = 1; i < rep.rows.size(); ++i) {
        REQUIRE(rep.rows[i].rate_p.has_value());
        CHECK(*rep.rows[i].rate_p > 1.7);
        CHECK(*rep.rows[i].rate_p < 2.3);
    }
}

TEST_CASE("sweep detects the blow-up onset and is monotone beyond it") {
    // short-horizon smoke test: at T=1 and tau=1/40 the 1e3x detector trips
    // well above the asymptotic 1/63 threshold (the unstable root has only 40
    // steps to grow); the acceptance suite runs the long-horizon version
    ExperimentConfig cfg;
    cfg.system.kind = "matrix-ode";
    cfg.q = 6;
    cfg.mode = StepMode::imex;
    cfg.tau_list = {1.0 / 40};
    cfg.omega_list = {0.005, 0.010, 0.014, 0.018, 0.022, 0.03, 0.05, 0.08};
    cfg.jobs = 2;
    const SweepReport rep = run_sweep(cfg);
    REQUIRE(rep.onset_per_tau.size() == 1);
    const double onset = rep.onset_per_tau[0].second;
    CHECK(std::isfinite(onset));
    CHECK(onset > 0.014);
    CHECK(onset <= 0.08);

    // errors non-decreasing in omega once past the onset
    double prev = -1.0;
    for (const auto& row : rep.rows) {
        if (row.omega < onset) continue;
        const double e = row.status == "diverged" ? 1e300 : row.err_p;
        if (prev >= 0.0) CHECK(e >= prev * 0.999);
        prev = e;
    }
}

TEST_CASE("sweep rejects non-ODE systems and empty omega lists") {
    ExperimentConfig cfg;
    cfg.system.kind = "poroelastic";
    cfg.tau_list = {0.1};
    cfg.omega_list = {0.01};
    CHECK_THROWS_AS(run_sweep(cfg), std::invalid_argument);
    cfg.system.kind = "matrix-ode";
    cfg.omega_list.clear();
    CHECK_THROWS_AS(run_sweep(cfg), std::invalid_argument);
}
