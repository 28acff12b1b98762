#include "epbdf/harness.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

namespace epbdf {

using nlohmann::json;

void ExperimentConfig::validate() const {
    if (q < 1 || q > 6) throw std::invalid_argument("config: q must be in 1..6");
    if (tau_list.empty()) throw std::invalid_argument("config: tau_list must not be empty");
    for (std::size_t i = 1; i < tau_list.size(); ++i)
        if (tau_list[i] >= tau_list[i - 1])
            throw std::invalid_argument("config: tau_list must be strictly decreasing");
    for (double tau : tau_list) {
        if (tau <= 0) throw std::invalid_argument("config: tau must be positive");
        const double ratio = final_time / tau;
        if (std::abs(ratio - std::llround(ratio)) > 1e-9 * ratio)
            throw std::invalid_argument("config: T/tau must be an integer");
    }
    if (system.kind != "matrix-ode" && system.kind != "poroelastic")
        throw std::invalid_argument("config: system.kind must be matrix-ode or poroelastic");
    if (seed_mode != "exact-nodal")
        throw std::invalid_argument(
            "config: seed_mode must be exact-nodal (user-supplied seeds are an API feature)");
}

namespace {

StepMode parse_mode(const std::string& s) {
    if (s == "implicit") return StepMode::implicit_coupled;
    if (s == "implicit-reduced") return StepMode::implicit_reduced;
    if (s == "imex") return StepMode::imex;
    if (s == "imex-reduced") return StepMode::imex_reduced;
    throw std::invalid_argument("config: unknown mode '" + s + "'");
}

void parallel_for(int count, int jobs, const std::function<void(int)>& body) {
    jobs = std::max(1, jobs);
    if (jobs == 1 || count <= 1) {
        for (int i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr err;
    std::mutex err_mu;
    for (int t = 0; t < std::min(jobs, count); ++t)
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard lock(err_mu);
                    if (!err) err = std::current_exception();
                }
            }
        });
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

} // namespace

ExperimentConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("config: invalid JSON: ") + e.what());
    }
    ExperimentConfig c;
    if (j.contains("system")) {
        const json& s = j["system"];
        c.system.kind = s.value("kind", c.system.kind);
        c.system.omega = s.value("omega", c.system.omega);
        c.system.n = s.value("N", c.system.n);
        c.system.eta = s.value("eta", c.system.eta);
        c.system.mu = s.value("mu", c.system.mu);
        c.system.lambda = s.value("lambda", c.system.lambda);
        c.system.biot_m = s.value("biot_M", c.system.biot_m);
        c.system.kappa = s.value("kappa", c.system.kappa);
    }
    if (j.contains("scheme")) {
        const json& s = j["scheme"];
        c.q = s.value("q", c.q);
        if (s.contains("mode")) c.mode = parse_mode(s["mode"].get<std::string>());
    }
    if (j.contains("tau_list")) c.tau_list = j["tau_list"].get<std::vector<double>>();
    c.final_time = j.value("final_time", c.final_time);
    if (j.contains("omega_list")) c.omega_list = j["omega_list"].get<std::vector<double>>();
    if (j.contains("output")) {
        c.out_dir = j["output"].value("dir", c.out_dir);
        c.format = j["output"].value("format", c.format);
    }
    c.trajectory = j.value("trajectory", c.trajectory);
    c.jobs = j.value("jobs", c.jobs);
    c.seed_mode = j.value("seed_mode", c.seed_mode);
    c.validate();
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

SystemPtr build_system(const SystemConfig& c) {
    if (c.kind == "matrix-ode") return make_matrix_ode_system(c.omega);
    return make_poroelastic_system(c.n, c.eta, c.mu, c.lambda, c.biot_m, c.kappa);
}

ManufacturedSolution build_manufactured(const SystemConfig& c, const SystemPtr& sys) {
    if (c.kind == "matrix-ode") return matrix_ode_manufactured(sys);
    return poroelastic_manufactured(sys);
}

std::vector<std::optional<double>> compute_rates(std::span<const double> errors,
                                                 std::span<const double> taus) {
    if (errors.size() != taus.size() || errors.size() < 2)
        throw std::invalid_argument("compute_rates: need matching lengths >= 2");
    std::vector<std::optional<double>> rates(errors.size());
    for (std::size_t k = 1; k < errors.size(); ++k) {
        if (!(errors[k] > 0) || !(errors[k - 1] > 0) || !std::isfinite(errors[k]) ||
            !std::isfinite(errors[k - 1]))
            continue;
        rates[k] = std::log(errors[k - 1] / errors[k]) / std::log(taus[k - 1] / taus[k]);
    }
    return rates;
}

std::string format_sig(double v, int significant) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*e", significant - 1, v);
    return buf;
}

namespace {

std::string format_rate(const std::optional<double>& r) {
    if (!r) return "";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", *r);
    return buf;
}

} // namespace

std::string ConvergenceReport::to_csv() const {
    std::ostringstream os;
    os << "tau,err_u,rate_u,err_p,rate_p,status\n";
    for (const auto& r : rows)
        os << format_sig(r.tau) << ',' << format_sig(r.err_u) << ',' << format_rate(r.rate_u)
           << ',' << format_sig(r.err_p) << ',' << format_rate(r.rate_p) << ',' << r.status
           << '\n';
    return os.str();
}

std::string ConvergenceReport::to_json() const {
    json j;
    j["q"] = q;
    j["mode"] = step_mode_name(mode);
    j["omega"] = omega;
    j["norms"] = {{"u", norm_u}, {"p", norm_p}};
    j["rows"] = json::array();
    for (const auto& r : rows) {
        json row{{"tau", r.tau}, {"err_u", r.err_u}, {"err_p", r.err_p}, {"status", r.status}};
        if (r.rate_u) row["rate_u"] = *r.rate_u;
        if (r.rate_p) row["rate_p"] = *r.rate_p;
        j["rows"].push_back(row);
    }
    return j.dump(2);
}

ConvergenceReport run_convergence(const ExperimentConfig& cfg) {
    cfg.validate();
    const SystemPtr sys = build_system(cfg.system);
    const ManufacturedSolution ms = build_manufactured(cfg.system, sys);

    ConvergenceReport rep;
    rep.q = cfg.q;
    rep.mode = cfg.mode;
    rep.omega = sys->omega;
    rep.rows.resize(cfg.tau_list.size());

    parallel_for(static_cast<int>(cfg.tau_list.size()), cfg.jobs, [&](int i) {
        const double tau = cfg.tau_list[i];
        IntegrationResult res = integrate(sys, ms, cfg.q, cfg.mode, tau, cfg.final_time);
        ConvergenceRow row;
        row.tau = tau;
        if (res.diverged) {
            row.status = "diverged";
            row.err_u = res.last_finite_err_u;
            row.err_p = res.last_finite_err_p;
        } else {
            row.err_u = res.err_u_h1;
            row.err_p = res.err_p_l2;
        }
        rep.rows[i] = std::move(row);
    });

    std::vector<double> eu, ep, taus;
    for (const auto& r : rep.rows) {
        taus.push_back(r.tau);
        eu.push_back(r.status == "ok" ? r.err_u : -1.0);
        ep.push_back(r.status == "ok" ? r.err_p : -1.0);
    }
    if (rep.rows.size() >= 2) {
        auto ru = compute_rates(eu, taus);
        auto rp = compute_rates(ep, taus);
        for (std::size_t i = 0; i < rep.rows.size(); ++i) {
            rep.rows[i].rate_u = ru[i];
            rep.rows[i].rate_p = rp[i];
        }
    }
    return rep;
}

std::string SweepReport::to_csv() const {
    std::ostringstream os;
    os << "omega,tau,err_u,err_p,status\n";
    for (const auto& r : rows)
        os << format_sig(r.omega) << ',' << format_sig(r.tau) << ',' << format_sig(r.err_u) << ','
           << format_sig(r.err_p) << ',' << r.status << '\n';
    return os.str();
}

std::string SweepReport::to_json() const {
    json j;
    j["rows"] = json::array();
    for (const auto& r : rows)
        j["rows"].push_back({{"omega", r.omega},
                             {"tau", r.tau},
                             {"err_u", r.err_u},
                             {"err_p", r.err_p},
                             {"status", r.status}});
    j["onset"] = json::array();
    for (const auto& [tau, omega] : onset_per_tau)
        j["onset"].push_back({{"tau", tau}, {"omega", omega}});
    return j.dump(2);
}

SweepReport run_sweep(const ExperimentConfig& cfg) {
    cfg.validate();
    if (cfg.system.kind != "matrix-ode")
        throw std::invalid_argument("sweep: only the matrix-ode system is supported");
    if (cfg.omega_list.empty()) throw std::invalid_argument("sweep: omega_list must not be empty");

    SweepReport rep;
    const int nt = static_cast<int>(cfg.tau_list.size());
    const int no = static_cast<int>(cfg.omega_list.size());
    rep.rows.resize(static_cast<std::size_t>(nt) * no);
    std::vector<double> baseline(nt, 0.0);

    // omega = 0 reference error per tau
    for (int it = 0; it < nt; ++it) {
        const SystemPtr sys0 = make_matrix_ode_system(0.0);
        const auto ms0 = matrix_ode_manufactured(sys0);
        baseline[it] =
            integrate(sys0, ms0, cfg.q, cfg.mode, cfg.tau_list[it], cfg.final_time).err_p_l2;
    }

    parallel_for(nt * no, cfg.jobs, [&](int idx) {
        const int it = idx / no;
        const int io = idx % no;
        const SystemPtr sys = make_matrix_ode_system(cfg.omega_list[io]);
        const auto ms = matrix_ode_manufactured(sys);
        IntegrationResult res = integrate(sys, ms, cfg.q, cfg.mode, cfg.tau_list[it], cfg.final_time);
        SweepRow row;
        row.omega = cfg.omega_list[io];
        row.tau = cfg.tau_list[it];
        if (res.diverged) {
            row.status = "diverged";
            row.err_u = res.last_finite_err_u;
            row.err_p = res.last_finite_err_p;
        } else {
            row.err_u = res.err_u_h1;
            row.err_p = res.err_p_l2;
        }
        rep.rows[idx] = std::move(row);
    });

    for (int it = 0; it < nt; ++it) {
        double onset = std::numeric_limits<double>::quiet_NaN();
        for (int io = 0; io < no; ++io) {
            const SweepRow& r = rep.rows[static_cast<std::size_t>(it) * no + io];
            const bool blown = r.status == "diverged" || r.err_p > 1e3 * baseline[it];
            if (blown) { onset = r.omega; break; }
        }
        rep.onset_per_tau.emplace_back(cfg.tau_list[it], onset);
    }
    return rep;
}

std::vector<ConvergenceRow> parse_convergence_csv(const std::string& csv) {
    std::vector<ConvergenceRow> rows;
    std::istringstream is(csv);
    std::string line;
    std::getline(is, line); // header
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) f.push_back(cell);
        while (f.size() < 6) f.push_back("");
        ConvergenceRow r;
        r.tau = std::stod(f[0]);
        r.err_u = std::stod(f[1]);
        if (!f[2].empty()) r.rate_u = std::stod(f[2]);
        r.err_p = std::stod(f[3]);
        if (!f[4].empty()) r.rate_p = std::stod(f[4]);
        r.status = f[5];
        rows.push_back(r);
    }
    return rows;
}

} // namespace epbdf
