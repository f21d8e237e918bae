#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "adcons/analysis.hpp"
#include "adcons/keymatrix.hpp"
#include "adcons/monitor.hpp"
#include "adcons/scenario.hpp"

namespace fs = std::filesystem;
using namespace adcons;

namespace {

enum Exit : int { Ok = 0, ConfigFailure = 2, NumericFailure = 3, DivergenceFailure = 4 };

int exit_code(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Convergence:
        case ErrorKind::SpectrumConflict:
        case ErrorKind::NotStabilizable:
        case ErrorKind::Rank:
        case ErrorKind::Synthesis:
        case ErrorKind::Certification: return NumericFailure;
        case ErrorKind::Divergence: return DivergenceFailure;
        default: return ConfigFailure;
    }
}

struct Job {
    fs::path scenario;
    std::ostringstream log;
    int code = Ok;
};

struct Options {
    std::vector<std::string> scenarios;
    std::optional<std::string> out;
    std::optional<std::uint64_t> seed;
    std::optional<double> dt;
    std::optional<double> t_end;
    std::optional<std::string> gains_file;
    double eps = 1e-3;
};

struct ReportRow {
    std::string name;
    std::string protocol;
    std::uint64_t seed = 0;
    std::uint64_t hash = 0;
    ConsensusMetrics metrics;
    std::optional<ResidualBound> bound;
    bool certificate_pass = false;
    std::size_t clamp_count = 0;
    double clamp_max = 0.0;
};

Scenario load(const Options& opt, const fs::path& path, bool batch) {
    ScenarioOverrides ov;
    ov.seed = opt.seed;
    ov.dt = opt.dt;
    ov.t_end = opt.t_end;
    if (opt.out) ov.out_dir = batch ? (fs::path(*opt.out) / path.stem()).string() : *opt.out;
    Scenario s = load_scenario(path, ov);
    if (opt.gains_file) {
        const GainSet g = gains_from_doc(parse_keymatrix(read_text_file(*opt.gains_file)));
        s.gains = g;
    }
    fs::create_directories(s.out_dir);
    return s;
}

std::string hex(std::uint64_t v) {
    std::ostringstream os;
    os << std::hex << v;
    return os.str();
}

int run_design(const Scenario& s, std::ostream& log) {
    const auto cert = certify_gains(s.model, s.gains);
    write_text_file((s.out_dir / "gains.txt").string(), format_keymatrix(gains_to_doc(s.gains)));
    write_text_file((s.out_dir / "certificate.txt").string(), cert.report());
    log << cert.report();
    log << "gains written to " << (s.out_dir / "gains.txt").string() << '\n';
    return cert.all_pass() ? Ok : NumericFailure;
}

int run_check(const Scenario& s, std::ostream& log) {
    auto cert = certify_gains(s.model, s.gains);
    const NetworkDynamics dyn = make_dynamics(s);
    if (is_leader_follower(s.kind)) {
        const auto lc = leader_certificate(s.graph);
        cert.items.push_back({"G L1 + L1ᵀ G > 0", lc.scaling.lambda0 > 0.0, lc.scaling.lambda0, {}});
    } else {
        const auto lc = leaderless_certificate(s.graph);
        cert.items.push_back({"lambda2(RL + LᵀR) > 0", lc.lambda2 > 0.0, lc.lambda2, {}});
    }
    write_text_file((s.out_dir / "certificate.txt").string(), cert.report());
    log << cert.report();
    return cert.all_pass() ? Ok : NumericFailure;
}

int run_bound(const Scenario& s, std::ostream& log) {
    const NetworkDynamics dyn = make_dynamics(s);
    const auto k = compute_constants(dyn, s.omega);
    std::string text = format_constants(k);
    if (is_continuous(s.kind)) text += format_bound(residual_bound(dyn, k));
    write_text_file((s.out_dir / "bound.txt").string(), text);
    log << text;
    if (!is_continuous(s.kind)) {
        throw Error(ErrorKind::NotApplicable, "residual bound applies only to the continuous protocols, not " +
                                                  std::string(to_string(s.kind)));
    }
    return Ok;
}

int run_simulate(const Scenario& s, const Options& opt, std::ostream& log, ReportRow* row) {
    const NetworkDynamics dyn = make_dynamics(s);
    const NetworkState init = initial_state(s, dyn);
    SimulationTrace trace;
    try {
        trace = simulate(dyn, s.sim, init);
    } catch (const DivergenceError& e) {
        log << e.what() << '\n';
        return DivergenceFailure;
    }
    {
        std::ofstream csv(s.out_dir / "trace.csv", std::ios::binary | std::ios::trunc);
        if (!csv) throw Error(ErrorKind::Input, "cannot write " + (s.out_dir / "trace.csv").string());
        write_trace_csv(csv, dyn, trace);
    }
    const auto m = consensus_metrics(trace, opt.eps);
    std::ostringstream report;
    report << "scenario " << s.name << "\nprotocol " << to_string(s.kind) << "\nseed " << trace.seed
           << "\nscenario_hash " << hex(trace.scenario_hash) << "\nsteps " << trace.steps << '\n'
           << format_metrics(m) << "clamp_count " << trace.clamp.count << "\nclamp_max "
           << format_double(trace.clamp.max_magnitude) << '\n';
    for (const auto& w : trace.warnings) report << "warning " << w << '\n';
    if (row) {
        row->name = s.name;
        row->protocol = std::string(to_string(s.kind));
        row->seed = trace.seed;
        row->hash = trace.scenario_hash;
        row->metrics = m;
        row->clamp_count = trace.clamp.count;
        row->clamp_max = trace.clamp.max_magnitude;
        row->certificate_pass = certify_gains(s.model, s.gains).all_pass();
        if (is_continuous(s.kind)) {
            const auto k = compute_constants(dyn, s.omega);
            row->bound = residual_bound(dyn, k);
            report << format_bound(*row->bound);
        }
    }
    write_text_file((s.out_dir / "metrics.txt").string(), report.str());
    write_text_file((s.out_dir / "config_echo.txt").string(), trace.config_echo);
    log << report.str();
    return trace.clamp_warning ? NumericFailure : Ok;
}

std::string report_csv(const std::vector<ReportRow>& rows) {
    std::ostringstream os;
    os << "scenario,protocol,seed,scenario_hash,sup_xi,rms_xi,sup_xi_sq,bound_sq,d_min,d_max,"
          "time_to_threshold,certificate,clamp_count,clamp_max\n";
    for (const auto& r : rows) {
        if (r.name.empty()) continue;
        os << r.name << ',' << r.protocol << ',' << r.seed << ',' << hex(r.hash) << ','
           << format_double(r.metrics.sup_xi) << ',' << format_double(r.metrics.rms_xi) << ','
           << format_double(r.metrics.sup_xi_sq) << ',' << (r.bound ? format_double(r.bound->bound_sq) : "") << ','
           << format_double(r.metrics.d_min) << ',' << format_double(r.metrics.d_max) << ','
           << (r.metrics.time_to_threshold ? format_double(*r.metrics.time_to_threshold) : "") << ','
           << (r.certificate_pass ? "pass" : "fail") << ',' << r.clamp_count << ',' << format_double(r.clamp_max)
           << '\n';
    }
    return os.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Adaptive consensus over directed graphs: gain design, simulation and bounds"};
    app.require_subcommand(1);
    Options opt;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--scenario", opt.scenarios, "scenario file (repeat for a parallel batch)")->required();
        sub->add_option("--out", opt.out, "output directory");
        sub->add_option("--seed", opt.seed, "random seed");
        sub->add_option("--dt", opt.dt, "integration step");
        sub->add_option("--t-end", opt.t_end, "horizon");
    };
    auto* design = app.add_subcommand("design", "design gains and write the certificate");
    auto* simulate_cmd = app.add_subcommand("simulate", "run a simulation and write trace.csv and metrics.txt");
    auto* check = app.add_subcommand("check", "certificates only");
    auto* bound = app.add_subcommand("bound", "residual-bound report");
    auto* report = app.add_subcommand("report", "simulate every scenario and aggregate report.csv");
    for (auto* sub : {design, simulate_cmd, check, bound, report}) add_common(sub);
    for (auto* sub : {simulate_cmd, report}) {
        sub->add_option("--gains", opt.gains_file, "gain file replacing the scenario's gains");
        sub->add_option("--eps", opt.eps, "threshold for time-to-threshold");
    }
    CLI11_PARSE(app, argc, argv);

    const bool batch = opt.scenarios.size() > 1;
    std::vector<Job> jobs(opt.scenarios.size());
    std::vector<ReportRow> rows(jobs.size());
    auto run_one = [&](std::size_t i) {
        Job& job = jobs[i];
        job.scenario = opt.scenarios[i];
        try {
            const Scenario s = load(opt, job.scenario, batch);
            if (design->parsed()) job.code = run_design(s, job.log);
            else if (check->parsed()) job.code = run_check(s, job.log);
            else if (bound->parsed()) job.code = run_bound(s, job.log);
            else job.code = run_simulate(s, opt, job.log, report->parsed() ? &rows[i] : nullptr);
        } catch (const Error& e) {
            job.log << e.what() << '\n';
            job.code = exit_code(e.kind());
        } catch (const std::exception& e) {
            job.log << "error: " << e.what() << '\n';
            job.code = ConfigFailure;
        }
    };
    if (batch) {
        std::vector<std::thread> threads;
        threads.reserve(jobs.size());
        for (std::size_t i = 0; i < jobs.size(); ++i) threads.emplace_back(run_one, i);
        for (auto& t : threads) t.join();
    } else {
        run_one(0);
    }

    int code = Ok;
    for (const auto& job : jobs) {
        if (batch) std::cout << "== " << job.scenario.string() << " (exit " << job.code << ")\n";
        (job.code == Ok ? std::cout : std::cerr) << job.log.str();
        code = std::max(code, job.code);
    }
    if (report->parsed()) {
        const fs::path dir = opt.out ? fs::path(*opt.out) : fs::path("out");
        fs::create_directories(dir);
        write_text_file((dir / "report.csv").string(), report_csv(rows));
        std::cout << "report written to " << (dir / "report.csv").string() << '\n';
    }
    return code;
}
