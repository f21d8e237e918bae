#include "adcons/simulation.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

namespace adcons {

std::string_view to_string(Integrator integrator) noexcept {
    return integrator == Integrator::RK4 ? "rk4" : "euler";
}

Integrator parse_integrator(std::string_view name) {
    if (name == "rk4" || name == "RK4") return Integrator::RK4;
    if (name == "euler" || name == "Euler") return Integrator::Euler;
    throw Error(ErrorKind::Configuration, "unknown integrator '" + std::string(name) + "' (expected rk4 or euler)");
}

void SimConfig::validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw Error(ErrorKind::Configuration, "dt must be positive");
    if (!(t_end >= dt) || !std::isfinite(t_end)) throw Error(ErrorKind::Configuration, "t_end must be at least dt");
    if (record_every < 1) throw Error(ErrorKind::Configuration, "record_every must be at least 1");
    if (!(init_range >= 0.0)) throw Error(ErrorKind::Configuration, "init_range must be nonnegative");
    if (!std::isfinite(initial_d)) throw Error(ErrorKind::Configuration, "initial d must be finite");
}

std::uint64_t fnv1a(std::string_view bytes) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

DeterministicRng::DeterministicRng(std::uint64_t seed) : engine_(seed) {}

double DeterministicRng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

NetworkState random_initial_state(const NetworkDynamics& dyn, const SimConfig& config) {
    config.validate();
    NetworkState s = dyn.zero_state();
    DeterministicRng rng(config.seed);
    const double r = config.init_range;
    auto fill = [&](Vector& v) {
        for (double& e : v) e = rng.uniform(-r, r);
    };
    for (auto& e : s.x) fill(e);
    for (auto& e : s.v) fill(e);
    for (auto& e : s.w) fill(e);
    if (!s.x0.empty()) {
        fill(s.x0);
        if (config.leader_initial) {
            if (config.leader_initial->size() != s.x0.size()) {
                throw Error(ErrorKind::Configuration, "leader initial state has wrong size");
            }
            s.x0 = *config.leader_initial;
        }
    }
    fill(s.v0);
    for (double& d : s.d) d = config.initial_d;
    return s;
}

namespace {

void put_matrix(std::ostream& os, const char* name, const Matrix& m) {
    os << name << ' ' << m.rows() << ' ' << m.cols();
    for (double v : m.data()) os << ' ' << format_double(v);
    os << '\n';
}

void put_vector(std::ostream& os, const char* name, const Vector& v) {
    os << name << ' ' << v.size();
    for (double e : v) os << ' ' << format_double(e);
    os << '\n';
}

// Per-follower d clamp at the protocol's floor; returns the largest correction.
double clamp_coupling(NetworkState& s, double floor_value) {
    double worst = 0.0;
    for (double& d : s.d) {
        if (d < floor_value) {
            worst = std::max(worst, floor_value - d);
            d = floor_value;
        }
    }
    return worst;
}

TraceRecord make_record(const NetworkDynamics& dyn, double t, const NetworkState& s) {
    auto ev = dyn.evaluate(t, s);
    TraceRecord r;
    r.t = t;
    r.state = s;
    r.u = std::move(ev.u);
    r.u0 = std::move(ev.u0);
    r.xi_norm = ev.signals.xi_norm();
    return r;
}

}  // namespace

std::string describe_run(const NetworkDynamics& dyn, const SimConfig& config, const NetworkState& initial) {
    std::ostringstream os;
    os << "protocol " << to_string(dyn.kind()) << '\n';
    os << format_graph(dyn.graph());
    put_matrix(os, "A", dyn.model().A);
    put_matrix(os, "B", dyn.model().B);
    put_matrix(os, "C", dyn.model().C);
    const GainSet& g = dyn.gains();
    if (g.K) put_matrix(os, "K", *g.K);
    if (g.F) put_matrix(os, "F", *g.F);
    if (g.S) put_matrix(os, "S", *g.S);
    if (g.P) put_matrix(os, "P", *g.P);
    if (g.Pbar) put_matrix(os, "Pbar", *g.Pbar);
    if (g.Omega) put_matrix(os, "Omega", *g.Omega);
    if (g.Q) put_matrix(os, "Q", *g.Q);
    if (g.beta) os << "beta " << format_double(*g.beta) << '\n';
    put_vector(os, "kappa", Vector(g.kappa));
    put_vector(os, "phi", Vector(g.phi));
    os << "leader " << dyn.leader().name() << '\n';
    if (const auto* c = std::get_if<ChuaParams>(&dyn.leader().variant)) {
        os << "chua " << format_double(c->a) << ' ' << format_double(c->b) << ' ' << format_double(c->m01) << ' '
           << format_double(c->m02) << '\n';
    } else if (const auto* s = std::get_if<SinusoidParams>(&dyn.leader().variant)) {
        put_vector(os, "amplitude", Vector(s->amplitude));
        put_vector(os, "frequency", Vector(s->frequency));
        put_vector(os, "phase", Vector(s->phase));
    }
    os << "dt " << format_double(config.dt) << "\nt_end " << format_double(config.t_end) << "\nrecord_every "
       << config.record_every << "\nintegrator " << to_string(config.integrator) << "\nseed " << config.seed << '\n';
    for (std::size_t i = 0; i < initial.x.size(); ++i) put_vector(os, "x", initial.x[i]);
    for (std::size_t i = 0; i < initial.v.size(); ++i) put_vector(os, "v", initial.v[i]);
    for (std::size_t i = 0; i < initial.w.size(); ++i) put_vector(os, "w", initial.w[i]);
    put_vector(os, "x0", initial.x0);
    put_vector(os, "v0", initial.v0);
    put_vector(os, "d", initial.d);
    return os.str();
}

NetworkState integrate_step(const NetworkDynamics& dyn, Integrator integrator, double t, double dt,
                            const NetworkState& s) {
    NetworkState k1 = dyn.derivative(t, s);
    if (integrator == Integrator::Euler) return NetworkState(s).axpy(dt, k1);
    NetworkState tmp = s;
    tmp.axpy(0.5 * dt, k1);
    NetworkState k2 = dyn.derivative(t + 0.5 * dt, tmp);
    tmp = s;
    tmp.axpy(0.5 * dt, k2);
    NetworkState k3 = dyn.derivative(t + 0.5 * dt, tmp);
    tmp = s;
    tmp.axpy(dt, k3);
    NetworkState k4 = dyn.derivative(t + dt, tmp);
    NetworkState out = s;
    out.axpy(dt / 6.0, k1);
    out.axpy(dt / 3.0, k2);
    out.axpy(dt / 3.0, k3);
    out.axpy(dt / 6.0, k4);
    return out;
}

SimulationTrace simulate(const NetworkDynamics& dyn, const SimConfig& config, const NetworkState& initial) {
    config.validate();
    dyn.check_shape(initial);
    if (!initial.all_finite()) throw Error(ErrorKind::Configuration, "initial state is not finite");
    const double floor_value = coupling_floor(dyn.kind());
    for (double d : initial.d) {
        if (!(d >= floor_value)) {
            throw Error(ErrorKind::Configuration, "initial d = " + format_double(d) + " is below the floor " +
                                                      format_double(floor_value) + " required by protocol " +
                                                      std::string(to_string(dyn.kind())));
        }
        if (!is_leader_follower(dyn.kind()) && !(d > 0.0)) {
            throw Error(ErrorKind::Configuration, "leaderless protocols need initial d > 0");
        }
    }

    SimulationTrace trace;
    trace.seed = config.seed;
    trace.config_echo = describe_run(dyn, config, initial);
    trace.scenario_hash = fnv1a(trace.config_echo);

    const auto steps = static_cast<std::size_t>(std::llround(config.t_end / config.dt));
    trace.steps = steps;
    trace.records.reserve(steps / config.record_every + 2);
    NetworkState s = initial;
    trace.records.push_back(make_record(dyn, 0.0, s));

    for (std::size_t k = 0; k < steps; ++k) {
        const double t = static_cast<double>(k) * config.dt;
        NetworkState next = integrate_step(dyn, config.integrator, t, config.dt, s);
        const double t_next = static_cast<double>(k + 1) * config.dt;
        if (!next.all_finite()) {
            throw DivergenceError("state became non-finite at t = " + format_double(t_next) +
                                      " (last finite snapshot t = " + format_double(t) + ")",
                                  make_record(dyn, t, s));
        }
        const double clamp = clamp_coupling(next, floor_value);
        if (clamp > 0.0) {
            if (trace.clamp.count == 0) trace.clamp.first_time = t_next;
            ++trace.clamp.count;
            trace.clamp.max_magnitude = std::max(trace.clamp.max_magnitude, clamp);
            if (clamp > 1e-6 && !trace.clamp_warning) {
                trace.clamp_warning = true;
                trace.warnings.push_back("coupling weight clamped by " + format_double(clamp) + " at t = " +
                                         format_double(t_next));
            }
        }
        s = std::move(next);
        if ((k + 1) % config.record_every == 0 || k + 1 == steps) {
            trace.records.push_back(make_record(dyn, t_next, s));
        }
    }
    return trace;
}

SimulationTrace simulate(const NetworkDynamics& dyn, const SimConfig& config) {
    return simulate(dyn, config, random_initial_state(dyn, config));
}

std::vector<std::string> trace_columns(const NetworkDynamics& dyn) {
    const std::size_t n = dyn.model().n();
    const std::size_t p = dyn.model().p();
    const bool lf = is_leader_follower(dyn.kind());
    const std::size_t nf = dyn.followers();
    const std::size_t first = lf ? 1 : 0;
    std::vector<std::string> cols{"t"};
    auto agent_cols = [&](const char* prefix, std::size_t dim, bool with_leader) {
        if (with_leader)
            for (std::size_t k = 0; k < dim; ++k) cols.push_back(std::string(prefix) + "_0_" + std::to_string(k));
        for (std::size_t i = 0; i < nf; ++i)
            for (std::size_t k = 0; k < dim; ++k)
                cols.push_back(std::string(prefix) + "_" + std::to_string(i + first) + "_" + std::to_string(k));
    };
    agent_cols("x", n, lf);
    if (uses_observers(dyn.kind())) {
        agent_cols("v", n, lf);
        for (std::size_t i = 0; i < nf; ++i)
            for (std::size_t k = 0; k < n; ++k)
                cols.push_back("w_" + std::to_string(i + first) + "_" + std::to_string(k));
    }
    for (std::size_t i = 0; i < nf; ++i) cols.push_back("d_" + std::to_string(i + first));
    agent_cols("u", p, lf);
    cols.push_back("norm_xi");
    return cols;
}

void write_trace_csv(std::ostream& os, const NetworkDynamics& dyn, const SimulationTrace& trace) {
    const auto cols = trace_columns(dyn);
    for (std::size_t c = 0; c < cols.size(); ++c) os << (c ? "," : "") << cols[c];
    os << '\n';
    const bool lf = is_leader_follower(dyn.kind());
    for (const auto& r : trace.records) {
        os << format_double(r.t);
        auto put = [&os](const Vector& v) {
            for (double e : v) os << ',' << format_double(e);
        };
        if (lf) put(r.state.x0);
        for (const auto& e : r.state.x) put(e);
        if (uses_observers(dyn.kind())) {
            if (lf) put(r.state.v0);
            for (const auto& e : r.state.v) put(e);
            for (const auto& e : r.state.w) put(e);
        }
        put(r.state.d);
        if (lf) put(r.u0);
        for (const auto& e : r.u) put(e);
        os << ',' << format_double(r.xi_norm) << '\n';
    }
}

}  // namespace adcons
