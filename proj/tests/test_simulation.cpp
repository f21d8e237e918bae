#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "adcons/error.hpp"
#include "fixtures.hpp"

using namespace adcons;

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    return out;
}

// final-time error of the leader state against e^{AT} x0(0)
double leader_error(double dt) {
    const Matrix a{{-2.25, 9, 0}, {1, -1, 1}, {0, -18, 0}};
    const AgentModel model(a, Matrix{{1}, {0}, {0}}, Matrix::identity(3));
    const DirectedGraph g(2, {{0, 1}}, true);
    const NetworkDynamics dyn(ProtocolKind::LFStateDiscontinuous, g, model,
                              design_all(model, LeaderSpec{ZeroLeader{}}, 1), LeaderSpec{ZeroLeader{}});
    NetworkState s = dyn.zero_state();
    s.x0 = Vector{1, 0.8, -1.5};
    s.x[0] = s.x0;
    SimConfig cfg;
    cfg.dt = dt;
    cfg.t_end = 1.0;
    cfg.record_every = 1000000;
    const auto trace = simulate(dyn, cfg, s);
    const auto exact = oracle::mul(oracle::expm(to_oracle(a)), s.x0.values());
    return max_abs_diff(trace.records.back().state.x0, Vector(exact));
}

}  // namespace

TEST_CASE("matrix exponential oracle sanity") {
    const auto e = oracle::expm({{0, 1}, {-1, 0}});
    CHECK(e[0][0] == doctest::Approx(std::cos(1.0)).epsilon(1e-14));
    CHECK(e[0][1] == doctest::Approx(std::sin(1.0)).epsilon(1e-14));
}

TEST_CASE("RK4 is fourth order") {
    const double e1 = leader_error(1e-2);
    const double e2 = leader_error(5e-3);
    const double e3 = leader_error(2.5e-3);
    CHECK(e1 / e2 >= 12.0);
    CHECK(e1 / e2 <= 20.0);
    CHECK(e2 / e3 >= 12.0);
    CHECK(e2 / e3 <= 20.0);
}

TEST_CASE("Euler is first order") {
    const AgentModel model(Matrix{{-1.0}}, Matrix{{1.0}}, Matrix{{1.0}});
    const DirectedGraph g(2, {{0, 1}}, true);
    const NetworkDynamics dyn(ProtocolKind::LFStateDiscontinuous, g, model,
                              design_all(model, LeaderSpec{ZeroLeader{}}, 1), LeaderSpec{ZeroLeader{}});
    NetworkState s = dyn.zero_state();
    s.x0 = Vector{1.0};
    s.x[0] = s.x0;
    auto err = [&](double dt) {
        SimConfig cfg;
        cfg.dt = dt;
        cfg.t_end = 1.0;
        cfg.integrator = Integrator::Euler;
        return std::abs(simulate(dyn, cfg, s).records.back().state.x0[0] - std::exp(-1.0));
    };
    const double ratio = err(1e-2) / err(5e-3);
    CHECK(ratio > 1.8);
    CHECK(ratio < 2.2);
    CHECK(parse_integrator("euler") == Integrator::Euler);
    CHECK_THROWS_AS((void)parse_integrator("rk45"), Error);
}

TEST_CASE("consensus manifold is invariant") {
    const DirectedGraph g(2, {{0, 1}, {1, 0}});
    const auto model = double_integrator();
    for (auto kind : {ProtocolKind::LeaderlessC, ProtocolKind::LeaderlessB}) {
        const NetworkDynamics dyn(kind, g, model, design_all(model, LeaderSpec{ZeroLeader{}}, 2), LeaderSpec{ZeroLeader{}});
        NetworkState s = dyn.zero_state();
        s.x = {Vector{0.3, -0.2}, Vector{0.3, -0.2}};
        s.v = {Vector{0.1, 0.5}, Vector{0.1, 0.5}};
        s.w = {Vector{-0.4, 0.2}, Vector{-0.4, 0.2}};
        SimConfig cfg;
        cfg.dt = 1e-2;
        cfg.t_end = 10.0;
        cfg.record_every = 1;
        const auto trace = simulate(dyn, cfg, s);
        for (const auto& r : trace.records) {
            CHECK(r.xi_norm <= 1e-9);
            CHECK(r.state.d[0] == 1.0);
            CHECK(r.state.d[1] == 1.0);
        }
    }
}

TEST_CASE("recording cadence and metadata") {
    const auto dyn = make_kind(ProtocolKind::LeaderlessC, ring6(), leader5());
    SimConfig cfg;
    cfg.dt = 0.01;
    cfg.t_end = 1.05;
    cfg.record_every = 10;
    const auto trace = simulate(dyn, cfg);
    CHECK(trace.steps == 105);
    REQUIRE(trace.records.size() == 12);
    CHECK(trace.records[1].t == doctest::Approx(0.1));
    CHECK(trace.records.back().t == doctest::Approx(1.05));
    CHECK(trace.seed == cfg.seed);
    CHECK(trace.scenario_hash == fnv1a(trace.config_echo));

    SimConfig other = cfg;
    other.seed = 99;
    CHECK(simulate(dyn, other).scenario_hash != trace.scenario_hash);
}

TEST_CASE("fnv1a reference values") {
    CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
}

TEST_CASE("random stream is reproducible") {
    DeterministicRng a(5);
    DeterministicRng b(5);
    for (int k = 0; k < 100; ++k) {
        const double x = a.uniform();
        CHECK(x == b.uniform());
        CHECK(x >= 0.0);
        CHECK(x < 1.0);
    }
    std::mt19937_64 ref(5);
    DeterministicRng c(5);
    CHECK(c.uniform() == static_cast<double>(ref() >> 11) * 0x1.0p-53);
}

TEST_CASE("identical runs give identical bytes") {
    for (auto kind : all_protocol_kinds()) {
        const auto dyn = make_kind(kind, ring6(), leader5());
        SimConfig cfg;
        cfg.dt = 1e-2;
        cfg.t_end = 2.0;
        std::ostringstream a;
        std::ostringstream b;
        write_trace_csv(a, dyn, simulate(dyn, cfg));
        write_trace_csv(b, dyn, simulate(dyn, cfg));
        CHECK(a.str() == b.str());
    }
}

TEST_CASE("trace CSV schema") {
    for (auto kind : all_protocol_kinds()) {
        const auto dyn = make_kind(kind, ring6(), leader5());
        SimConfig cfg;
        cfg.dt = 1e-2;
        cfg.t_end = 0.5;
        const auto trace = simulate(dyn, cfg);
        std::ostringstream os;
        write_trace_csv(os, dyn, trace);
        std::istringstream in(os.str());
        std::string line;
        std::getline(in, line);
        const auto header = split(line);
        CHECK(header == trace_columns(dyn));
        CHECK(header.front() == "t");
        CHECK(header.back() == "norm_xi");
        const bool lf = is_leader_follower(kind);
        const std::size_t nf = dyn.followers();
        const std::size_t n = dyn.model().n();
        const std::size_t p = dyn.model().p();
        std::size_t expected = 1 + (nf + lf) * n + nf + (nf + lf) * p + 1;
        if (uses_observers(kind)) expected += (nf + lf) * n + nf * n;
        CHECK(header.size() == expected);
        CHECK(header[1] == "x_0_0");
        CHECK(std::count(header.begin(), header.end(), lf ? "d_1" : "d_0") == 1);
        CHECK((std::find(header.begin(), header.end(), "v_1_0") != header.end()) == uses_observers(kind));
        if (lf) CHECK(std::find(header.begin(), header.end(), "u_0_0") != header.end());
        std::size_t rows = 0;
        while (std::getline(in, line)) {
            const auto cells = split(line);
            CHECK(cells.size() == header.size());
            for (const auto& c : cells) CHECK(std::isfinite(std::stod(c)));
            ++rows;
        }
        CHECK(rows == trace.records.size());
    }
    // 17 significant digits round-trip
    CHECK(std::stod(format_double(0.1)) == 0.1);
    CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("divergence is reported with the last finite snapshot") {
    const AgentModel model(Matrix{{200.0}}, Matrix{{1.0}}, Matrix{{1.0}});
    GainSet g = design_all(AgentModel(Matrix{{0.0}}, Matrix{{1.0}}, Matrix{{1.0}}), LeaderSpec{ZeroLeader{}}, 2);
    const NetworkDynamics dyn(ProtocolKind::LeaderlessC, DirectedGraph(2, {{0, 1}, {1, 0}}), model, g,
                              LeaderSpec{ZeroLeader{}});
    SimConfig cfg;
    cfg.dt = 1e-2;
    cfg.t_end = 20.0;
    try {
        (void)simulate(dyn, cfg);
        FAIL("unstable run finished");
    } catch (const DivergenceError& e) {
        CHECK(e.kind() == ErrorKind::Divergence);
        CHECK(e.last_finite().state.all_finite());
        CHECK(e.last_finite().t < 20.0);
    }
}

TEST_CASE("invalid simulation settings") {
    const auto dyn = make_kind(ProtocolKind::LFContinuous, ring6(), leader5());
    SimConfig cfg;
    cfg.dt = -1.0;
    CHECK_THROWS_AS((void)simulate(dyn, cfg), Error);
    cfg = SimConfig{};
    cfg.initial_d = 0.5;
    try {
        (void)simulate(dyn, cfg);
        FAIL("d(0) below the floor accepted");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Configuration);
    }
    NetworkState bad = dyn.zero_state();
    bad.x.pop_back();
    CHECK_THROWS_AS((void)simulate(dyn, SimConfig{}, bad), Error);
}

TEST_CASE("continuous adaptive gains never drop below one") {
    const auto dyn = make_kind(ProtocolKind::LFContinuous, ring6(), leader5(), 1.0);
    SimConfig cfg;
    cfg.dt = 1e-2;
    cfg.t_end = 20.0;
    const auto trace = simulate(dyn, cfg);
    for (const auto& r : trace.records)
        for (double d : r.state.d) CHECK(d >= 1.0 - 1e-9);
    CHECK(trace.clamp.max_magnitude <= 1e-6);
    CHECK_FALSE(trace.clamp_warning);
}
