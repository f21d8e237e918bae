#pragma once

#include "adcons/gains.hpp"
#include "adcons/graph.hpp"
#include "adcons/protocols.hpp"
#include "adcons/simulation.hpp"
#include "convert.hpp"

inline adcons::AgentModel double_integrator() {
    return adcons::AgentModel(adcons::Matrix{{0, 1}, {0, 0}}, adcons::Matrix{{0}, {1}}, adcons::Matrix{{1, 0}});
}

inline adcons::DirectedGraph ring6() {
    return adcons::parse_graph("N 6\n0 1\n1 2\n2 3\n3 4\n4 5\n5 0\n0 3\n2 5\n");
}

inline adcons::DirectedGraph leader5() {
    return adcons::parse_graph("N 6 leader\n0 1\n0 2\n0 4\n1 2\n2 3\n3 4\n4 5\n5 1\n3 1\n");
}

inline adcons::DirectedGraph leader3() { return adcons::parse_graph("N 4 leader\n0 1\n1 2\n2 3\n3 1\n"); }

/// Dynamics for any protocol kind with designed gains; the model and leader
/// are picked so every kind is well posed.
inline adcons::NetworkDynamics make_kind(adcons::ProtocolKind kind, const adcons::DirectedGraph& leaderless,
                                         const adcons::DirectedGraph& with_leader, double beta = 0.7) {
    using namespace adcons;
    const AgentModel model = double_integrator();
    const bool lf = is_leader_follower(kind);
    const LeaderSpec leader = lf ? LeaderSpec{SinusoidParams{{0.5}, {1.3}, {0.2}}} : LeaderSpec{ZeroLeader{}};
    const DirectedGraph& g = lf ? with_leader : leaderless;
    DesignOptions opts;
    opts.beta_override = beta;
    opts.kappa = 0.3;
    opts.phi = 0.05;
    return NetworkDynamics(kind, g, model, design_all(model, leader, g.follower_count(), opts), leader);
}

inline adcons::NetworkState random_state(const adcons::NetworkDynamics& dyn, std::mt19937_64& rng,
                                         double d_lo = 1.0, double d_hi = 3.0) {
    adcons::NetworkState s = dyn.zero_state();
    auto fill = [&](adcons::Vector& v) {
        for (double& e : v) e = oracle::uniform(rng, -1.0, 1.0);
    };
    for (auto& v : s.x) fill(v);
    for (auto& v : s.v) fill(v);
    for (auto& v : s.w) fill(v);
    fill(s.x0);
    fill(s.v0);
    for (double& d : s.d) d = oracle::uniform(rng, d_lo, d_hi);
    return s;
}

/// Stacks per-agent vectors into one column.
inline oracle::Vec stack(const std::vector<adcons::Vector>& parts) {
    oracle::Vec out;
    for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
    return out;
}
