#include <doctest.h>

#include <cmath>

#include "adcons/error.hpp"
#include "fixtures.hpp"

using namespace adcons;

TEST_CASE("unit direction") {
    CHECK(h_direction(Vector{0, 0}) == Vector{0, 0});
    const Vector h = h_direction(Vector{3, 4});
    CHECK(h[0] == doctest::Approx(0.6));
    CHECK(h[1] == doctest::Approx(0.8));
    std::mt19937_64 rng(61);
    for (int k = 0; k < 200; ++k) {
        const Vector y = random_vector(rng, 3, -5, 5);
        const Vector y2 = random_vector(rng, 3, -5, 5);
        CHECK(h_direction(y).norm() == doctest::Approx(1.0));
        CHECK(y.dot(h_direction(y)) == doctest::Approx(y.norm()));
        CHECK(y.dot(h_direction(y2)) <= y.norm() + 1e-12);
    }
}

TEST_CASE("boundary layer") {
    CHECK(boundary_layer(Vector{0, 0}, 0.05) == Vector{0, 0});
    const Vector inner = boundary_layer(Vector{0.03, 0}, 0.05);
    CHECK(inner[0] == doctest::Approx(0.6));
    CHECK(inner[1] == 0.0);
    const Vector outer = boundary_layer(Vector{3, 4}, 0.05);
    CHECK(outer[0] == doctest::Approx(0.6));
    CHECK(outer[1] == doctest::Approx(0.8));
    CHECK_THROWS_AS((void)boundary_layer(Vector{1}, 0.0), Error);

    std::mt19937_64 rng(67);
    for (int k = 0; k < 500; ++k) {
        const double kappa = oracle::uniform(rng, 0.01, 1.0);
        const Vector z1 = random_vector(rng, 2, -1, 1);
        const Vector z2 = random_vector(rng, 2, -1, 1);
        CHECK((boundary_layer(z1, kappa) - boundary_layer(z2, kappa)).norm() <= 2.0 / kappa * (z1 - z2).norm() + 1e-12);
    }
    const Vector z{0.2, -0.1};
    for (double kappa : {1e-2, 1e-4, 1e-8}) CHECK(max_abs_diff(boundary_layer(z, kappa), h_direction(z)) < 1e-12);
}

TEST_CASE("protocol names round-trip") {
    for (auto kind : all_protocol_kinds()) CHECK(parse_protocol_kind(to_string(kind)) == kind);
    try {
        (void)parse_protocol_kind("bogus");
        FAIL("unknown protocol accepted");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Configuration);
        CHECK(std::string(e.what()).find("leaderless-c") != std::string::npos);
    }
}

TEST_CASE("configuration errors name the protocol and the missing gain") {
    const auto model = double_integrator();
    GainSet g = design_all(model, LeaderSpec{ZeroLeader{}}, 5);
    g.Q.reset();
    try {
        NetworkDynamics dyn(ProtocolKind::LFContinuous, leader5(), model, g, LeaderSpec{ZeroLeader{}});
        FAIL("missing Q accepted");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Configuration);
        const std::string msg = e.what();
        CHECK(msg.find("lf-continuous") != std::string::npos);
        CHECK(msg.find("Q") != std::string::npos);
    }
    CHECK_THROWS_AS(NetworkDynamics(ProtocolKind::LeaderlessC, leader5(), model, g, LeaderSpec{ZeroLeader{}}), Error);
    CHECK_THROWS_AS(NetworkDynamics(ProtocolKind::LFDiscontinuous, ring6(), model, g, LeaderSpec{ZeroLeader{}}), Error);
    CHECK_THROWS_AS(NetworkDynamics(ProtocolKind::LeaderlessC, DirectedGraph(3, {{0, 1}, {1, 2}}), model, g,
                                    LeaderSpec{ZeroLeader{}}),
                    Error);
    GainSet g2 = design_all(model, LeaderSpec{ZeroLeader{}}, 5);
    g2.kappa.pop_back();
    CHECK_THROWS_AS(NetworkDynamics(ProtocolKind::LFContinuous, leader5(), model, g2, LeaderSpec{ZeroLeader{}}), Error);
    CHECK_THROWS_AS(NetworkDynamics(ProtocolKind::LFStateContinuous, leader5(), model, g, LeaderSpec{ChuaParams{}}),
                    Error);
}

TEST_CASE("signals vanish on the consensus manifold") {
    std::mt19937_64 rng(71);
    for (auto kind : all_protocol_kinds()) {
        const auto dyn = make_kind(kind, ring6(), leader5());
        NetworkState s = random_state(dyn, rng);
        if (is_leader_follower(kind)) {
            for (auto& x : s.x) x = s.x0;
            if (uses_observers(kind)) s.v0 = s.x0;
            for (auto& v : s.v) v = s.x0;
            for (auto& w : s.w) w = Vector(w.size());
        } else {
            for (auto& x : s.x) x = s.x[0];
            for (auto& v : s.v) v = s.v[0];
            for (auto& w : s.w) w = s.w[0];
        }
        const auto sig = dyn.derive(s);
        CHECK(sig.xi_norm() == 0.0);
        for (double r : sig.rho) CHECK(r == 0.0);
        for (const auto& e : sig.eta) CHECK(e.max_abs() == 0.0);
        for (const auto& p : sig.psi) CHECK(p.max_abs() == 0.0);
    }
}

TEST_CASE("two-agent line: hand-expanded sums") {
    const DirectedGraph g(2, {{0, 1}, {1, 0}});
    const auto model = double_integrator();
    const NetworkDynamics dyn(ProtocolKind::LeaderlessC, g, model, design_all(model, LeaderSpec{ZeroLeader{}}, 2),
                              LeaderSpec{ZeroLeader{}});
    NetworkState s = dyn.zero_state();
    s.x = {Vector{1, 2}, Vector{4, -1}};
    s.v = {Vector{0, 1}, Vector{2, 2}};
    s.w = {Vector{1, 1}, Vector{-1, 0}};
    const auto sig = dyn.derive(s);
    CHECK(sig.xi[0] == Vector{-3, 3});
    CHECK(sig.xi[1] == Vector{3, -3});
    CHECK(sig.eta[0] == Vector{-2, -1});
    CHECK(sig.psi[1] == Vector{-2, -1});
    CHECK(sig.varrho[0] == Vector{4, 2});

    // manifold derivative: ẋ = Ax + BKw, ḋ = 0
    NetworkState m = s;
    m.x = {Vector{1, 2}, Vector{1, 2}};
    m.v = {Vector{0, 1}, Vector{0, 1}};
    m.w = {Vector{1, 1}, Vector{1, 1}};
    const auto dm = dyn.derivative(0.0, m);
    const Matrix bk = model.B * *dyn.gains().K;
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(max_abs_diff(dm.x[i], model.A * m.x[i] + bk * m.w[i]) < 1e-15);
        CHECK(dm.d[i] == 0.0);
    }
}

TEST_CASE("consensus error equals (L⊗I)x") {
    std::mt19937_64 rng(73);
    for (auto kind : all_protocol_kinds()) {
        const auto dyn = make_kind(kind, ring6(), leader5());
        const std::size_t n = dyn.model().n();
        for (int trial = 0; trial < 10; ++trial) {
            const NetworkState s = random_state(dyn, rng);
            oracle::Vec want;
            if (is_leader_follower(kind)) {
                std::vector<Vector> rel;
                for (const auto& x : s.x) rel.push_back(x - s.x0);
                want = oracle::mul(oracle::kron(to_oracle(*dyn.laplacian().L1), oracle::eye(n)), stack(rel));
            } else {
                want = oracle::mul(oracle::kron(to_oracle(dyn.laplacian().L), oracle::eye(n)), stack(s.x));
            }
            const auto got = stack(dyn.derive(s).xi);
            REQUIRE(got.size() == want.size());
            for (std::size_t k = 0; k < got.size(); ++k) CHECK(got[k] == doctest::Approx(want[k]).epsilon(1e-13));
        }
    }
}

TEST_CASE("stacked leaderless form: (L⊗I)ẋ = (I⊗A)ξ + (I⊗BK)ψ") {
    std::mt19937_64 rng(79);
    for (auto kind : {ProtocolKind::LeaderlessC, ProtocolKind::LeaderlessB}) {
        const auto dyn = make_kind(kind, DirectedGraph(2, {{0, 1}, {1, 0}}), leader5());
        const auto l = to_oracle(dyn.laplacian().L);
        const auto a = to_oracle(dyn.model().A);
        const auto bk = to_oracle(dyn.model().B * *dyn.gains().K);
        const std::size_t nn = dyn.followers();
        for (int trial = 0; trial < 20; ++trial) {
            const NetworkState s = random_state(dyn, rng);
            const auto lx = oracle::kron(l, oracle::eye(2));
            const auto xi = oracle::mul(lx, stack(s.x));
            const auto psi = oracle::mul(lx, stack(s.w));
            auto rhs = oracle::mul(oracle::kron(oracle::eye(nn), a), xi);
            const auto coupling = oracle::mul(oracle::kron(oracle::eye(nn), bk), psi);
            for (std::size_t k = 0; k < rhs.size(); ++k) rhs[k] += coupling[k];
            const auto lhs = oracle::mul(lx, stack(dyn.derivative(0.0, s).x));
            for (std::size_t k = 0; k < rhs.size(); ++k) CHECK(lhs[k] == doctest::Approx(rhs[k]).epsilon(1e-12));
        }
    }
}

TEST_CASE("leader-follower equilibrium with a zero-input leader") {
    const auto model = double_integrator();
    for (auto kind : {ProtocolKind::LFDiscontinuous, ProtocolKind::LFContinuous, ProtocolKind::LFStateDiscontinuous,
                      ProtocolKind::LFStateContinuous}) {
        const DirectedGraph g(2, {{0, 1}}, true);
        const NetworkDynamics dyn(kind, g, model, design_all(model, LeaderSpec{ZeroLeader{}}, 1), LeaderSpec{ZeroLeader{}});
        NetworkState s = dyn.zero_state();
        s.x0 = Vector{0.4, -0.3};
        s.x[0] = s.x0;
        if (uses_observers(kind)) {
            s.v0 = s.x0;
            s.v[0] = s.x0;
        }
        const auto de = dyn.error_derivative(0.0, s);
        for (const auto& z : de.zeta) CHECK(z.max_abs() == 0.0);
        for (const auto& r : de.varrho) CHECK(r.max_abs() == 0.0);
        for (const auto& x : de.xi) CHECK(x.max_abs() == 0.0);
        if (!de.e0.empty()) CHECK(de.e0.max_abs() == 0.0);
    }
}

TEST_CASE("observer error with zeta = 0 has zero derivative") {
    std::mt19937_64 rng(83);
    const auto dyn = make_kind(ProtocolKind::LeaderlessC, ring6(), leader5());
    NetworkState s = random_state(dyn, rng);
    for (std::size_t i = 0; i < s.x.size(); ++i) s.v[i] = s.x[i];
    const auto e = dyn.errors(s);
    for (const auto& z : e.zeta) CHECK(z.max_abs() < 1e-15);
    for (const auto& z : dyn.error_derivative(0.0, s).zeta) CHECK(z.max_abs() < 1e-15);
}

TEST_CASE("closed-loop error derivative matches central differences of the simulated errors") {
    std::mt19937_64 rng(89);
    for (auto kind : all_protocol_kinds()) {
        const auto dyn = make_kind(kind, ring6(), leader5());
        for (int trial = 0; trial < 5; ++trial) {
            const NetworkState s = random_state(dyn, rng);
            const double t = oracle::uniform(rng, 0.0, 3.0);
            const double h = 2e-4;
            // central differences with Richardson extrapolation (fourth order); the backward
            // step integrates the time-reversed field. Either the extrapolated error is tiny
            // or it shrinks ~16x when h halves, which a wrong derivative cannot do.
            auto central = [&](double step) {
                return std::pair{dyn.errors(integrate_step(dyn, Integrator::RK4, t, step, s)),
                                 dyn.errors(integrate_step(dyn, Integrator::RK4, t, -step, s))};
            };
            auto richardson_error = [&](double step) {
                const auto [f1, b1] = central(step);
                const auto [f2, b2] = central(0.5 * step);
                const auto de = dyn.error_derivative(t, s);
                double worst = 0.0;
                auto one = [&](const Vector& a1, const Vector& m1, const Vector& a2, const Vector& m2, const Vector& d) {
                    const Vector c1 = (1.0 / (2.0 * step)) * (a1 - m1);
                    const Vector c2 = (1.0 / step) * (a2 - m2);
                    worst = std::max(worst, max_abs_diff((1.0 / 3.0) * (4.0 * c2 - c1), d) / std::max(1.0, d.max_abs()));
                };
                for (auto member : {&ErrorState::zeta, &ErrorState::varrho, &ErrorState::xi}) {
                    REQUIRE((f1.*member).size() == (de.*member).size());
                    for (std::size_t i = 0; i < (de.*member).size(); ++i)
                        one((f1.*member)[i], (b1.*member)[i], (f2.*member)[i], (b2.*member)[i], (de.*member)[i]);
                }
                if (!de.e0.empty()) one(f1.e0, b1.e0, f2.e0, b2.e0, de.e0);
                return worst;
            };
            const double coarse = richardson_error(h);
            const double fine = richardson_error(0.5 * h);
            INFO(to_string(kind) << " coarse " << coarse << " fine " << fine);
            CHECK((fine <= 1e-9 || coarse / fine >= 10.0));
        }
    }
}

TEST_CASE("adaptive laws") {
    std::mt19937_64 rng(97);
    for (auto kind : all_protocol_kinds()) {
        const auto dyn = make_kind(kind, ring6(), leader5());
        for (int trial = 0; trial < 50; ++trial) {
            NetworkState s = random_state(dyn, rng);
            if (is_continuous(kind))
                for (double& d : s.d) d = 1.0;
            const auto ds = dyn.derivative(0.3, s);
            for (double v : ds.d) CHECK(v >= 0.0);
        }
    }
}

TEST_CASE("relabeling followers permutes the derivative") {
    std::mt19937_64 rng(101);
    const std::vector<std::size_t> perm{3, 0, 5, 1, 4, 2};
    const auto model = double_integrator();
    const auto gains = design_all(model, LeaderSpec{ZeroLeader{}}, 6);
    for (auto kind : {ProtocolKind::LeaderlessC, ProtocolKind::LeaderlessB}) {
        const NetworkDynamics a(kind, ring6(), model, gains, LeaderSpec{ZeroLeader{}});
        const NetworkDynamics b(kind, ring6().permuted(perm), model, gains, LeaderSpec{ZeroLeader{}});
        const NetworkState s = random_state(a, rng);
        NetworkState sp = s;
        for (std::size_t i = 0; i < 6; ++i) {
            sp.x[perm[i]] = s.x[i];
            sp.v[perm[i]] = s.v[i];
            sp.w[perm[i]] = s.w[i];
            sp.d[perm[i]] = s.d[i];
        }
        const auto da = a.derivative(0.0, s);
        const auto db = b.derivative(0.0, sp);
        for (std::size_t i = 0; i < 6; ++i) {
            CHECK(max_abs_diff(da.x[i], db.x[perm[i]]) < 1e-13);
            CHECK(max_abs_diff(da.w[i], db.w[perm[i]]) < 1e-13);
            CHECK(std::abs(da.d[i] - db.d[perm[i]]) < 1e-13);
        }
    }
    // leader graphs keep node 0 fixed
    const std::vector<std::size_t> lperm{0, 3, 1, 2};
    const auto lgains = design_all(model, LeaderSpec{ZeroLeader{}}, 3);
    const NetworkDynamics a(ProtocolKind::LFContinuous, leader3(), model, lgains, LeaderSpec{ZeroLeader{}});
    const NetworkDynamics b(ProtocolKind::LFContinuous, leader3().permuted(lperm), model, lgains, LeaderSpec{ZeroLeader{}});
    const NetworkState s = random_state(a, rng);
    NetworkState sp = s;
    for (std::size_t f = 0; f < 3; ++f) {
        const std::size_t to = lperm[f + 1] - 1;
        sp.x[to] = s.x[f];
        sp.v[to] = s.v[f];
        sp.w[to] = s.w[f];
        sp.d[to] = s.d[f];
    }
    const auto da = a.derivative(0.0, s);
    const auto db = b.derivative(0.0, sp);
    for (std::size_t f = 0; f < 3; ++f) {
        const std::size_t to = lperm[f + 1] - 1;
        CHECK(max_abs_diff(da.x[f], db.x[to]) < 1e-13);
        CHECK(max_abs_diff(da.w[f], db.w[to]) < 1e-13);
    }
    CHECK(max_abs_diff(da.v0, db.v0) < 1e-15);
}
