#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "adcons/agents.hpp"
#include "adcons/gains.hpp"
#include "adcons/graph.hpp"
#include "adcons/matrix.hpp"

namespace adcons {

enum class ProtocolKind {
    LeaderlessC,           // observer-based, coupling through F C
    LeaderlessB,           // observer-based, coupling through B K
    LFDiscontinuous,       // leader-follower observer-based with unit-direction terms
    LFContinuous,          // boundary layer + sigma-modified adaptive law
    LFStateDiscontinuous,  // leader-follower relative-state feedback
    LFStateContinuous,     // relative-state feedback, boundary layer + sigma-modification
};

[[nodiscard]] std::string_view to_string(ProtocolKind kind) noexcept;
/// Accepts the canonical names printed by to_string ("leaderless-c", ...).
[[nodiscard]] ProtocolKind parse_protocol_kind(std::string_view name);
[[nodiscard]] const std::vector<ProtocolKind>& all_protocol_kinds();

[[nodiscard]] bool is_leader_follower(ProtocolKind kind) noexcept;
[[nodiscard]] bool is_state_feedback(ProtocolKind kind) noexcept;
[[nodiscard]] bool is_continuous(ProtocolKind kind) noexcept;
[[nodiscard]] bool uses_observers(ProtocolKind kind) noexcept;
/// Lower bound the adaptive weights never cross in exact arithmetic.
[[nodiscard]] double coupling_floor(ProtocolKind kind) noexcept;

/// Full network state. Follower f uses x[f], v[f], w[f], d[f]; the leader
/// state x0 and its observer v0 are empty for leaderless runs, and v, w, v0
/// are empty for the relative-state protocols.
struct NetworkState {
    std::vector<Vector> x;
    std::vector<Vector> v;
    std::vector<Vector> w;
    Vector x0;
    Vector v0;
    Vector d;

    /// this += s * other (shapes must match)
    NetworkState& axpy(double s, const NetworkState& other);
    NetworkState& operator*=(double s);
    [[nodiscard]] bool all_finite() const;
    [[nodiscard]] std::size_t scalar_count() const;
};

struct DerivedSignals {
    std::vector<Vector> xi;      // consensus error (leader-relative for LF kinds)
    std::vector<Vector> eta;     // empty for relative-state kinds
    std::vector<Vector> psi;
    std::vector<Vector> varrho;  // psi - eta
    Vector rho;
    Vector e0;  // leader observer error (LF observer kinds only)

    [[nodiscard]] double xi_norm() const;
};

/// Error coordinates used by the closed-loop analysis.
struct ErrorState {
    std::vector<Vector> zeta;    // eta - xi (observer kinds)
    std::vector<Vector> varrho;  // psi - eta (observer kinds)
    std::vector<Vector> xi;      // relative-state kinds
    Vector e0;                   // LF observer kinds
};

/// Unit direction z/‖z‖, or 0 at z = 0.
[[nodiscard]] Vector h_direction(const Vector& z);
/// z/‖z‖ outside the ball of radius kappa, z/kappa inside.
[[nodiscard]] Vector boundary_layer(const Vector& z, double kappa);

class NetworkDynamics {
public:
    NetworkDynamics(ProtocolKind kind, DirectedGraph graph, AgentModel model, GainSet gains, LeaderSpec leader);

    struct Evaluation {
        NetworkState derivative;
        std::vector<Vector> u;
        Vector u0;
        DerivedSignals signals;
    };

    [[nodiscard]] ProtocolKind kind() const noexcept { return kind_; }
    [[nodiscard]] const DirectedGraph& graph() const noexcept { return graph_; }
    [[nodiscard]] const AgentModel& model() const noexcept { return model_; }
    [[nodiscard]] const GainSet& gains() const noexcept { return gains_; }
    [[nodiscard]] const LeaderSpec& leader() const noexcept { return leader_; }
    [[nodiscard]] const LaplacianBundle& laplacian() const noexcept { return lap_; }
    [[nodiscard]] std::size_t followers() const noexcept { return followers_; }
    /// Inverse of P for the kinds that use it (empty otherwise).
    [[nodiscard]] const Matrix& p_inverse() const noexcept { return pinv_; }

    /// Zero state with every component shaped for this protocol, d = 1.
    [[nodiscard]] NetworkState zero_state() const;
    void check_shape(const NetworkState& s) const;

    [[nodiscard]] DerivedSignals derive(const NetworkState& s) const;
    [[nodiscard]] Evaluation evaluate(double t, const NetworkState& s) const;
    [[nodiscard]] NetworkState derivative(double t, const NetworkState& s) const;

    [[nodiscard]] ErrorState errors(const NetworkState& s) const;
    /// Time derivative of errors(s) computed from the closed-loop error
    /// dynamics rather than from the state derivative.
    [[nodiscard]] ErrorState error_derivative(double t, const NetworkState& s) const;

private:
    [[nodiscard]] std::size_t node_of(std::size_t follower) const noexcept {
        return graph_.has_leader() ? follower + 1 : follower;
    }
    // Σ_j a_ij (s_i − s_j) over neighbors of follower i; `leader_value` stands
    // in for node 0 on leader graphs.
    [[nodiscard]] Vector neighborhood(std::size_t i, const std::vector<Vector>& values,
                                      const Vector& leader_value) const;
    [[nodiscard]] Vector direction(std::size_t i, const Vector& z) const;

    ProtocolKind kind_;
    DirectedGraph graph_;
    AgentModel model_;
    GainSet gains_;
    LeaderSpec leader_;
    LaplacianBundle lap_;
    std::size_t followers_ = 0;
    double beta_ = 0.0;

    Matrix pinv_;
    Matrix rho_weight_;  // S or P⁻¹
    Matrix ctc_;
    Matrix fc_;
    Matrix bk_;
    Matrix bt_s_;
    Matrix bt_q_;
    Matrix bt_pinv_;
};

}  // namespace adcons
