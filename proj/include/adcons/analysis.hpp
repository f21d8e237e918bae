#pragma once

#include <optional>
#include <string>
#include <vector>

#include "adcons/protocols.hpp"
#include "adcons/simulation.hpp"

namespace adcons {

/// Constants appearing in the convergence proofs, evaluated at the smallest
/// admissible values. Fields a protocol does not use stay at 0 / empty.
struct AnalysisConstants {
    ProtocolKind kind = ProtocolKind::LeaderlessC;
    double alpha = 0.0;
    double gamma = 0.0;
    double gamma1 = 0.0;
    double gamma2 = 0.0;
    double delta = 0.0;
    std::vector<double> delta_candidates;
    std::vector<double> Pi;
    Matrix W;      // −SA − AᵀS + 2CᵀC  (observer kinds)
    Matrix X;      // −(QA + AᵀQ − 2Γ), or −(P⁻¹A + AᵀP⁻¹ − 2Ω) for relative-state kinds
    Matrix Gamma;  // QBBᵀQ
    double lambda0 = 0.0;
    double lambda2 = 0.0;
    Vector r;  // leaderless
    Vector g;  // leader-follower
    double omega = 0.0;
};

/// omega defaults to the leader's analytic bound.
[[nodiscard]] AnalysisConstants compute_constants(const NetworkDynamics& dyn, std::optional<double> omega = std::nullopt,
                                                  const NumericPolicy& policy = default_policy());

struct ResidualBound {
    double bound_sq = 0.0;
    double sigma_term = 0.0;           // φ-dependent part
    double pi_linear_term = 0.0;       // κ-linear part of Πᵢ
    double pi_quadratic_term = 0.0;    // κ²-part of Πᵢ
    double boundary_term = 0.0;        // direct κ contribution (observer kinds)
};

/// Radius² of the residual ball for the continuous protocols. Throws
/// NotApplicable for the other kinds.
[[nodiscard]] ResidualBound residual_bound(const NetworkDynamics& dyn, const AnalysisConstants& constants);

struct ConsensusMetrics {
    double window_start = 0.0;
    double sup_xi = 0.0;
    double rms_xi = 0.0;
    double sup_xi_sq = 0.0;
    std::vector<double> d_final;
    std::vector<double> d_total_variation;
    double d_min = 0.0;
    double d_max = 0.0;
    double state_max_abs = 0.0;
    std::optional<double> time_to_threshold;
    double threshold = 0.0;
};

/// Metrics over the trailing `window_fraction` of the horizon; time to
/// threshold is the earliest recorded time after which ‖ξ‖ stays below eps.
[[nodiscard]] ConsensusMetrics consensus_metrics(const SimulationTrace& trace, double eps = 1e-3,
                                                 double window_fraction = 0.1);

[[nodiscard]] std::string format_constants(const AnalysisConstants& c);
[[nodiscard]] std::string format_bound(const ResidualBound& b);
[[nodiscard]] std::string format_metrics(const ConsensusMetrics& m);

}  // namespace adcons
