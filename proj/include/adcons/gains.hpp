#pragma once

#include <optional>
#include <string>
#include <vector>

#include "adcons/agents.hpp"
#include "adcons/linalg.hpp"
#include "adcons/matrix.hpp"

namespace adcons {

/// Every controller parameter any protocol may need. Which components are
/// required depends on the protocol kind.
struct GainSet {
    std::optional<Matrix> K;      // p x n
    std::optional<Matrix> F;      // n x m
    std::optional<Matrix> S;      // observer certificate, S = Pbar⁻¹
    std::optional<Matrix> P;      // state-feedback certificate
    std::optional<Matrix> Pbar;   // observer Riccati solution
    std::optional<Matrix> Omega;  // adaptive-law weight
    std::optional<Matrix> Q;      // auxiliary weight for the leader-follower observer protocols
    std::optional<double> beta;
    std::vector<double> kappa;  // per follower
    std::vector<double> phi;    // per follower
};

struct OutputGains {
    Matrix K;
    Matrix F;
    Matrix S;
    Matrix Pbar;
};

struct StateGains {
    Matrix K;
    Matrix P;
    Matrix Omega;
};

/// Observer Riccati route: Pbar solves Pbar Aᵀ + A Pbar + I − Pbar Cᵀ C Pbar = 0,
/// S = Pbar⁻¹, F = −Pbar Cᵀ, K = −Bᵀ Sc with Sc the controller Riccati solution.
[[nodiscard]] OutputGains design_output_gains(const AgentModel& model,
                                              const NumericPolicy& policy = default_policy());

/// P = Sc⁻¹, K = −Bᵀ P⁻¹, Ω = Kᵀ K.
[[nodiscard]] StateGains design_state_gains(const Matrix& a, const Matrix& b,
                                            const NumericPolicy& policy = default_policy());

/// Q = Sc, so that X = −(QA + AᵀQ − 2QBBᵀQ) = I + QBBᵀQ is positive definite.
[[nodiscard]] Matrix design_q(const Matrix& a, const Matrix& b, const Matrix& k,
                              const NumericPolicy& policy = default_policy());

/// max(omega_bound, override); throws Input on a negative or non-finite bound.
[[nodiscard]] double choose_beta(double omega_bound, std::optional<double> override_value = std::nullopt);

struct DesignOptions {
    std::optional<double> beta_override;
    double kappa = 0.05;
    double phi = 0.02;
};

/// Full gain set (every matrix component, β from the leader bound, κ and φ
/// per follower) for a model and follower count.
[[nodiscard]] GainSet design_all(const AgentModel& model, const LeaderSpec& leader, std::size_t followers,
                                 const DesignOptions& options = {}, const NumericPolicy& policy = default_policy());

struct CertificateItem {
    std::string name;
    bool pass = false;
    double margin = 0.0;  // positive when the condition holds with room to spare
    std::string detail;
};

struct Certificate {
    std::vector<CertificateItem> items;
    [[nodiscard]] bool all_pass() const;
    [[nodiscard]] std::string report() const;
};

/// Checks every invariant whose components are present in `gains`.
[[nodiscard]] Certificate certify_gains(const AgentModel& model, const GainSet& gains,
                                        const NumericPolicy& policy = default_policy());

/// X = −(QA + AᵀQ − 2QBBᵀQ)
[[nodiscard]] Matrix x_matrix(const Matrix& a, const Matrix& b, const Matrix& q);
/// W = −SA − AᵀS + 2CᵀC
[[nodiscard]] Matrix w_matrix(const Matrix& a, const Matrix& c, const Matrix& s);

}  // namespace adcons
