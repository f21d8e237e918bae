#pragma once

#include <string>
#include <variant>
#include <vector>

#include "adcons/matrix.hpp"

namespace adcons {

/// Shared linear agent model ẋ = A x + B u, y = C x.
struct AgentModel {
    Matrix A;
    Matrix B;
    Matrix C;

    AgentModel() = default;
    AgentModel(Matrix a, Matrix b, Matrix c);

    [[nodiscard]] std::size_t n() const noexcept { return A.rows(); }
    [[nodiscard]] std::size_t p() const noexcept { return B.cols(); }
    [[nodiscard]] std::size_t m() const noexcept { return C.rows(); }

    /// Throws Dimension if the triple is inconsistent or Input if non-finite.
    void validate() const;
};

[[nodiscard]] Vector agent_derivative(const AgentModel& model, const Vector& x, const Vector& u);

struct ZeroLeader {};

/// Chua circuit in dimensionless form; the piecewise-linear nonlinearity is
/// treated as the leader's input.
struct ChuaParams {
    double a = 9.0;
    double b = 18.0;
    double m01 = -0.75;
    double m02 = -4.0 / 3.0;

    void validate() const;
};

/// u0_k(t) = amplitude_k sin(frequency_k t + phase_k), one entry per input channel.
struct SinusoidParams {
    std::vector<double> amplitude;
    std::vector<double> frequency;
    std::vector<double> phase;

    void validate() const;
};

struct LeaderSpec {
    std::variant<ZeroLeader, ChuaParams, SinusoidParams> variant;

    [[nodiscard]] std::string name() const;
};

[[nodiscard]] double chua_input(const ChuaParams& params, const Vector& x0);

/// Sup-norm bound on the leader input.
[[nodiscard]] double leader_omega(const LeaderSpec& spec);

/// u0(t, x0) with p channels.
[[nodiscard]] Vector leader_input(const LeaderSpec& spec, double t, const Vector& x0, std::size_t p);

/// (A, B) of the Chua leader; C = I₃ since the followers use relative states.
[[nodiscard]] AgentModel chua_model(const ChuaParams& params);

}  // namespace adcons
