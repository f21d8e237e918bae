#pragma once

#include <string>
#include <vector>

#include "adcons/analysis.hpp"
#include "adcons/simulation.hpp"

namespace adcons {

enum class LyapunovForm { Leaderless, LeaderObserver, LeaderObserverContinuous, RelativeState };

[[nodiscard]] std::string_view to_string(LyapunovForm form) noexcept;
[[nodiscard]] LyapunovForm lyapunov_form(ProtocolKind kind) noexcept;

/// Lyapunov candidate used in the convergence argument for dyn's protocol,
/// evaluated with the constants from compute_constants.
[[nodiscard]] double lyapunov_value(const NetworkDynamics& dyn, const AnalysisConstants& constants,
                                    const NetworkState& s);

struct LyapunovSeries {
    LyapunovForm form = LyapunovForm::Leaderless;
    std::vector<double> t;
    std::vector<double> value;
    /// largest V(t_{k+1}) − V(t_k), relative to max(1, V(t_k))
    double max_relative_increase = 0.0;
    double worst_time = 0.0;
    [[nodiscard]] bool nonincreasing(double tolerance) const { return max_relative_increase <= tolerance; }
};

[[nodiscard]] LyapunovSeries lyapunov_monitor(const NetworkDynamics& dyn, const AnalysisConstants& constants,
                                              const SimulationTrace& trace);

}  // namespace adcons
