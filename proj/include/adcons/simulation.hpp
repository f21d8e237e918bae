#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "adcons/error.hpp"
#include "adcons/protocols.hpp"

namespace adcons {

enum class Integrator { RK4, Euler };

[[nodiscard]] std::string_view to_string(Integrator integrator) noexcept;
[[nodiscard]] Integrator parse_integrator(std::string_view name);

struct SimConfig {
    double dt = 1e-3;
    double t_end = 30.0;
    std::size_t record_every = 10;
    Integrator integrator = Integrator::RK4;
    std::uint64_t seed = 1;
    /// Random initial x, v, w (and leader observer) entries are uniform in
    /// [-init_range, init_range].
    double init_range = 1.0;
    double initial_d = 1.0;
    /// Overrides the random leader state.
    std::optional<Vector> leader_initial;

    void validate() const;
};

/// 64-bit FNV-1a.
[[nodiscard]] std::uint64_t fnv1a(std::string_view bytes) noexcept;

/// Uniform doubles in [0, 1) from mt19937_64, mapped with the top 53 bits so
/// streams are identical across standard libraries.
class DeterministicRng {
public:
    explicit DeterministicRng(std::uint64_t seed);
    double uniform();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

private:
    std::mt19937_64 engine_;
};

/// Seeded random initial state (x, v, w, v0 uniform, x0 from config or
/// uniform, d = initial_d).
[[nodiscard]] NetworkState random_initial_state(const NetworkDynamics& dyn, const SimConfig& config);

struct TraceRecord {
    double t = 0.0;
    NetworkState state;
    std::vector<Vector> u;
    Vector u0;
    double xi_norm = 0.0;
};

struct ClampLog {
    std::size_t count = 0;
    double max_magnitude = 0.0;
    double first_time = 0.0;
};

struct SimulationTrace {
    std::vector<TraceRecord> records;
    std::uint64_t seed = 0;
    std::uint64_t scenario_hash = 0;
    std::string config_echo;
    ClampLog clamp;
    std::vector<std::string> warnings;
    /// true when some clamp exceeded 1e-6
    bool clamp_warning = false;
    std::size_t steps = 0;
};

/// Raised when the state stops being finite; carries the last finite record.
class DivergenceError : public Error {
public:
    DivergenceError(const std::string& message, TraceRecord last_finite)
        : Error(ErrorKind::Divergence, message), last_(std::move(last_finite)) {}
    [[nodiscard]] const TraceRecord& last_finite() const noexcept { return last_; }

private:
    TraceRecord last_;
};

/// Text fingerprint of everything that determines a run (protocol, graph,
/// model, gains, leader, sim config, initial state).
[[nodiscard]] std::string describe_run(const NetworkDynamics& dyn, const SimConfig& config,
                                       const NetworkState& initial);

/// One fixed integration step from `s` at time t.
[[nodiscard]] NetworkState integrate_step(const NetworkDynamics& dyn, Integrator integrator, double t, double dt,
                                          const NetworkState& s);

[[nodiscard]] SimulationTrace simulate(const NetworkDynamics& dyn, const SimConfig& config,
                                       const NetworkState& initial);
[[nodiscard]] SimulationTrace simulate(const NetworkDynamics& dyn, const SimConfig& config);

/// Column names in CSV order.
[[nodiscard]] std::vector<std::string> trace_columns(const NetworkDynamics& dyn);
void write_trace_csv(std::ostream& os, const NetworkDynamics& dyn, const SimulationTrace& trace);

/// %.17g
[[nodiscard]] std::string format_double(double v);

}  // namespace adcons
