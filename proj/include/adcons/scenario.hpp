#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "adcons/agents.hpp"
#include "adcons/gains.hpp"
#include "adcons/graph.hpp"
#include "adcons/protocols.hpp"
#include "adcons/simulation.hpp"

namespace adcons {

enum class InitialMode { Random, Manifold };

/// Raw "[section] key = value" document. Keys are unique per section.
struct IniDocument {
    std::map<std::string, std::map<std::string, std::string>> sections;

    [[nodiscard]] std::optional<std::string> get(const std::string& section, const std::string& key) const;
};

[[nodiscard]] IniDocument parse_ini(std::string_view text);

/// Command-line values that take precedence over the scenario file.
struct ScenarioOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<double> dt;
    std::optional<double> t_end;
    std::optional<std::string> out_dir;
};

struct Scenario {
    std::string name;
    std::filesystem::path source;
    ProtocolKind kind = ProtocolKind::LeaderlessC;
    DirectedGraph graph{1, {}, false};
    AgentModel model;
    LeaderSpec leader;
    std::optional<double> omega;  // analysis bound on the leader input; leader default when empty
    GainSet gains;
    /// names of gain components taken from the file instead of the design
    std::vector<std::string> overridden;
    SimConfig sim;
    InitialMode initial = InitialMode::Random;
    std::filesystem::path out_dir;
};

/// Parses, resolves file references relative to the scenario's directory,
/// designs gains and applies overrides. Does not certify the gains.
[[nodiscard]] Scenario load_scenario(const std::filesystem::path& path, const ScenarioOverrides& overrides = {});
[[nodiscard]] Scenario scenario_from_text(std::string_view text, const std::filesystem::path& base_dir,
                                          const std::string& name, const ScenarioOverrides& overrides = {});

[[nodiscard]] NetworkDynamics make_dynamics(const Scenario& s);

/// Random state or, for InitialMode::Manifold, a state already on the
/// consensus manifold (all errors zero).
[[nodiscard]] NetworkState initial_state(const Scenario& s, const NetworkDynamics& dyn);

/// "a b; c d" → 2×2
[[nodiscard]] Matrix parse_inline_matrix(std::string_view text, std::string_view context);

}  // namespace adcons
