#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "adcons/agents.hpp"
#include "adcons/gains.hpp"
#include "adcons/matrix.hpp"

namespace adcons {

/// Plain-text named matrices: a "name rows cols" header followed by
/// rows*cols row-major values (which may span lines). '#' starts a comment.
/// A line starting with "leader" is a directive, not a matrix.
struct KeyMatrixDoc {
    std::vector<std::pair<std::string, Matrix>> entries;
    std::optional<std::string> leader_directive;

    [[nodiscard]] bool has(std::string_view name) const;
    [[nodiscard]] const Matrix& get(std::string_view name) const;
    void set(std::string name, Matrix m);
};

[[nodiscard]] KeyMatrixDoc parse_keymatrix(std::string_view text);
[[nodiscard]] std::string format_keymatrix(const KeyMatrixDoc& doc);

[[nodiscard]] double parse_number(std::string_view token, std::string_view context);
[[nodiscard]] std::vector<double> parse_number_list(std::string_view csv, std::string_view context);

/// "zero", "chua a=9 b=18 m01=-0.75 m02=-1.333", "sinusoid amplitude=1,0 frequency=1,1 phase=0,0"
[[nodiscard]] LeaderSpec parse_leader(std::string_view text);
[[nodiscard]] std::string format_leader(const LeaderSpec& spec);

[[nodiscard]] KeyMatrixDoc gains_to_doc(const GainSet& gains);
[[nodiscard]] GainSet gains_from_doc(const KeyMatrixDoc& doc);

struct ModelFile {
    AgentModel model;
    std::optional<LeaderSpec> leader;
};

/// Keys A, B, C; optional leader directive.
[[nodiscard]] ModelFile model_from_doc(const KeyMatrixDoc& doc);
[[nodiscard]] KeyMatrixDoc model_to_doc(const AgentModel& model, const std::optional<LeaderSpec>& leader = {});

[[nodiscard]] std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view text);

}  // namespace adcons
