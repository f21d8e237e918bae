#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace adcons {

enum class ErrorKind {
    Dimension,
    Shape,
    Convergence,
    SpectrumConflict,
    NotStabilizable,
    GraphClass,
    Rank,
    Connectivity,
    Synthesis,
    Certification,
    Configuration,
    Input,
    Parse,
    NotApplicable,
    Divergence,
};

[[nodiscard]] constexpr std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::Dimension: return "dimension";
        case ErrorKind::Shape: return "shape";
        case ErrorKind::Convergence: return "convergence";
        case ErrorKind::SpectrumConflict: return "spectrum-conflict";
        case ErrorKind::NotStabilizable: return "not-stabilizable";
        case ErrorKind::GraphClass: return "graph-class";
        case ErrorKind::Rank: return "rank";
        case ErrorKind::Connectivity: return "connectivity";
        case ErrorKind::Synthesis: return "synthesis";
        case ErrorKind::Certification: return "certification";
        case ErrorKind::Configuration: return "configuration";
        case ErrorKind::Input: return "input";
        case ErrorKind::Parse: return "parse";
        case ErrorKind::NotApplicable: return "not-applicable";
        case ErrorKind::Divergence: return "divergence";
    }
    return "unknown";
}

/// Every failure raised by the library carries a kind so front ends can map
/// it onto a stable exit code without parsing messages.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(std::string(to_string(kind)) + " error: " + message), kind_(kind) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace adcons
