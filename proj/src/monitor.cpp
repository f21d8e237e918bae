#include "adcons/monitor.hpp"

#include <algorithm>
#include <cmath>

namespace adcons {

std::string_view to_string(LyapunovForm form) noexcept {
    switch (form) {
        case LyapunovForm::Leaderless: return "leaderless";
        case LyapunovForm::LeaderObserver: return "leader-observer";
        case LyapunovForm::LeaderObserverContinuous: return "leader-observer-continuous";
        case LyapunovForm::RelativeState: return "relative-state";
    }
    return "?";
}

LyapunovForm lyapunov_form(ProtocolKind kind) noexcept {
    switch (kind) {
        case ProtocolKind::LeaderlessC:
        case ProtocolKind::LeaderlessB: return LyapunovForm::Leaderless;
        case ProtocolKind::LFDiscontinuous: return LyapunovForm::LeaderObserver;
        case ProtocolKind::LFContinuous: return LyapunovForm::LeaderObserverContinuous;
        case ProtocolKind::LFStateDiscontinuous:
        case ProtocolKind::LFStateContinuous: return LyapunovForm::RelativeState;
    }
    return LyapunovForm::Leaderless;
}

namespace {

// ½ Σ wᵢ (2dᵢ + ρᵢ) ρᵢ + ½ Σ wᵢ (dᵢ − α)²
double adaptive_part(const Vector& weights, const Vector& d, const Vector& rho, double alpha) {
    double v = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        v += 0.5 * weights[i] * (2.0 * d[i] + rho[i]) * rho[i];
        v += 0.5 * weights[i] * (d[i] - alpha) * (d[i] - alpha);
    }
    return v;
}

}  // namespace

double lyapunov_value(const NetworkDynamics& dyn, const AnalysisConstants& k, const NetworkState& s) {
    if (k.kind != dyn.kind()) {
        throw Error(ErrorKind::Configuration, "Lyapunov constants were computed for protocol " +
                                                  std::string(to_string(k.kind)) + ", not " +
                                                  std::string(to_string(dyn.kind())));
    }
    const auto sig = dyn.derive(s);
    switch (lyapunov_form(dyn.kind())) {
        case LyapunovForm::Leaderless: return adaptive_part(k.r, s.d, sig.rho, k.alpha);
        case LyapunovForm::RelativeState: return adaptive_part(k.g, s.d, sig.rho, k.alpha);
        case LyapunovForm::LeaderObserver:
        case LyapunovForm::LeaderObserverContinuous: break;
    }
    const Matrix& sm = *dyn.gains().S;
    const double v3 = adaptive_part(k.g, s.d, sig.rho, k.alpha) + k.gamma * quadratic_form(sm, sig.e0);
    if (dyn.kind() == ProtocolKind::LFDiscontinuous) return v3;
    const Matrix& q = *dyn.gains().Q;
    const auto err = dyn.errors(s);
    double eta_part = 0.0;
    for (const auto& e : sig.eta) eta_part += quadratic_form(q, e);
    double zeta_part = 0.0;
    for (const auto& z : err.zeta) zeta_part += quadratic_form(sm, z);
    return eta_part + k.gamma1 * zeta_part + k.gamma2 * v3;
}

LyapunovSeries lyapunov_monitor(const NetworkDynamics& dyn, const AnalysisConstants& k,
                                const SimulationTrace& trace) {
    LyapunovSeries out;
    out.form = lyapunov_form(dyn.kind());
    out.t.reserve(trace.records.size());
    out.value.reserve(trace.records.size());
    for (const auto& r : trace.records) {
        out.t.push_back(r.t);
        out.value.push_back(lyapunov_value(dyn, k, r.state));
    }
    for (std::size_t i = 1; i < out.value.size(); ++i) {
        const double rel = (out.value[i] - out.value[i - 1]) / std::max(1.0, std::abs(out.value[i - 1]));
        if (rel > out.max_relative_increase) {
            out.max_relative_increase = rel;
            out.worst_time = out.t[i];
        }
    }
    return out;
}

}  // namespace adcons
