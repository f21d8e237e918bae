#include "adcons/protocols.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "adcons/error.hpp"

namespace adcons {

namespace {

constexpr std::pair<ProtocolKind, std::string_view> kind_names[] = {
    {ProtocolKind::LeaderlessC, "leaderless-c"},
    {ProtocolKind::LeaderlessB, "leaderless-b"},
    {ProtocolKind::LFDiscontinuous, "lf-discontinuous"},
    {ProtocolKind::LFContinuous, "lf-continuous"},
    {ProtocolKind::LFStateDiscontinuous, "lf-state-discontinuous"},
    {ProtocolKind::LFStateContinuous, "lf-state-continuous"},
};

void axpy_list(std::vector<Vector>& a, double s, const std::vector<Vector>& b, const char* what) {
    if (a.size() != b.size()) throw Error(ErrorKind::Dimension, std::string("state axpy: ") + what + " count mismatch");
    for (std::size_t i = 0; i < a.size(); ++i) a[i].axpy(s, b[i]);
}

bool list_finite(const std::vector<Vector>& a) {
    return std::all_of(a.begin(), a.end(), [](const Vector& v) { return v.all_finite(); });
}

}  // namespace

std::string_view to_string(ProtocolKind kind) noexcept {
    for (const auto& [k, name] : kind_names)
        if (k == kind) return name;
    return "unknown";
}

ProtocolKind parse_protocol_kind(std::string_view name) {
    for (const auto& [k, n] : kind_names)
        if (n == name) return k;
    std::string valid;
    for (const auto& [k, n] : kind_names) valid += (valid.empty() ? "" : ", ") + std::string(n);
    throw Error(ErrorKind::Configuration, "unknown protocol '" + std::string(name) + "' (expected one of " + valid + ")");
}

const std::vector<ProtocolKind>& all_protocol_kinds() {
    static const std::vector<ProtocolKind> kinds = {
        ProtocolKind::LeaderlessC,    ProtocolKind::LeaderlessB,          ProtocolKind::LFDiscontinuous,
        ProtocolKind::LFContinuous,   ProtocolKind::LFStateDiscontinuous, ProtocolKind::LFStateContinuous};
    return kinds;
}

bool is_leader_follower(ProtocolKind kind) noexcept {
    return kind != ProtocolKind::LeaderlessC && kind != ProtocolKind::LeaderlessB;
}

bool is_state_feedback(ProtocolKind kind) noexcept {
    return kind == ProtocolKind::LFStateDiscontinuous || kind == ProtocolKind::LFStateContinuous;
}

bool is_continuous(ProtocolKind kind) noexcept {
    return kind == ProtocolKind::LFContinuous || kind == ProtocolKind::LFStateContinuous;
}

bool uses_observers(ProtocolKind kind) noexcept { return !is_state_feedback(kind); }

double coupling_floor(ProtocolKind kind) noexcept { return is_continuous(kind) ? 1.0 : 0.0; }

// ---------------------------------------------------------------------------

NetworkState& NetworkState::axpy(double s, const NetworkState& o) {
    axpy_list(x, s, o.x, "x");
    axpy_list(v, s, o.v, "v");
    axpy_list(w, s, o.w, "w");
    x0.axpy(s, o.x0);
    v0.axpy(s, o.v0);
    d.axpy(s, o.d);
    return *this;
}

NetworkState& NetworkState::operator*=(double s) {
    for (auto& e : x) e *= s;
    for (auto& e : v) e *= s;
    for (auto& e : w) e *= s;
    x0 *= s;
    v0 *= s;
    d *= s;
    return *this;
}

bool NetworkState::all_finite() const {
    return list_finite(x) && list_finite(v) && list_finite(w) && x0.all_finite() && v0.all_finite() &&
           d.all_finite();
}

std::size_t NetworkState::scalar_count() const {
    std::size_t n = x0.size() + v0.size() + d.size();
    for (const auto& e : x) n += e.size();
    for (const auto& e : v) n += e.size();
    for (const auto& e : w) n += e.size();
    return n;
}

double DerivedSignals::xi_norm() const {
    double acc = 0.0;
    for (const auto& e : xi) acc += e.squared_norm();
    return std::sqrt(acc);
}

Vector h_direction(const Vector& z) {
    const double nz = z.norm();
    if (nz == 0.0) return Vector(z.size());
    return z * (1.0 / nz);
}

Vector boundary_layer(const Vector& z, double kappa) {
    if (!(kappa > 0.0)) throw Error(ErrorKind::Input, "boundary layer width must be positive");
    const double nz = z.norm();
    return nz > kappa ? z * (1.0 / nz) : z * (1.0 / kappa);
}

// ---------------------------------------------------------------------------

NetworkDynamics::NetworkDynamics(ProtocolKind kind, DirectedGraph graph, AgentModel model, GainSet gains,
                                 LeaderSpec leader)
    : kind_(kind),
      graph_(std::move(graph)),
      model_(std::move(model)),
      gains_(std::move(gains)),
      leader_(std::move(leader)),
      lap_(build_laplacian(graph_)),
      followers_(graph_.follower_count()) {
    model_.validate();
    const std::string who = "protocol " + std::string(to_string(kind_));
    if (is_leader_follower(kind_)) {
        if (!graph_.has_leader()) throw Error(ErrorKind::Configuration, who + " needs a graph with a leader (node 0)");
        if (!has_spanning_tree_rooted_at(graph_, 0)) {
            throw Error(ErrorKind::Configuration, who + ": graph has no spanning tree rooted at the leader");
        }
    } else {
        if (graph_.has_leader()) throw Error(ErrorKind::Configuration, who + " is leaderless but the graph has a leader");
        if (!is_strongly_connected(graph_)) throw Error(ErrorKind::Configuration, who + ": graph is not strongly connected");
    }

    const std::size_t n = model_.n();
    const std::size_t p = model_.p();
    const std::size_t m = model_.m();
    auto need = [&](const std::optional<Matrix>& mat, const char* name, std::size_t rows, std::size_t cols) -> const Matrix& {
        if (!mat) throw Error(ErrorKind::Configuration, who + " requires gain " + name);
        if (mat->rows() != rows || mat->cols() != cols) {
            throw Error(ErrorKind::Configuration, who + ": gain " + name + " must be " + std::to_string(rows) + "x" +
                                                      std::to_string(cols));
        }
        return *mat;
    };

    const Matrix& k = need(gains_.K, "K", p, n);
    bk_ = model_.B * k;
    ctc_ = model_.C.transpose() * model_.C;
    switch (kind_) {
        case ProtocolKind::LeaderlessC:
            fc_ = need(gains_.F, "F", n, m) * model_.C;
            rho_weight_ = need(gains_.S, "S", n, n);
            break;
        case ProtocolKind::LeaderlessB:
            fc_ = need(gains_.F, "F", n, m) * model_.C;
            pinv_ = inverse(need(gains_.P, "P", n, n)).symmetric_part();
            rho_weight_ = pinv_;
            need(gains_.Omega, "Omega", n, n);
            break;
        case ProtocolKind::LFDiscontinuous:
        case ProtocolKind::LFContinuous:
            fc_ = need(gains_.F, "F", n, m) * model_.C;
            rho_weight_ = need(gains_.S, "S", n, n);
            bt_s_ = model_.B.transpose() * rho_weight_;
            bt_q_ = model_.B.transpose() * need(gains_.Q, "Q", n, n);
            break;
        case ProtocolKind::LFStateDiscontinuous:
        case ProtocolKind::LFStateContinuous:
            pinv_ = inverse(need(gains_.P, "P", n, n)).symmetric_part();
            rho_weight_ = pinv_;
            bt_pinv_ = model_.B.transpose() * pinv_;
            need(gains_.Omega, "Omega", n, n);
            break;
    }
    if (is_leader_follower(kind_)) {
        if (!gains_.beta) throw Error(ErrorKind::Configuration, who + " requires gain beta");
        beta_ = *gains_.beta;
        if (!(beta_ >= 0.0)) throw Error(ErrorKind::Configuration, who + ": beta must be nonnegative");
        if (const auto* chua = std::get_if<ChuaParams>(&leader_.variant)) {
            chua->validate();
            if (n != 3 || p != 1) throw Error(ErrorKind::Configuration, who + ": Chua leader needs n = 3 and p = 1");
        } else if (const auto* sine = std::get_if<SinusoidParams>(&leader_.variant)) {
            sine->validate();
            if (sine->amplitude.size() != p) {
                throw Error(ErrorKind::Configuration, who + ": sinusoid leader needs one channel per input");
            }
        }
    }
    if (is_continuous(kind_)) {
        if (gains_.kappa.size() != followers_) {
            throw Error(ErrorKind::Configuration, who + " requires kappa for each of the " + std::to_string(followers_) +
                                                      " followers");
        }
        if (gains_.phi.size() != followers_) {
            throw Error(ErrorKind::Configuration, who + " requires phi for each of the " + std::to_string(followers_) +
                                                      " followers");
        }
        for (std::size_t i = 0; i < followers_; ++i) {
            if (!(gains_.kappa[i] > 0.0)) throw Error(ErrorKind::Configuration, who + ": kappa must be positive");
            if (!(gains_.phi[i] > 0.0)) throw Error(ErrorKind::Configuration, who + ": phi must be positive");
        }
    }
}

NetworkState NetworkDynamics::zero_state() const {
    const std::size_t n = model_.n();
    NetworkState s;
    s.x.assign(followers_, Vector(n));
    if (uses_observers(kind_)) {
        s.v.assign(followers_, Vector(n));
        s.w.assign(followers_, Vector(n));
    }
    if (is_leader_follower(kind_)) {
        s.x0 = Vector(n);
        if (uses_observers(kind_)) s.v0 = Vector(n);
    }
    s.d = Vector(followers_, 1.0);
    return s;
}

void NetworkDynamics::check_shape(const NetworkState& s) const {
    const NetworkState z = zero_state();
    auto same = [](const std::vector<Vector>& a, const std::vector<Vector>& b) {
        if (a.size() != b.size()) return false;
        for (std::size_t i = 0; i < a.size(); ++i)
            if (a[i].size() != b[i].size()) return false;
        return true;
    };
    if (!same(s.x, z.x) || !same(s.v, z.v) || !same(s.w, z.w) || s.x0.size() != z.x0.size() ||
        s.v0.size() != z.v0.size() || s.d.size() != z.d.size()) {
        throw Error(ErrorKind::Dimension, "network state shape does not match protocol " + std::string(to_string(kind_)));
    }
}

Vector NetworkDynamics::neighborhood(std::size_t i, const std::vector<Vector>& values, const Vector& leader_value) const {
    const std::size_t node = node_of(i);
    const auto& nb = graph_.in_neighbors(node);
    Vector acc(values[i].size());
    for (std::size_t j : nb) {
        acc += values[i];
        if (graph_.has_leader()) {
            if (j == 0) {
                acc -= leader_value;
            } else {
                acc -= values[j - 1];
            }
        } else {
            acc -= values[j];
        }
    }
    return acc;
}

Vector NetworkDynamics::direction(std::size_t i, const Vector& z) const {
    return is_continuous(kind_) ? boundary_layer(z, gains_.kappa[i]) : h_direction(z);
}

DerivedSignals NetworkDynamics::derive(const NetworkState& s) const {
    check_shape(s);
    const std::size_t n = model_.n();
    DerivedSignals sig;
    sig.xi.reserve(followers_);
    sig.rho = Vector(followers_);
    const Vector zero(n);
    for (std::size_t i = 0; i < followers_; ++i) sig.xi.push_back(neighborhood(i, s.x, s.x0));
    if (uses_observers(kind_)) {
        for (std::size_t i = 0; i < followers_; ++i) {
            sig.eta.push_back(neighborhood(i, s.v, s.v0));
            sig.psi.push_back(neighborhood(i, s.w, zero));
            sig.varrho.push_back(sig.psi[i] - sig.eta[i]);
            sig.rho[i] = quadratic_form(rho_weight_, sig.varrho[i]);
        }
        if (is_leader_follower(kind_)) sig.e0 = s.v0 - s.x0;
    } else {
        for (std::size_t i = 0; i < followers_; ++i) sig.rho[i] = quadratic_form(rho_weight_, sig.xi[i]);
    }
    return sig;
}

NetworkDynamics::Evaluation NetworkDynamics::evaluate(double t, const NetworkState& s) const {
    Evaluation ev;
    ev.signals = derive(s);
    const auto& sig = ev.signals;
    const Matrix& a = model_.A;
    const Matrix& b = model_.B;
    const Matrix& c = model_.C;
    const Matrix& k = *gains_.K;
    NetworkState& ds = ev.derivative;
    ds = zero_state();
    ev.u.resize(followers_);

    if (is_leader_follower(kind_)) {
        ev.u0 = leader_input(leader_, t, s.x0, model_.p());
        ds.x0 = a * s.x0 + b * ev.u0;
        if (uses_observers(kind_)) ds.v0 = a * s.v0 + b * ev.u0 + *gains_.F * (c * s.v0 - c * s.x0);
    }

    for (std::size_t i = 0; i < followers_; ++i) {
        const double coupling = s.d[i] + sig.rho[i];
        Vector& u = ev.u[i];
        switch (kind_) {
            case ProtocolKind::LeaderlessC:
            case ProtocolKind::LeaderlessB: {
                u = k * s.w[i];
                const Vector innovation = *gains_.F * (c * s.v[i] - c * s.x[i]);
                const Vector bu = b * u;
                ds.v[i] = a * s.v[i] + bu + innovation;
                const Matrix& couple = kind_ == ProtocolKind::LeaderlessC ? fc_ : bk_;
                ds.w[i] = a * s.w[i] + bu + coupling * (couple * sig.varrho[i]) + innovation;
                ds.d[i] = kind_ == ProtocolKind::LeaderlessC ? quadratic_form(ctc_, sig.varrho[i])
                                                             : quadratic_form(*gains_.Omega, sig.varrho[i]);
                break;
            }
            case ProtocolKind::LFDiscontinuous:
            case ProtocolKind::LFContinuous: {
                const Vector hq = direction(i, bt_q_ * sig.eta[i]);
                const Vector hs = direction(i, bt_s_ * sig.varrho[i]);
                u = k * s.w[i] - beta_ * hq;
                const Vector innovation = *gains_.F * (c * s.v[i] - c * s.x[i]);
                ds.v[i] = a * s.v[i] + b * u + innovation;
                ds.w[i] = a * s.w[i] + b * (u - beta_ * hs) + coupling * (fc_ * sig.varrho[i]) + innovation;
                ds.d[i] = quadratic_form(ctc_, sig.varrho[i]);
                if (kind_ == ProtocolKind::LFContinuous) ds.d[i] -= gains_.phi[i] * (s.d[i] - 1.0);
                break;
            }
            case ProtocolKind::LFStateDiscontinuous:
            case ProtocolKind::LFStateContinuous: {
                u = coupling * (k * sig.xi[i]) - beta_ * direction(i, bt_pinv_ * sig.xi[i]);
                ds.d[i] = quadratic_form(*gains_.Omega, sig.xi[i]);
                if (kind_ == ProtocolKind::LFStateContinuous) ds.d[i] -= gains_.phi[i] * (s.d[i] - 1.0);
                break;
            }
        }
        ds.x[i] = a * s.x[i] + b * u;
    }
    return ev;
}

NetworkState NetworkDynamics::derivative(double t, const NetworkState& s) const {
    return evaluate(t, s).derivative;
}

ErrorState NetworkDynamics::errors(const NetworkState& s) const {
    const DerivedSignals sig = derive(s);
    ErrorState e;
    if (uses_observers(kind_)) {
        for (std::size_t i = 0; i < followers_; ++i) e.zeta.push_back(sig.eta[i] - sig.xi[i]);
        e.varrho = sig.varrho;
        e.e0 = sig.e0;
    } else {
        e.xi = sig.xi;
    }
    return e;
}

ErrorState NetworkDynamics::error_derivative(double t, const NetworkState& s) const {
    const DerivedSignals sig = derive(s);
    const ErrorState e = errors(s);
    const Matrix& a = model_.A;
    const Matrix& b = model_.B;
    const Matrix& l = is_leader_follower(kind_) ? *lap_.L1 : lap_.L;
    ErrorState de;

    if (!uses_observers(kind_)) {
        // ξ̇ = (I⊗A)ξ + (L1⊗B)(u − 1⊗u0)
        const auto ev = evaluate(t, s);
        for (std::size_t i = 0; i < followers_; ++i) {
            Vector acc = a * e.xi[i];
            for (std::size_t j = 0; j < followers_; ++j) {
                if (l(i, j) == 0.0) continue;
                acc.axpy(l(i, j), b * (ev.u[j] - ev.u0));
            }
            de.xi.push_back(std::move(acc));
        }
        return de;
    }

    const Matrix a_fc = a + *gains_.F * model_.C;
    const Matrix& couple = kind_ == ProtocolKind::LeaderlessB ? bk_ : fc_;
    Vector u0;
    std::vector<Vector> hs(followers_);
    if (is_leader_follower(kind_)) {
        u0 = leader_input(leader_, t, s.x0, model_.p());
        for (std::size_t i = 0; i < followers_; ++i) hs[i] = direction(i, bt_s_ * e.varrho[i]);
    }
    for (std::size_t i = 0; i < followers_; ++i) {
        de.zeta.push_back(a_fc * e.zeta[i]);
        Vector acc = a * e.varrho[i];
        for (std::size_t j = 0; j < followers_; ++j) {
            const double lij = l(i, j);
            if (lij == 0.0) continue;
            acc.axpy(lij * (s.d[j] + sig.rho[j]), couple * e.varrho[j]);
            if (is_leader_follower(kind_)) {
                acc.axpy(-lij, b * (beta_ * hs[j] - u0));
                acc.axpy(lij, fc_ * e.e0);
            }
        }
        de.varrho.push_back(std::move(acc));
    }
    if (is_leader_follower(kind_)) de.e0 = a_fc * e.e0;
    return de;
}

}  // namespace adcons
