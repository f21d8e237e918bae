#include "adcons/agents.hpp"

#include <cmath>

#include "adcons/error.hpp"

namespace adcons {

AgentModel::AgentModel(Matrix a, Matrix b, Matrix c) : A(std::move(a)), B(std::move(b)), C(std::move(c)) {
    validate();
}

void AgentModel::validate() const {
    if (!A.is_square() || A.rows() == 0) throw Error(ErrorKind::Dimension, "model: A must be square and nonempty");
    if (B.rows() != A.rows() || B.cols() == 0) {
        throw Error(ErrorKind::Dimension, "model: B must be " + std::to_string(A.rows()) + "xp with p >= 1");
    }
    if (C.cols() != A.rows() || C.rows() == 0) {
        throw Error(ErrorKind::Dimension, "model: C must be mx" + std::to_string(A.rows()) + " with m >= 1");
    }
    if (!A.all_finite() || !B.all_finite() || !C.all_finite()) {
        throw Error(ErrorKind::Input, "model: non-finite entry");
    }
}

Vector agent_derivative(const AgentModel& model, const Vector& x, const Vector& u) {
    if (x.size() != model.n() || u.size() != model.p()) {
        throw Error(ErrorKind::Dimension, "agent_derivative: state or input size mismatch");
    }
    return model.A * x + model.B * u;
}

void ChuaParams::validate() const {
    if (!(a > 0.0) || !(b > 0.0) || !(m01 < 0.0) || !(m02 < 0.0)) {
        throw Error(ErrorKind::Input, "Chua parameters need a > 0, b > 0, m01 < 0, m02 < 0");
    }
}

void SinusoidParams::validate() const {
    if (amplitude.empty()) throw Error(ErrorKind::Input, "sinusoid leader needs at least one channel");
    if (frequency.size() != amplitude.size() || phase.size() != amplitude.size()) {
        throw Error(ErrorKind::Input, "sinusoid amplitude/frequency/phase lengths differ");
    }
    for (std::size_t k = 0; k < amplitude.size(); ++k) {
        if (!std::isfinite(amplitude[k]) || !std::isfinite(frequency[k]) || !std::isfinite(phase[k])) {
            throw Error(ErrorKind::Input, "sinusoid parameters must be finite");
        }
    }
}

std::string LeaderSpec::name() const {
    struct Visitor {
        std::string operator()(const ZeroLeader&) const { return "zero"; }
        std::string operator()(const ChuaParams&) const { return "chua"; }
        std::string operator()(const SinusoidParams&) const { return "sinusoid"; }
    };
    return std::visit(Visitor{}, variant);
}

double chua_input(const ChuaParams& params, const Vector& x0) {
    if (x0.size() != 3) throw Error(ErrorKind::Dimension, "Chua leader state must have 3 components");
    const double x = x0[0];
    return 0.5 * params.a * (params.m01 - params.m02) * (std::abs(x + 1.0) - std::abs(x - 1.0));
}

double leader_omega(const LeaderSpec& spec) {
    struct Visitor {
        double operator()(const ZeroLeader&) const { return 0.0; }
        double operator()(const ChuaParams& c) const {
            c.validate();
            return c.a * std::abs(c.m01 - c.m02);
        }
        double operator()(const SinusoidParams& s) const {
            s.validate();
            double acc = 0.0;
            for (double amp : s.amplitude) acc += amp * amp;
            return std::sqrt(acc);
        }
    };
    return std::visit(Visitor{}, spec.variant);
}

Vector leader_input(const LeaderSpec& spec, double t, const Vector& x0, std::size_t p) {
    struct Visitor {
        double t;
        const Vector& x0;
        std::size_t p;
        Vector operator()(const ZeroLeader&) const { return Vector(p); }
        Vector operator()(const ChuaParams& c) const {
            if (p != 1) throw Error(ErrorKind::Dimension, "Chua leader drives a single input channel");
            return Vector{chua_input(c, x0)};
        }
        Vector operator()(const SinusoidParams& s) const {
            if (s.amplitude.size() != p) {
                throw Error(ErrorKind::Dimension, "sinusoid leader has " + std::to_string(s.amplitude.size()) +
                                                      " channels, model has " + std::to_string(p));
            }
            Vector u(p);
            for (std::size_t k = 0; k < p; ++k) u[k] = s.amplitude[k] * std::sin(s.frequency[k] * t + s.phase[k]);
            return u;
        }
    };
    return std::visit(Visitor{t, x0, p}, spec.variant);
}

AgentModel chua_model(const ChuaParams& params) {
    params.validate();
    Matrix a{{-params.a * (params.m01 + 1.0), params.a, 0.0}, {1.0, -1.0, 1.0}, {0.0, -params.b, 0.0}};
    Matrix b{{1.0}, {0.0}, {0.0}};
    return AgentModel(std::move(a), std::move(b), Matrix::identity(3));
}

}  // namespace adcons
