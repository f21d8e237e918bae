#include "adcons/gains.hpp"

#include <cmath>
#include <sstream>

#include "adcons/error.hpp"

namespace adcons {

namespace {

Matrix riccati_or_synthesis(const Matrix& a, const Matrix& b, const char* what, const NumericPolicy& policy) {
    try {
        require_stabilizable(a, b, what, policy);
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::NotStabilizable) throw Error(ErrorKind::Synthesis, e.what());
        throw;
    }
    return solve_care(a, b, policy);
}

}  // namespace

OutputGains design_output_gains(const AgentModel& model, const NumericPolicy& policy) {
    model.validate();
    const Matrix& a = model.A;
    const Matrix sc = riccati_or_synthesis(a, model.B, "(A,B) stabilizability", policy);
    // detectability of (A,C) is stabilizability of (Aᵀ,Cᵀ)
    const Matrix pbar = riccati_or_synthesis(a.transpose(), model.C.transpose(), "(A,C) detectability", policy);
    OutputGains g;
    g.Pbar = pbar;
    g.S = inverse(pbar).symmetric_part();
    g.F = -1.0 * (pbar * model.C.transpose());
    g.K = -1.0 * (model.B.transpose() * sc);
    return g;
}

StateGains design_state_gains(const Matrix& a, const Matrix& b, const NumericPolicy& policy) {
    const Matrix sc = riccati_or_synthesis(a, b, "(A,B) stabilizability", policy);
    StateGains g;
    g.P = inverse(sc).symmetric_part();
    g.K = -1.0 * (b.transpose() * sc);
    g.Omega = g.K.transpose() * g.K;
    return g;
}

Matrix design_q(const Matrix& a, const Matrix& b, const Matrix& k, const NumericPolicy& policy) {
    if (!is_hurwitz(a + b * k, 0.0, policy)) {
        throw Error(ErrorKind::Synthesis, "design_q requires A + BK Hurwitz");
    }
    return riccati_or_synthesis(a, b, "(A,B) stabilizability", policy);
}

double choose_beta(double omega_bound, std::optional<double> override_value) {
    if (!std::isfinite(omega_bound) || omega_bound < 0.0) {
        throw Error(ErrorKind::Input, "leader input bound must be finite and nonnegative");
    }
    if (override_value && !std::isfinite(*override_value)) throw Error(ErrorKind::Input, "beta override is not finite");
    return override_value ? std::max(omega_bound, *override_value) : omega_bound;
}

GainSet design_all(const AgentModel& model, const LeaderSpec& leader, std::size_t followers,
                   const DesignOptions& options, const NumericPolicy& policy) {
    const OutputGains og = design_output_gains(model, policy);
    const StateGains sg = design_state_gains(model.A, model.B, policy);
    GainSet g;
    g.K = og.K;
    g.F = og.F;
    g.S = og.S;
    g.Pbar = og.Pbar;
    g.P = sg.P;
    g.Omega = sg.Omega;
    g.Q = design_q(model.A, model.B, og.K, policy);
    g.beta = choose_beta(leader_omega(leader), options.beta_override);
    g.kappa.assign(followers, options.kappa);
    g.phi.assign(followers, options.phi);
    return g;
}

Matrix x_matrix(const Matrix& a, const Matrix& b, const Matrix& q) {
    const Matrix qb = q * b;
    return -1.0 * (q * a + a.transpose() * q - 2.0 * (qb * qb.transpose()));
}

Matrix w_matrix(const Matrix& a, const Matrix& c, const Matrix& s) {
    return -1.0 * (s * a) - a.transpose() * s + 2.0 * (c.transpose() * c);
}

bool Certificate::all_pass() const {
    for (const auto& item : items)
        if (!item.pass) return false;
    return true;
}

std::string Certificate::report() const {
    std::ostringstream os;
    os.precision(6);
    for (const auto& item : items) {
        os << (item.pass ? "PASS " : "FAIL ") << item.name << "  margin=" << item.margin;
        if (!item.detail.empty()) os << "  (" << item.detail << ")";
        os << '\n';
    }
    os << (all_pass() ? "certificate: all pass" : "certificate: FAILED") << '\n';
    return os.str();
}

Certificate certify_gains(const AgentModel& model, const GainSet& gains, const NumericPolicy& policy) {
    model.validate();
    const Matrix& a = model.A;
    const Matrix& b = model.B;
    const Matrix& c = model.C;
    Certificate cert;
    auto add = [&](std::string name, double margin, std::string detail = {}) {
        cert.items.push_back({std::move(name), margin > 0.0, margin, std::move(detail)});
    };
    auto definite = [&](const std::string& name, const Matrix& m) {
        if (m.asymmetry() > 1e-8 * std::max(1.0, m.max_abs())) {
            add(name + " symmetric", -m.asymmetry());
            return;
        }
        add(name + " positive definite", lambda_min(m.symmetric_part(), policy));
    };
    auto symm = [](const Matrix& m) { return m.symmetric_part(); };

    if (gains.K) add("A+BK Hurwitz", -eigenvalues(a + b * *gains.K, policy).max_real());
    if (gains.F) add("A+FC Hurwitz", -eigenvalues(a + *gains.F * c, policy).max_real());
    if (gains.S) {
        definite("S", *gains.S);
        add("LMI AᵀS+SA-2CᵀC < 0", -lambda_max(symm(a.transpose() * *gains.S + *gains.S * a - 2.0 * (c.transpose() * c)), policy));
        if (gains.F) {
            const Matrix expect = -1.0 * solve(*gains.S, c.transpose());
            const double err = (expect - *gains.F).max_abs();
            add("F = -S⁻¹Cᵀ", 1e-6 * std::max(1.0, expect.max_abs()) - err, "max error " + std::to_string(err));
        }
    }
    if (gains.Pbar) definite("Pbar", *gains.Pbar);
    if (gains.P) {
        definite("P", *gains.P);
        add("LMI PAᵀ+AP-2BBᵀ < 0", -lambda_max(symm(*gains.P * a.transpose() + a * *gains.P - 2.0 * (b * b.transpose())), policy));
        const Matrix pinv_b = solve(*gains.P, b);  // P⁻¹B
        if (gains.Omega) {
            const Matrix expect = pinv_b * pinv_b.transpose();
            const double err = (expect - *gains.Omega).max_abs();
            add("Omega = P⁻¹BBᵀP⁻¹", 1e-6 * std::max(1.0, expect.max_abs()) - err, "max error " + std::to_string(err));
        }
        if (gains.K) {
            const Matrix expect = -1.0 * pinv_b.transpose();
            const double err = (expect - *gains.K).max_abs();
            add("K = -BᵀP⁻¹", 1e-6 * std::max(1.0, expect.max_abs()) - err, "max error " + std::to_string(err));
        }
    }
    if (gains.Omega) {
        if (gains.Omega->asymmetry() > 1e-8 * std::max(1.0, gains.Omega->max_abs())) {
            add("Omega symmetric", -gains.Omega->asymmetry());
        } else {
            const double lmin = lambda_min(symm(*gains.Omega), policy);
            add("Omega positive semidefinite", lmin + 1e-9 * std::max(1.0, gains.Omega->max_abs()));
        }
    }
    if (gains.Q) {
        definite("Q", *gains.Q);
        add("X = -(QA+AᵀQ-2QBBᵀQ) > 0", lambda_min(symm(x_matrix(a, b, *gains.Q)), policy));
    }
    if (gains.beta) cert.items.push_back({"beta >= 0", *gains.beta >= 0.0, *gains.beta, {}});
    for (std::size_t i = 0; i < gains.kappa.size(); ++i) add("kappa_" + std::to_string(i + 1) + " > 0", gains.kappa[i]);
    for (std::size_t i = 0; i < gains.phi.size(); ++i) add("phi_" + std::to_string(i + 1) + " > 0", gains.phi[i]);
    return cert;
}

}  // namespace adcons
