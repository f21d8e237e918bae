#include "adcons/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace adcons {

namespace {

double require_positive_definite(const Matrix& m, const char* name, const NumericPolicy& policy) {
    const double lmin = lambda_min(m.symmetric_part(), policy);
    if (!(lmin > 0.0)) {
        throw Error(ErrorKind::Certification, std::string(name) + " is not positive definite (λ_min = " +
                                                  format_double(lmin) + ")");
    }
    return lmin;
}

double max_diag(const Vector& v) { return *std::max_element(v.begin(), v.end()); }
double min_diag(const Vector& v) { return *std::min_element(v.begin(), v.end()); }

// ω a_i0 + (2N − 1) β per follower
std::vector<double> input_weights(const NetworkDynamics& dyn, double omega) {
    const std::size_t nf = dyn.followers();
    const double beta = dyn.gains().beta.value_or(0.0);
    std::vector<double> c(nf);
    for (std::size_t i = 0; i < nf; ++i) {
        const double ai0 = dyn.graph().has_edge(0, i + 1) ? 1.0 : 0.0;
        c[i] = omega * ai0 + (2.0 * static_cast<double>(nf) - 1.0) * beta;
    }
    return c;
}

}  // namespace

AnalysisConstants compute_constants(const NetworkDynamics& dyn, std::optional<double> omega,
                                    const NumericPolicy& policy) {
    const ProtocolKind kind = dyn.kind();
    const AgentModel& model = dyn.model();
    const GainSet& gains = dyn.gains();
    const Matrix& a = model.A;
    const Matrix& b = model.B;
    const Matrix& c = model.C;
    AnalysisConstants k;
    k.kind = kind;
    k.omega = omega.value_or(is_leader_follower(kind) ? leader_omega(dyn.leader()) : 0.0);
    if (!(k.omega >= 0.0)) throw Error(ErrorKind::Input, "omega must be nonnegative");

    if (!is_leader_follower(kind)) {
        const auto cert = leaderless_certificate(dyn.graph(), policy);
        k.r = cert.r;
        k.lambda2 = cert.lambda2;
        const double n = static_cast<double>(dyn.followers());
        k.alpha = 5.0 * n * max_diag(cert.r) / cert.lambda2;
        if (kind == ProtocolKind::LeaderlessC) {
            k.W = w_matrix(a, c, *gains.S);
            require_positive_definite(k.W, "W = -SA - AᵀS + 2CᵀC", policy);
        } else {
            const Matrix& pinv = dyn.p_inverse();
            k.X = -1.0 * (pinv * a + a.transpose() * pinv - 2.0 * *gains.Omega);
            require_positive_definite(k.X, "-(P⁻¹A + AᵀP⁻¹ - 2Ω)", policy);
        }
        return k;
    }

    const auto cert = leader_certificate(dyn.graph(), policy);
    k.g = cert.scaling.g;
    k.lambda0 = cert.scaling.lambda0;
    const double gmax = max_diag(k.g);
    const double gmin = min_diag(k.g);
    const std::size_t nf = dyn.followers();

    if (is_state_feedback(kind)) {
        k.alpha = 5.0 * gmax / (2.0 * k.lambda0);
        const Matrix& pinv = dyn.p_inverse();
        k.X = -1.0 * (pinv * a + a.transpose() * pinv - 2.0 * *gains.Omega);
        const double xmin = require_positive_definite(k.X, "-(P⁻¹A + AᵀP⁻¹ - 2Ω)", policy);
        if (kind == ProtocolKind::LFStateContinuous) {
            const double pmax = lambda_max(pinv, policy);
            k.delta_candidates.push_back(xmin / (2.0 * pmax));
            for (double phi : gains.phi) k.delta_candidates.push_back(phi / 4.0);
            k.delta = *std::min_element(k.delta_candidates.begin(), k.delta_candidates.end());
            const auto cw = input_weights(dyn, k.omega);
            for (std::size_t i = 0; i < nf; ++i) {
                const double ck = cw[i] * gains.kappa[i];
                k.Pi.push_back(k.g[i] * ck + (1.0 / gains.phi[i] + pmax / (2.0 * xmin)) * ck * ck * k.g[i]);
            }
        }
        return k;
    }

    const Matrix& s = *gains.S;
    const Matrix& q = *gains.Q;
    k.alpha = 15.0 * gmax / (4.0 * k.lambda0);
    k.W = w_matrix(a, c, s);
    const double wmin = require_positive_definite(k.W, "W = -SA - AᵀS + 2CᵀC", policy);
    const Matrix qb = q * b;
    k.Gamma = qb * qb.transpose();
    k.X = x_matrix(a, b, q);
    const double xmin = require_positive_definite(k.X, "X = -(QA + AᵀQ - 2Γ)", policy);

    const Matrix ctc = c.transpose() * c;
    const Matrix& l2 = *dyn.laplacian().L2;
    double l2gg = 0.0;  // L2ᵀ G G L2
    for (std::size_t i = 0; i < nf; ++i) l2gg += l2(i, 0) * k.g[i] * k.g[i] * l2(i, 0);
    k.gamma = 1.0 + 3.0 * lambda_max(ctc.symmetric_part(), policy) * l2gg / (k.lambda0 * wmin);

    const Matrix qfc = q * *gains.F * c;
    const double qfc_norm = spectral_norm(qfc, policy);
    const double gamma_max = lambda_max(k.Gamma.symmetric_part(), policy);
    k.gamma1 = 4.0 * qfc_norm * qfc_norm / (xmin * wmin);
    k.gamma2 = 4.0 * gamma_max * gamma_max / (xmin * gmin * wmin);

    if (kind == ProtocolKind::LFContinuous) {
        const double qmax = lambda_max(q, policy);
        const double smax = lambda_max(s, policy);
        k.delta_candidates = {xmin / (2.0 * qmax), wmin / (k.gamma1 * smax), wmin / (2.0 * k.gamma2 * smax)};
        for (double phi : gains.phi) k.delta_candidates.push_back(phi / 4.0);
        k.delta = *std::min_element(k.delta_candidates.begin(), k.delta_candidates.end());
        const auto cw = input_weights(dyn, k.omega);
        for (std::size_t i = 0; i < nf; ++i) {
            const double ck = cw[i] * gains.kappa[i];
            k.Pi.push_back(k.g[i] * ck + (1.0 / gains.phi[i] + smax / (2.0 * wmin)) * ck * ck * k.g[i]);
        }
    }
    return k;
}

ResidualBound residual_bound(const NetworkDynamics& dyn, const AnalysisConstants& k) {
    const ProtocolKind kind = dyn.kind();
    if (!is_continuous(kind)) {
        throw Error(ErrorKind::NotApplicable, "residual bound applies only to the continuous protocols, not " +
                                                  std::string(to_string(kind)));
    }
    if (k.kind != kind) throw Error(ErrorKind::Configuration, "constants were computed for a different protocol");
    const GainSet& gains = dyn.gains();
    const std::size_t nf = dyn.followers();
    const auto cw = input_weights(dyn, k.omega);
    ResidualBound rb;
    double sigma_sum = 0.0;
    double lin = 0.0;
    double quad = 0.0;
    double direct = 0.0;
    const double am1 = k.alpha - 1.0;
    if (kind == ProtocolKind::LFContinuous) {
        const double smax = lambda_max(*gains.S);
        const double wmin = lambda_min(k.W.symmetric_part());
        const double denom = lambda_min(*gains.Q) * k.delta;
        for (std::size_t i = 0; i < nf; ++i) {
            const double ck = cw[i] * gains.kappa[i];
            sigma_sum += gains.phi[i] * k.g[i];
            lin += k.g[i] * ck;
            quad += (1.0 / gains.phi[i] + smax / (2.0 * wmin)) * ck * ck * k.g[i];
            direct += ck;
        }
        rb.sigma_term = k.gamma2 * am1 * am1 / (2.0 * denom) * sigma_sum;
        rb.pi_linear_term = k.gamma2 * lin / denom;
        rb.pi_quadratic_term = k.gamma2 * quad / denom;
        rb.boundary_term = direct / denom;
    } else {
        const Matrix& pinv = dyn.p_inverse();
        const double pmax = lambda_max(pinv);
        const double xmin = lambda_min(k.X.symmetric_part());
        const double denom = lambda_min(pinv) * k.delta;
        for (std::size_t i = 0; i < nf; ++i) {
            const double ck = cw[i] * gains.kappa[i];
            sigma_sum += gains.phi[i] * k.g[i];
            lin += k.g[i] * ck;
            quad += (1.0 / gains.phi[i] + pmax / (2.0 * xmin)) * ck * ck * k.g[i];
        }
        rb.sigma_term = 0.5 * am1 * am1 * sigma_sum / denom;
        rb.pi_linear_term = lin / denom;
        rb.pi_quadratic_term = quad / denom;
        rb.boundary_term = 0.0;
    }
    rb.bound_sq = rb.sigma_term + rb.pi_linear_term + rb.pi_quadratic_term + rb.boundary_term;
    return rb;
}

ConsensusMetrics consensus_metrics(const SimulationTrace& trace, double eps, double window_fraction) {
    if (trace.records.empty()) throw Error(ErrorKind::Input, "consensus metrics of an empty trace");
    if (!(window_fraction > 0.0 && window_fraction <= 1.0)) {
        throw Error(ErrorKind::Input, "window fraction must be in (0, 1]");
    }
    const auto& recs = trace.records;
    const double t0 = recs.front().t;
    const double t1 = recs.back().t;
    ConsensusMetrics m;
    m.threshold = eps;
    m.window_start = t1 - window_fraction * (t1 - t0);
    const std::size_t nd = recs.front().state.d.size();
    m.d_final.assign(recs.back().state.d.begin(), recs.back().state.d.end());
    m.d_total_variation.assign(nd, 0.0);
    m.d_min = std::numeric_limits<double>::infinity();
    m.d_max = -std::numeric_limits<double>::infinity();

    double sq_sum = 0.0;
    std::size_t count = 0;
    const TraceRecord* prev = nullptr;
    for (const auto& r : recs) {
        for (double d : r.state.d) {
            m.d_min = std::min(m.d_min, d);
            m.d_max = std::max(m.d_max, d);
        }
        double smax = std::max(r.state.x0.max_abs(), r.state.v0.max_abs());
        for (const auto& v : r.state.x) smax = std::max(smax, v.max_abs());
        for (const auto& v : r.state.v) smax = std::max(smax, v.max_abs());
        for (const auto& v : r.state.w) smax = std::max(smax, v.max_abs());
        m.state_max_abs = std::max(m.state_max_abs, smax);
        if (r.t >= m.window_start) {
            m.sup_xi = std::max(m.sup_xi, r.xi_norm);
            sq_sum += r.xi_norm * r.xi_norm;
            ++count;
            if (prev != nullptr && prev->t >= m.window_start) {
                for (std::size_t i = 0; i < nd; ++i) m.d_total_variation[i] += std::abs(r.state.d[i] - prev->state.d[i]);
            }
        }
        prev = &r;
    }
    m.rms_xi = count ? std::sqrt(sq_sum / static_cast<double>(count)) : 0.0;
    m.sup_xi_sq = m.sup_xi * m.sup_xi;

    if (recs.back().xi_norm < eps) {
        double t_cross = recs.front().t;
        for (std::size_t k = recs.size(); k-- > 0;) {
            if (recs[k].xi_norm >= eps) {
                t_cross = recs[k + 1].t;
                break;
            }
        }
        m.time_to_threshold = t_cross;
    }
    return m;
}

std::string format_constants(const AnalysisConstants& c) {
    std::ostringstream os;
    os << "protocol " << to_string(c.kind) << '\n';
    os << "alpha " << format_double(c.alpha) << '\n';
    if (c.lambda2 > 0.0) os << "lambda2 " << format_double(c.lambda2) << '\n';
    if (c.lambda0 > 0.0) os << "lambda0 " << format_double(c.lambda0) << '\n';
    if (c.gamma > 0.0) os << "gamma " << format_double(c.gamma) << '\n';
    if (c.gamma1 > 0.0) os << "gamma1 " << format_double(c.gamma1) << '\n';
    if (c.gamma2 > 0.0) os << "gamma2 " << format_double(c.gamma2) << '\n';
    if (c.delta > 0.0) os << "delta " << format_double(c.delta) << '\n';
    if (!c.r.empty()) {
        os << "r";
        for (double v : c.r) os << ' ' << format_double(v);
        os << '\n';
    }
    if (!c.g.empty()) {
        os << "g";
        for (double v : c.g) os << ' ' << format_double(v);
        os << '\n';
    }
    for (std::size_t i = 0; i < c.Pi.size(); ++i) os << "Pi_" << i + 1 << ' ' << format_double(c.Pi[i]) << '\n';
    os << "omega " << format_double(c.omega) << '\n';
    return os.str();
}

std::string format_bound(const ResidualBound& b) {
    std::ostringstream os;
    os << "bound_sq " << format_double(b.bound_sq) << '\n'
       << "sigma_term " << format_double(b.sigma_term) << '\n'
       << "pi_linear_term " << format_double(b.pi_linear_term) << '\n'
       << "pi_quadratic_term " << format_double(b.pi_quadratic_term) << '\n'
       << "boundary_term " << format_double(b.boundary_term) << '\n';
    return os.str();
}

std::string format_metrics(const ConsensusMetrics& m) {
    std::ostringstream os;
    os << "window_start " << format_double(m.window_start) << '\n'
       << "sup_xi " << format_double(m.sup_xi) << '\n'
       << "rms_xi " << format_double(m.rms_xi) << '\n'
       << "sup_xi_sq " << format_double(m.sup_xi_sq) << '\n'
       << "d_min " << format_double(m.d_min) << '\n'
       << "d_max " << format_double(m.d_max) << '\n'
       << "state_max_abs " << format_double(m.state_max_abs) << '\n';
    for (std::size_t i = 0; i < m.d_final.size(); ++i) {
        os << "d_final_" << i << ' ' << format_double(m.d_final[i]) << "  tv " << format_double(m.d_total_variation[i])
           << '\n';
    }
    os << "time_to_threshold(" << format_double(m.threshold) << ") "
       << (m.time_to_threshold ? format_double(*m.time_to_threshold) : std::string("not reached")) << '\n';
    return os.str();
}

}  // namespace adcons
