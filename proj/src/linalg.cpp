#include "adcons/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "adcons/error.hpp"

namespace adcons {

namespace {

void require_square(const Matrix& m, const char* what) {
    if (!m.is_square()) {
        throw Error(ErrorKind::Dimension, std::string(what) + ": expected square matrix, got " +
                                              std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
    }
}

std::string format_complex(std::complex<double> z) {
    std::ostringstream os;
    os.precision(6);
    os << z.real();
    if (z.imag() != 0.0) os << (z.imag() < 0 ? " - " : " + ") << std::abs(z.imag()) << "i";
    return os.str();
}

// Parlett–Reinsch balancing with radix-2 scaling; similarity-preserving.
void balance(Matrix& a) {
    const std::size_t n = a.rows();
    constexpr double radix = 2.0;
    constexpr double sqrdx = radix * radix;
    bool done = false;
    while (!done) {
        done = true;
        for (std::size_t i = 0; i < n; ++i) {
            double r = 0.0;
            double c = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i) continue;
                c += std::abs(a(j, i));
                r += std::abs(a(i, j));
            }
            if (c == 0.0 || r == 0.0) continue;
            double g = r / radix;
            double f = 1.0;
            const double s = c + r;
            while (c < g) {
                f *= radix;
                c *= sqrdx;
            }
            g = r * radix;
            while (c > g) {
                f /= radix;
                c /= sqrdx;
            }
            if ((c + r) / f < 0.95 * s) {
                done = false;
                g = 1.0 / f;
                for (std::size_t j = 0; j < n; ++j) a(i, j) *= g;
                for (std::size_t j = 0; j < n; ++j) a(j, i) *= f;
            }
        }
    }
}

// Householder reduction to upper Hessenberg form in place.
void hessenberg(Matrix& a) {
    const std::size_t n = a.rows();
    if (n < 3) return;
    std::vector<double> v(n);
    for (std::size_t k = 0; k + 2 < n; ++k) {
        double norm = 0.0;
        for (std::size_t i = k + 1; i < n; ++i) norm += a(i, k) * a(i, k);
        norm = std::sqrt(norm);
        if (norm == 0.0) continue;
        const double alpha = a(k + 1, k) > 0 ? -norm : norm;
        double vnorm = 0.0;
        for (std::size_t i = k + 1; i < n; ++i) {
            v[i] = a(i, k);
            if (i == k + 1) v[i] -= alpha;
            vnorm += v[i] * v[i];
        }
        if (vnorm == 0.0) continue;
        // Left: A <- (I - 2vvᵀ/vᵀv) A
        for (std::size_t j = k; j < n; ++j) {
            double s = 0.0;
            for (std::size_t i = k + 1; i < n; ++i) s += v[i] * a(i, j);
            s = 2.0 * s / vnorm;
            for (std::size_t i = k + 1; i < n; ++i) a(i, j) -= s * v[i];
        }
        // Right: A <- A (I - 2vvᵀ/vᵀv)
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0.0;
            for (std::size_t j = k + 1; j < n; ++j) s += a(i, j) * v[j];
            s = 2.0 * s / vnorm;
            for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= s * v[j];
        }
        a(k + 1, k) = alpha;
        for (std::size_t i = k + 2; i < n; ++i) a(i, k) = 0.0;
    }
}

double sign_of(double magnitude, double s) { return s >= 0.0 ? std::abs(magnitude) : -std::abs(magnitude); }

// Francis double-shift QR on an upper Hessenberg matrix (EISPACK hqr layout,
// 1-based indices through the accessor to keep the classic loop structure).
std::vector<std::complex<double>> hessenberg_qr(Matrix& h, int max_its) {
    const int n = static_cast<int>(h.rows());
    auto a = [&h](int i, int j) -> double& { return h(static_cast<std::size_t>(i - 1), static_cast<std::size_t>(j - 1)); };
    std::vector<double> wr(static_cast<std::size_t>(n) + 1, 0.0);
    std::vector<double> wi(static_cast<std::size_t>(n) + 1, 0.0);

    double anorm = 0.0;
    for (int i = 1; i <= n; ++i)
        for (int j = std::max(i - 1, 1); j <= n; ++j) anorm += std::abs(a(i, j));

    int nn = n;
    double t = 0.0;
    double p = 0.0, q = 0.0, r = 0.0, s = 0.0, w = 0.0, x = 0.0, y = 0.0, z = 0.0;
    while (nn >= 1) {
        int its = 0;
        int l = 0;
        do {
            for (l = nn; l >= 2; --l) {
                s = std::abs(a(l - 1, l - 1)) + std::abs(a(l, l));
                if (s == 0.0) s = anorm;
                if (std::abs(a(l, l - 1)) + s == s) {
                    a(l, l - 1) = 0.0;
                    break;
                }
            }
            x = a(nn, nn);
            if (l == nn) {
                wr[static_cast<std::size_t>(nn)] = x + t;
                wi[static_cast<std::size_t>(nn)] = 0.0;
                --nn;
            } else {
                y = a(nn - 1, nn - 1);
                w = a(nn, nn - 1) * a(nn - 1, nn);
                if (l == nn - 1) {
                    p = 0.5 * (y - x);
                    q = p * p + w;
                    z = std::sqrt(std::abs(q));
                    x += t;
                    const auto i1 = static_cast<std::size_t>(nn - 1);
                    const auto i2 = static_cast<std::size_t>(nn);
                    if (q >= 0.0) {
                        z = p + sign_of(z, p);
                        wr[i1] = wr[i2] = x + z;
                        if (z != 0.0) wr[i2] = x - w / z;
                        wi[i1] = wi[i2] = 0.0;
                    } else {
                        wr[i1] = wr[i2] = x + p;
                        wi[i1] = -z;
                        wi[i2] = z;
                    }
                    nn -= 2;
                } else {
                    if (its >= max_its) {
                        throw Error(ErrorKind::Convergence,
                                    "QR iteration did not converge after " + std::to_string(its) +
                                        " iterations on a " + std::to_string(n) + "x" + std::to_string(n) +
                                        " matrix");
                    }
                    if (its > 0 && its % 10 == 0) {
                        // exceptional shift
                        t += x;
                        for (int i = 1; i <= nn; ++i) a(i, i) -= x;
                        s = std::abs(a(nn, nn - 1)) + std::abs(a(nn - 1, nn - 2));
                        y = x = 0.75 * s;
                        w = -0.4375 * s * s;
                    }
                    ++its;
                    int m = nn - 2;
                    for (; m >= l; --m) {
                        z = a(m, m);
                        r = x - z;
                        s = y - z;
                        p = (r * s - w) / a(m + 1, m) + a(m, m + 1);
                        q = a(m + 1, m + 1) - z - r - s;
                        r = a(m + 2, m + 1);
                        s = std::abs(p) + std::abs(q) + std::abs(r);
                        p /= s;
                        q /= s;
                        r /= s;
                        if (m == l) break;
                        const double u = std::abs(a(m, m - 1)) * (std::abs(q) + std::abs(r));
                        const double v = std::abs(p) * (std::abs(a(m - 1, m - 1)) + std::abs(z) + std::abs(a(m + 1, m + 1)));
                        if (u + v == v) break;
                    }
                    for (int i = m + 2; i <= nn; ++i) {
                        a(i, i - 2) = 0.0;
                        if (i != m + 2) a(i, i - 3) = 0.0;
                    }
                    for (int k = m; k <= nn - 1; ++k) {
                        if (k != m) {
                            p = a(k, k - 1);
                            q = a(k + 1, k - 1);
                            r = 0.0;
                            if (k != nn - 1) r = a(k + 2, k - 1);
                            if ((x = std::abs(p) + std::abs(q) + std::abs(r)) != 0.0) {
                                p /= x;
                                q /= x;
                                r /= x;
                            }
                        }
                        if ((s = sign_of(std::sqrt(p * p + q * q + r * r), p)) != 0.0) {
                            if (k == m) {
                                if (l != m) a(k, k - 1) = -a(k, k - 1);
                            } else {
                                a(k, k - 1) = -s * x;
                            }
                            p += s;
                            x = p / s;
                            y = q / s;
                            z = r / s;
                            q /= p;
                            r /= p;
                            for (int j = k; j <= nn; ++j) {
                                p = a(k, j) + q * a(k + 1, j);
                                if (k != nn - 1) {
                                    p += r * a(k + 2, j);
                                    a(k + 2, j) -= p * z;
                                }
                                a(k + 1, j) -= p * y;
                                a(k, j) -= p * x;
                            }
                            const int mmin = nn < k + 3 ? nn : k + 3;
                            for (int i = l; i <= mmin; ++i) {
                                p = x * a(i, k) + y * a(i, k + 1);
                                if (k != nn - 1) {
                                    p += z * a(i, k + 2);
                                    a(i, k + 2) -= p * r;
                                }
                                a(i, k + 1) -= p * q;
                                a(i, k) -= p;
                            }
                        }
                    }
                }
            }
        } while (l < nn - 1);
    }

    std::vector<std::complex<double>> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 1; i <= n; ++i) out.emplace_back(wr[static_cast<std::size_t>(i)], wi[static_cast<std::size_t>(i)]);
    return out;
}

double relative_scale(const Matrix& m) { return std::max(1.0, m.max_abs()); }

}  // namespace

const NumericPolicy& default_policy() noexcept {
    static const NumericPolicy policy{};
    return policy;
}

double Spectrum::max_real() const {
    if (eigenvalues.empty()) throw Error(ErrorKind::Input, "empty spectrum");
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& z : eigenvalues) m = std::max(m, z.real());
    return m;
}

double Spectrum::min_real() const {
    if (eigenvalues.empty()) throw Error(ErrorKind::Input, "empty spectrum");
    double m = std::numeric_limits<double>::infinity();
    for (const auto& z : eigenvalues) m = std::min(m, z.real());
    return m;
}

std::size_t Spectrum::count_near_zero(double tol) const {
    return static_cast<std::size_t>(
        std::count_if(eigenvalues.begin(), eigenvalues.end(), [tol](auto z) { return std::abs(z) <= tol; }));
}

// ---------------------------------------------------------------------------
// LU

LuDecomposition::LuDecomposition(const Matrix& a) : n_(a.rows()), lu_(a), perm_(a.rows()) {
    require_square(a, "LU");
    for (std::size_t i = 0; i < n_; ++i) perm_[i] = i;
    const double scale = a.max_abs();
    min_pivot_ratio_ = n_ == 0 ? 1.0 : std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < n_; ++k) {
        std::size_t piv = k;
        double best = std::abs(lu_(k, k));
        for (std::size_t i = k + 1; i < n_; ++i) {
            if (std::abs(lu_(i, k)) > best) {
                best = std::abs(lu_(i, k));
                piv = i;
            }
        }
        min_pivot_ratio_ = std::min(min_pivot_ratio_, scale > 0.0 ? best / scale : 0.0);
        if (piv != k) {
            for (std::size_t j = 0; j < n_; ++j) std::swap(lu_(k, j), lu_(piv, j));
            std::swap(perm_[k], perm_[piv]);
            sign_ = -sign_;
        }
        if (best == 0.0) continue;
        const double inv = 1.0 / lu_(k, k);
        for (std::size_t i = k + 1; i < n_; ++i) {
            const double f = lu_(i, k) * inv;
            lu_(i, k) = f;
            if (f == 0.0) continue;
            for (std::size_t j = k + 1; j < n_; ++j) lu_(i, j) -= f * lu_(k, j);
        }
    }
}

bool LuDecomposition::singular(double rel_tol) const noexcept { return min_pivot_ratio_ <= rel_tol; }

Vector LuDecomposition::solve(const Vector& b) const {
    if (b.size() != n_) throw Error(ErrorKind::Dimension, "LU solve: rhs size mismatch");
    if (singular(0.0)) throw Error(ErrorKind::Rank, "LU solve on exactly singular matrix");
    Vector x(n_);
    for (std::size_t i = 0; i < n_; ++i) {
        double acc = b[perm_[i]];
        for (std::size_t j = 0; j < i; ++j) acc -= lu_(i, j) * x[j];
        x[i] = acc;
    }
    for (std::size_t i = n_; i-- > 0;) {
        double acc = x[i];
        for (std::size_t j = i + 1; j < n_; ++j) acc -= lu_(i, j) * x[j];
        x[i] = acc / lu_(i, i);
    }
    return x;
}

Matrix LuDecomposition::solve(const Matrix& b) const {
    if (b.rows() != n_) throw Error(ErrorKind::Dimension, "LU solve: rhs rows mismatch");
    Matrix x(n_, b.cols());
    for (std::size_t c = 0; c < b.cols(); ++c) {
        const Vector col = solve(b.col_vector(c));
        for (std::size_t r = 0; r < n_; ++r) x(r, c) = col[r];
    }
    return x;
}

double LuDecomposition::determinant() const {
    double d = sign_;
    for (std::size_t i = 0; i < n_; ++i) d *= lu_(i, i);
    return d;
}

Vector solve(const Matrix& a, const Vector& b) {
    const LuDecomposition lu(a);
    if (lu.singular()) throw Error(ErrorKind::Rank, "linear system is numerically singular");
    return lu.solve(b);
}

Matrix solve(const Matrix& a, const Matrix& b) {
    const LuDecomposition lu(a);
    if (lu.singular()) throw Error(ErrorKind::Rank, "linear system is numerically singular");
    return lu.solve(b);
}

Matrix inverse(const Matrix& a) { return solve(a, Matrix::identity(a.rows())); }

// ---------------------------------------------------------------------------
// Spectra

Spectrum eigenvalues(const Matrix& m, const NumericPolicy& policy) {
    require_square(m, "eigenvalues");
    if (m.rows() > policy.max_eigen_dimension) {
        throw Error(ErrorKind::Dimension, "eigenvalues: dimension " + std::to_string(m.rows()) +
                                              " exceeds cap " + std::to_string(policy.max_eigen_dimension));
    }
    if (!m.all_finite()) throw Error(ErrorKind::Input, "eigenvalues: non-finite entry");
    Spectrum spec;
    if (m.rows() == 0) return spec;
    Matrix h = m;
    balance(h);
    hessenberg(h);
    spec.eigenvalues = hessenberg_qr(h, policy.qr_iterations_per_eigenvalue);
    std::sort(spec.eigenvalues.begin(), spec.eigenvalues.end(), [](auto a, auto b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    return spec;
}

SymmetricEigen symmetric_eigen(const Matrix& m, const NumericPolicy& policy) {
    require_square(m, "symmetric_eigen");
    if (m.asymmetry() > policy.symmetry * relative_scale(m)) {
        throw Error(ErrorKind::Shape, "matrix is not symmetric (asymmetry " + std::to_string(m.asymmetry()) + ")");
    }
    const std::size_t n = m.rows();
    Matrix a = m.symmetric_part();
    Matrix v = Matrix::identity(n);
    for (int sweep = 0;; ++sweep) {
        double off = 0.0;
        double total = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = 0; q < n; ++q) {
                total += a(p, q) * a(p, q);
                if (p != q) off += a(p, q) * a(p, q);
            }
        if (off <= 1e-30 * total || off == 0.0) break;
        if (sweep >= policy.jacobi_max_sweeps) {
            throw Error(ErrorKind::Convergence, "Jacobi eigenvalue sweeps did not converge");
        }
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p);
                    const double vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&a](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });
    SymmetricEigen out{std::vector<double>(n), Matrix(n, n)};
    for (std::size_t k = 0; k < n; ++k) {
        out.values[k] = a(order[k], order[k]);
        for (std::size_t r = 0; r < n; ++r) out.vectors(r, k) = v(r, order[k]);
    }
    return out;
}

std::vector<double> symmetric_eigenvalues(const Matrix& m, const NumericPolicy& policy) {
    return symmetric_eigen(m, policy).values;
}

double lambda_min(const Matrix& symmetric, const NumericPolicy& policy) {
    const auto values = symmetric_eigenvalues(symmetric, policy);
    if (values.empty()) throw Error(ErrorKind::Input, "lambda_min of empty matrix");
    return values.front();
}

double lambda_max(const Matrix& symmetric, const NumericPolicy& policy) {
    const auto values = symmetric_eigenvalues(symmetric, policy);
    if (values.empty()) throw Error(ErrorKind::Input, "lambda_max of empty matrix");
    return values.back();
}

double spectral_norm(const Matrix& m, const NumericPolicy& policy) {
    if (m.empty()) return 0.0;
    const Matrix gram = m.transpose() * m;
    return std::sqrt(std::max(0.0, lambda_max(gram.symmetric_part(), policy)));
}

bool is_hurwitz(const Matrix& m, double margin, const NumericPolicy& policy) {
    if (margin < 0.0) throw Error(ErrorKind::Input, "Hurwitz margin must be nonnegative");
    return eigenvalues(m, policy).max_real() < -margin;
}

bool is_positive_definite(const Matrix& m, double tol, const NumericPolicy& policy) {
    require_square(m, "is_positive_definite");
    if (m.asymmetry() > policy.symmetry * relative_scale(m)) {
        throw Error(ErrorKind::Shape, "is_positive_definite: asymmetry " + std::to_string(m.asymmetry()) +
                                          " exceeds tolerance");
    }
    return lambda_min(m.symmetric_part(), policy) > tol;
}

// ---------------------------------------------------------------------------
// Lyapunov / Riccati

Matrix solve_lyapunov(const Matrix& a, const Matrix& q, const NumericPolicy& policy) {
    require_square(a, "solve_lyapunov");
    require_square(q, "solve_lyapunov rhs");
    const std::size_t n = a.rows();
    if (q.rows() != n) throw Error(ErrorKind::Dimension, "solve_lyapunov: A and Q sizes differ");
    if (n > policy.max_lyapunov_dimension) {
        throw Error(ErrorKind::Dimension, "solve_lyapunov: dimension " + std::to_string(n) + " exceeds cap " +
                                              std::to_string(policy.max_lyapunov_dimension));
    }
    // Row-major vec: vec(AᵀX) = (Aᵀ⊗I)vec X, vec(XA) = (I⊗Aᵀ)vec X.
    const Matrix at = a.transpose();
    const Matrix eye = Matrix::identity(n);
    const Matrix big = kron(at, eye) + kron(eye, at);
    // The operator's eigenvalues are λi + λj; pivots alone misjudge strongly non-normal A.
    const auto spec = eigenvalues(a, policy).eigenvalues;
    double radius = 0.0;
    for (const auto& z : spec) radius = std::max(radius, std::abs(z));
    for (const auto& zi : spec)
        for (const auto& zj : spec)
            if (std::abs(zi + zj) <= 1e-12 * std::max(1.0, radius)) {
                throw Error(ErrorKind::SpectrumConflict,
                            "Lyapunov operator is singular: A and -A share an eigenvalue");
            }
    const LuDecomposition lu(big);
    if (lu.singular(0.0)) {
        throw Error(ErrorKind::SpectrumConflict, "Lyapunov operator is numerically singular");
    }
    Vector rhs(n * n);
    for (std::size_t i = 0; i < n * n; ++i) rhs[i] = -q.data()[i];
    const Vector sol = lu.solve(rhs);
    Matrix x(n, n, sol.values());
    if (q.asymmetry() <= policy.symmetry * relative_scale(q)) x = x.symmetric_part();

    const Matrix res = at * x + x * a + q;
    const double allowed = policy.lyapunov_residual * (a.frobenius_norm() * x.frobenius_norm() + q.frobenius_norm());
    if (!(res.frobenius_norm() <= allowed)) {
        throw Error(ErrorKind::SpectrumConflict,
                    "Lyapunov solve is ill-conditioned: residual " + std::to_string(res.frobenius_norm()));
    }
    return x;
}

Matrix controllable_basis(const Matrix& a, const Matrix& b, const NumericPolicy& policy) {
    require_square(a, "controllable_basis");
    const std::size_t n = a.rows();
    if (b.rows() != n) throw Error(ErrorKind::Dimension, "controllable_basis: B rows differ from A");
    const double tol = policy.rank_tolerance * std::max({1.0, a.frobenius_norm(), b.frobenius_norm()});

    std::vector<Vector> basis;
    auto try_add = [&](Vector v) -> bool {
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& u : basis) v.axpy(-u.dot(v), u);
        const double nv = v.norm();
        if (nv <= tol) return false;
        v *= 1.0 / nv;
        basis.push_back(std::move(v));
        return true;
    };
    std::vector<Vector> frontier;
    for (std::size_t c = 0; c < b.cols(); ++c) {
        if (try_add(b.col_vector(c))) frontier.push_back(basis.back());
    }
    while (!frontier.empty() && basis.size() < n) {
        std::vector<Vector> next;
        for (const auto& f : frontier) {
            if (try_add(a * f)) next.push_back(basis.back());
            if (basis.size() == n) break;
        }
        frontier = std::move(next);
    }
    Matrix v(n, basis.size());
    for (std::size_t c = 0; c < basis.size(); ++c)
        for (std::size_t r = 0; r < n; ++r) v(r, c) = basis[c][r];
    return v;
}

namespace {

// Orthonormal complement of the columns of v.
Matrix orthogonal_complement(const Matrix& v) {
    const std::size_t n = v.rows();
    std::vector<Vector> basis;
    for (std::size_t c = 0; c < v.cols(); ++c) basis.push_back(v.col_vector(c));
    const std::size_t start = basis.size();
    for (std::size_t e = 0; e < n && basis.size() < n; ++e) {
        Vector cand(n);
        cand[e] = 1.0;
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& u : basis) cand.axpy(-u.dot(cand), u);
        const double nv = cand.norm();
        if (nv < 1e-8) continue;
        cand *= 1.0 / nv;
        basis.push_back(std::move(cand));
    }
    Matrix u(n, basis.size() - start);
    for (std::size_t c = start; c < basis.size(); ++c)
        for (std::size_t r = 0; r < n; ++r) u(r, c - start) = basis[c][r];
    return u;
}

Matrix bass_controllable(const Matrix& a, const Matrix& b, const NumericPolicy& policy) {
    const std::size_t n = a.rows();
    // Closed-loop eigenvalues land on Re = -shift; the smallest admissible shift keeps the gain small.
    const double shift = std::max(0.0, -eigenvalues(a, policy).min_real()) + 1.0;
    const Matrix shifted = a + shift * Matrix::identity(n);
    // (A+sI)X + X(A+sI)ᵀ = 2BBᵀ  <=>  Mᵀ X + X M + 2BBᵀ = 0 with M = -(A+sI)ᵀ
    const Matrix x = solve_lyapunov(-1.0 * shifted.transpose(), 2.0 * (b * b.transpose()), policy);
    const LuDecomposition lu(x);
    if (lu.singular(1e-12)) {
        throw Error(ErrorKind::NotStabilizable, "Bass Gramian is singular; pair is not controllable");
    }
    return lu.solve(b).transpose();  // Bᵀ X⁻¹ (X symmetric)
}

}  // namespace

void require_stabilizable(const Matrix& a, const Matrix& b, const char* what, const NumericPolicy& policy) {
    const Matrix v = controllable_basis(a, b, policy);
    if (v.cols() == a.rows()) return;
    const Matrix u = orthogonal_complement(v);
    const Matrix au = u.transpose() * a * u;
    const Spectrum spec = eigenvalues(au, policy);
    for (const auto& z : spec.eigenvalues) {
        if (z.real() >= -policy.hurwitz_margin) {
            throw Error(ErrorKind::NotStabilizable, std::string(what) + " has uncontrollable mode λ = " +
                                                        format_complex(z) + " with nonnegative real part");
        }
    }
}

Matrix stabilizing_gain_bass(const Matrix& a, const Matrix& b, const NumericPolicy& policy) {
    require_square(a, "stabilizing_gain_bass");
    const std::size_t n = a.rows();
    if (b.rows() != n) throw Error(ErrorKind::Dimension, "stabilizing_gain_bass: B rows differ from A");
    require_stabilizable(a, b, "(A,B)", policy);
    const Matrix v = controllable_basis(a, b, policy);
    if (v.cols() == n) return bass_controllable(a, b, policy);
    if (v.cols() == 0) return Matrix(b.cols(), n);
    const Matrix vt = v.transpose();
    const Matrix kc = bass_controllable(vt * a * v, vt * b, policy);
    return kc * vt;
}

double care_residual(const Matrix& a, const Matrix& b, const Matrix& s) {
    const Matrix sb = s * b;
    const Matrix res = a.transpose() * s + s * a + Matrix::identity(a.rows()) - sb * sb.transpose();
    return res.frobenius_norm();
}

CareSolution solve_care_detailed(const Matrix& a, const Matrix& b, const NumericPolicy& policy) {
    require_square(a, "solve_care");
    const std::size_t n = a.rows();
    if (b.rows() != n) throw Error(ErrorKind::Dimension, "solve_care: B rows differ from A");
    Matrix k = stabilizing_gain_bass(a, b, policy);
    const Matrix bt = b.transpose();
    CareSolution out;
    for (int it = 1; it <= policy.kleinman_max_iterations; ++it) {
        const Matrix ak = a - b * k;
        Matrix s = solve_lyapunov(ak, Matrix::identity(n) + k.transpose() * k, policy);
        s = s.symmetric_part();
        out.iterate_abscissae.push_back(eigenvalues(a - b * (bt * s), policy).max_real());
        out.S = s;
        out.iterations = it;
        out.residual = care_residual(a, b, s);
        if (out.residual <= policy.riccati_residual) {
            // one more Newton step is nearly free at this point and usually gains several digits
            try {
                const Matrix k2 = bt * s;
                const Matrix s2 = solve_lyapunov(a - b * k2, Matrix::identity(n) + k2.transpose() * k2, policy).symmetric_part();
                const double r2 = care_residual(a, b, s2);
                if (r2 < out.residual) {
                    out.S = s2;
                    out.residual = r2;
                }
            } catch (const Error&) {
            }
            return out;
        }
        // rounding floor of the residual evaluation for badly conditioned pairs
        const Matrix sb = s * b;
        const double floor_scale = 1.0 + 2.0 * a.frobenius_norm() * s.frobenius_norm() + sb.frobenius_norm() * sb.frobenius_norm();
        if (out.residual <= 1e3 * std::numeric_limits<double>::epsilon() * floor_scale) return out;
        k = bt * s;
    }
    throw Error(ErrorKind::Convergence, "Kleinman iteration did not converge after " +
                                            std::to_string(out.iterations) + " iterations; final residual " +
                                            std::to_string(out.residual));
}

Matrix solve_care(const Matrix& a, const Matrix& b, const NumericPolicy& policy) {
    return solve_care_detailed(a, b, policy).S;
}

}  // namespace adcons
