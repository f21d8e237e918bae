#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "adcons/matrix.hpp"

namespace adcons {

/// Tolerances shared by every numeric routine. Tests tighten or loosen them
/// in one place instead of threading literals through call sites.
struct NumericPolicy {
    double eig_backward_error = 1e-9;
    double riccati_residual = 1e-8;
    double lyapunov_residual = 1e-9;
    double symmetry = 1e-10;
    double hurwitz_margin = 0.0;
    double zero_cluster = 1e-7;
    double rank_tolerance = 1e-10;
    int qr_iterations_per_eigenvalue = 60;
    int kleinman_max_iterations = 100;
    int jacobi_max_sweeps = 100;
    std::size_t max_eigen_dimension = 64;
    std::size_t max_lyapunov_dimension = 32;
};

[[nodiscard]] const NumericPolicy& default_policy() noexcept;

/// Eigenvalues sorted by ascending real part, then imaginary part.
struct Spectrum {
    std::vector<std::complex<double>> eigenvalues;

    [[nodiscard]] std::size_t size() const noexcept { return eigenvalues.size(); }
    [[nodiscard]] double max_real() const;
    [[nodiscard]] double min_real() const;
    /// Number of eigenvalues with modulus <= tol.
    [[nodiscard]] std::size_t count_near_zero(double tol) const;
};

// ---------------------------------------------------------------------------
// Dense factorizations

/// LU with partial pivoting, PA = LU.
class LuDecomposition {
public:
    explicit LuDecomposition(const Matrix& a);

    /// True when some pivot fell below rel_tol * max|a|.
    [[nodiscard]] bool singular(double rel_tol = 1e-13) const noexcept;
    [[nodiscard]] double min_pivot_ratio() const noexcept { return min_pivot_ratio_; }
    [[nodiscard]] Vector solve(const Vector& b) const;
    [[nodiscard]] Matrix solve(const Matrix& b) const;
    [[nodiscard]] double determinant() const;

private:
    std::size_t n_ = 0;
    Matrix lu_;
    std::vector<std::size_t> perm_;
    int sign_ = 1;
    double min_pivot_ratio_ = 0.0;
};

/// Solves a x = b; throws Rank on a numerically singular system.
[[nodiscard]] Vector solve(const Matrix& a, const Vector& b);
[[nodiscard]] Matrix solve(const Matrix& a, const Matrix& b);
[[nodiscard]] Matrix inverse(const Matrix& a);

// ---------------------------------------------------------------------------
// Spectra

/// All eigenvalues of a square matrix (balancing, Householder Hessenberg
/// reduction, Francis double-shift QR).
[[nodiscard]] Spectrum eigenvalues(const Matrix& m, const NumericPolicy& policy = default_policy());

/// Ascending eigenvalues of a symmetric matrix (cyclic Jacobi).
[[nodiscard]] std::vector<double> symmetric_eigenvalues(const Matrix& m,
                                                        const NumericPolicy& policy = default_policy());

/// Eigenpairs of a symmetric matrix; columns of `vectors` are orthonormal.
struct SymmetricEigen {
    std::vector<double> values;
    Matrix vectors;
};
[[nodiscard]] SymmetricEigen symmetric_eigen(const Matrix& m, const NumericPolicy& policy = default_policy());

[[nodiscard]] double lambda_min(const Matrix& symmetric, const NumericPolicy& policy = default_policy());
[[nodiscard]] double lambda_max(const Matrix& symmetric, const NumericPolicy& policy = default_policy());

/// Largest singular value.
[[nodiscard]] double spectral_norm(const Matrix& m, const NumericPolicy& policy = default_policy());

[[nodiscard]] bool is_hurwitz(const Matrix& m, double margin = 0.0,
                              const NumericPolicy& policy = default_policy());

/// Symmetrizes (after checking asymmetry <= policy.symmetry) and tests
/// lambda_min > tol.
[[nodiscard]] bool is_positive_definite(const Matrix& m, double tol = 0.0,
                                        const NumericPolicy& policy = default_policy());

// ---------------------------------------------------------------------------
// Lyapunov / Riccati

/// Solves Aᵀ X + X A + Q = 0 through the Kronecker-vectorized system.
[[nodiscard]] Matrix solve_lyapunov(const Matrix& a, const Matrix& q,
                                    const NumericPolicy& policy = default_policy());

/// Orthonormal basis (columns) of the controllable subspace of (A, B).
[[nodiscard]] Matrix controllable_basis(const Matrix& a, const Matrix& b,
                                        const NumericPolicy& policy = default_policy());

/// Throws NotStabilizable naming the first uncontrollable mode with
/// nonnegative real part.
void require_stabilizable(const Matrix& a, const Matrix& b, const char* what = "(A,B)",
                          const NumericPolicy& policy = default_policy());

/// K0 with A - B K0 Hurwitz. Bass construction on the controllable part:
/// (Ac + sI) X + X (Ac + sI)ᵀ = 2 Bc Bcᵀ with s > ||Ac||_F, K0 = Bcᵀ X⁻¹.
[[nodiscard]] Matrix stabilizing_gain_bass(const Matrix& a, const Matrix& b,
                                           const NumericPolicy& policy = default_policy());

struct CareSolution {
    Matrix S;
    int iterations = 0;
    double residual = 0.0;
    /// max Re λ(A − B Bᵀ S_k) for each Newton iterate S_k.
    std::vector<double> iterate_abscissae;
};

/// Stabilizing solution of Aᵀ S + S A + I − S B Bᵀ S = 0 by Kleinman–Newton.
[[nodiscard]] CareSolution solve_care_detailed(const Matrix& a, const Matrix& b,
                                               const NumericPolicy& policy = default_policy());
[[nodiscard]] Matrix solve_care(const Matrix& a, const Matrix& b,
                                const NumericPolicy& policy = default_policy());

/// ||Aᵀ S + S A + I − S B Bᵀ S||_F
[[nodiscard]] double care_residual(const Matrix& a, const Matrix& b, const Matrix& s);

}  // namespace adcons
