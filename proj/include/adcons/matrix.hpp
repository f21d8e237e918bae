#pragma once

#include <cstddef>
#include <initializer_list>
#include <iosfwd>
#include <span>
#include <vector>

namespace adcons {

/// Dense real vector.
class Vector {
public:
    Vector() = default;
    explicit Vector(std::size_t size, double fill = 0.0) : values_(size, fill) {}
    explicit Vector(std::vector<double> values);
    Vector(std::initializer_list<double> values);

    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    [[nodiscard]] bool empty() const noexcept { return values_.empty(); }

    double& operator[](std::size_t i) noexcept { return values_[i]; }
    double operator[](std::size_t i) const noexcept { return values_[i]; }

    [[nodiscard]] std::span<double> span() noexcept { return values_; }
    [[nodiscard]] std::span<const double> span() const noexcept { return values_; }
    [[nodiscard]] const std::vector<double>& values() const noexcept { return values_; }

    auto begin() noexcept { return values_.begin(); }
    auto end() noexcept { return values_.end(); }
    auto begin() const noexcept { return values_.begin(); }
    auto end() const noexcept { return values_.end(); }

    Vector& operator+=(const Vector& other);
    Vector& operator-=(const Vector& other);
    Vector& operator*=(double s) noexcept;

    /// this += s * other
    Vector& axpy(double s, const Vector& other);

    [[nodiscard]] double dot(const Vector& other) const;
    [[nodiscard]] double norm() const noexcept;
    [[nodiscard]] double squared_norm() const noexcept;
    [[nodiscard]] double max_abs() const noexcept;
    [[nodiscard]] bool all_finite() const noexcept;

    static Vector ones(std::size_t n) { return Vector(n, 1.0); }

    friend bool operator==(const Vector&, const Vector&) = default;

private:
    std::vector<double> values_;
};

[[nodiscard]] Vector operator+(Vector a, const Vector& b);
[[nodiscard]] Vector operator-(Vector a, const Vector& b);
[[nodiscard]] Vector operator-(Vector a);
[[nodiscard]] Vector operator*(double s, Vector a);
[[nodiscard]] Vector operator*(Vector a, double s);

/// Dense row-major real matrix. Constructors that take explicit entries
/// reject NaN/Inf; arithmetic results are not re-checked.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> row_major);
    Matrix(std::initializer_list<std::initializer_list<double>> rows);

    static Matrix identity(std::size_t n);
    static Matrix diagonal(const Vector& d);
    static Matrix column(const Vector& v);
    static Matrix row(const Vector& v);

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
    [[nodiscard]] bool is_square() const noexcept { return rows_ == cols_; }
    [[nodiscard]] bool empty() const noexcept { return data_.empty(); }

    double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

    [[nodiscard]] std::span<double> data() noexcept { return data_; }
    [[nodiscard]] std::span<const double> data() const noexcept { return data_; }

    [[nodiscard]] Matrix transpose() const;
    [[nodiscard]] Matrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const;
    [[nodiscard]] Vector row_vector(std::size_t r) const;
    [[nodiscard]] Vector col_vector(std::size_t c) const;
    [[nodiscard]] Vector diagonal_vector() const;

    /// (M + Mᵀ)/2
    [[nodiscard]] Matrix symmetric_part() const;
    [[nodiscard]] double asymmetry() const;
    [[nodiscard]] double trace() const;
    [[nodiscard]] double frobenius_norm() const noexcept;
    [[nodiscard]] double max_abs() const noexcept;
    [[nodiscard]] bool all_finite() const noexcept;

    Matrix& operator+=(const Matrix& other);
    Matrix& operator-=(const Matrix& other);
    Matrix& operator*=(double s) noexcept;

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

[[nodiscard]] Matrix operator+(Matrix a, const Matrix& b);
[[nodiscard]] Matrix operator-(Matrix a, const Matrix& b);
[[nodiscard]] Matrix operator-(Matrix a);
[[nodiscard]] Matrix operator*(double s, Matrix a);
[[nodiscard]] Matrix operator*(Matrix a, double s);
[[nodiscard]] Matrix operator*(const Matrix& a, const Matrix& b);
[[nodiscard]] Vector operator*(const Matrix& a, const Vector& x);

/// Kronecker product a ⊗ b.
[[nodiscard]] Matrix kron(const Matrix& a, const Matrix& b);

/// xᵀ M x
[[nodiscard]] double quadratic_form(const Matrix& m, const Vector& x);

/// Outer product a bᵀ.
[[nodiscard]] Matrix outer(const Vector& a, const Vector& b);

std::ostream& operator<<(std::ostream& os, const Matrix& m);
std::ostream& operator<<(std::ostream& os, const Vector& v);

}  // namespace adcons
