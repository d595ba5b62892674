#pragma once

// Small dense complex linear algebra for two-qubit operators.
//
// Tensor ordering is fixed everywhere: the left factor of kron() is arm A,
// the right factor is arm B, and the two-qubit basis is (jj, jk, kj, kk).

#include <array>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include <json.hpp>

namespace nlw {

using Complex = std::complex<double>;

namespace tol {
inline constexpr double kAlgebraic = 1e-12;   // exact identities
inline constexpr double kEigenResidual = 1e-10;
inline constexpr double kPositivity = 1e-10;  // density eigenvalues >= -kPositivity
inline constexpr double kImaginaryTrace = 1e-10;
inline constexpr double kEigenGap = 1e-8;
}  // namespace tol

class Ket {
  public:
    Ket() = default;
    explicit Ket(std::vector<Complex> amplitudes);
    Ket(std::initializer_list<Complex> amplitudes);

    static Ket basis(std::size_t dim, std::size_t index);

    [[nodiscard]] std::size_t dim() const noexcept { return amps_.size(); }
    [[nodiscard]] const Complex& operator[](std::size_t i) const { return amps_[i]; }
    [[nodiscard]] Complex& operator[](std::size_t i) { return amps_[i]; }
    [[nodiscard]] std::span<const Complex> amplitudes() const noexcept { return amps_; }

    [[nodiscard]] double norm() const;
    /// Unit-norm copy; throws DomainError on a zero vector.
    [[nodiscard]] Ket normalized() const;
    [[nodiscard]] bool is_normalized(double tolerance = tol::kAlgebraic) const;

    /// <this|other>
    [[nodiscard]] Complex inner(const Ket& other) const;

    /// Copy whose first amplitude with modulus above `threshold` is real and positive.
    [[nodiscard]] Ket phase_canonical(double threshold = 1e-10) const;

  private:
    std::vector<Complex> amps_;
};

[[nodiscard]] Ket kron(const Ket& a, const Ket& b);

class Matrix {
  public:
    Matrix() = default;
    /// Zero matrix.
    explicit Matrix(std::size_t dim);
    /// Row-major nested list; rejects ragged or non-finite input.
    Matrix(std::initializer_list<std::initializer_list<Complex>> rows);
    Matrix(std::size_t dim, std::vector<Complex> row_major);

    static Matrix identity(std::size_t dim);
    static Matrix diagonal(std::span<const Complex> values);
    static Matrix diagonal(std::initializer_list<Complex> values);
    /// |a><b|
    static Matrix outer(const Ket& a, const Ket& b);
    /// |a><a|
    static Matrix projector(const Ket& a);

    [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
    [[nodiscard]] const Complex& operator()(std::size_t row, std::size_t col) const {
        return data_[row * dim_ + col];
    }
    [[nodiscard]] Complex& operator()(std::size_t row, std::size_t col) {
        return data_[row * dim_ + col];
    }
    [[nodiscard]] std::span<const Complex> row_major() const noexcept { return data_; }

    [[nodiscard]] Matrix adjoint() const;
    [[nodiscard]] Matrix transpose() const;
    [[nodiscard]] Complex trace() const;
    [[nodiscard]] double frobenius_norm() const;
    [[nodiscard]] double max_abs() const;
    [[nodiscard]] bool is_finite() const;
    /// Entrywise M == M^dagger, tolerance scaled by max(1, max|m_ij|).
    [[nodiscard]] bool is_hermitian(double tolerance = tol::kAlgebraic) const;
    [[nodiscard]] bool is_unitary(double tolerance = tol::kEigenResidual) const;
    [[nodiscard]] bool is_diagonal(double tolerance = tol::kAlgebraic) const;
    /// Average with the adjoint.
    [[nodiscard]] Matrix hermitian_part() const;

    Matrix& operator+=(const Matrix& rhs);
    Matrix& operator-=(const Matrix& rhs);
    Matrix& operator*=(Complex scale);

    friend Matrix operator+(Matrix lhs, const Matrix& rhs) { return lhs += rhs; }
    friend Matrix operator-(Matrix lhs, const Matrix& rhs) { return lhs -= rhs; }
    friend Matrix operator*(Matrix lhs, Complex scale) { return lhs *= scale; }
    friend Matrix operator*(Complex scale, Matrix rhs) { return rhs *= scale; }
    friend Matrix operator*(const Matrix& lhs, const Matrix& rhs);
    friend Ket operator*(const Matrix& lhs, const Ket& rhs);

  private:
    std::size_t dim_ = 0;
    std::vector<Complex> data_;
};

/// Largest entrywise modulus of a - b; throws DimensionError on mismatch.
[[nodiscard]] double max_abs_diff(const Matrix& a, const Matrix& b);

/// Entry ((i*db+p),(j*db+q)) = a(i,j) * b(p,q).
[[nodiscard]] Matrix kron(const Matrix& a, const Matrix& b);

/// Transpose of the arm-B indices of a 4x4 operator.
[[nodiscard]] Matrix partial_transpose_b(const Matrix& m);

/// Tr(a b) without any Hermiticity assumption.
[[nodiscard]] Complex trace_product(const Matrix& a, const Matrix& b);

namespace pauli {
[[nodiscard]] Matrix identity();
[[nodiscard]] Matrix x();
[[nodiscard]] Matrix y();
[[nodiscard]] Matrix z();
/// Pauli by index: 0 = I, 1 = X, 2 = Y, 3 = Z.
[[nodiscard]] Matrix by_index(int index);
/// Coefficients c[4a + b] with m = sum c[4a + b] sigma_a (x) sigma_b, for a 4x4 m.
[[nodiscard]] std::array<Complex, 16> expand(const Matrix& m);
}  // namespace pauli

struct EigenDecomposition {
    std::vector<double> values;  // ascending
    std::vector<Ket> vectors;    // orthonormal, phase-canonical
};

/// Cyclic complex Jacobi diagonalisation. Throws ContractError when the input
/// is not Hermitian and NumericalError if the sweeps fail to converge.
[[nodiscard]] EigenDecomposition eig_hermitian(const Matrix& m);

struct EigenPair {
    double value;
    Ket vector;
};

/// Lowest eigenpair; throws ConstructionError unless the gap to the next
/// eigenvalue exceeds tol::kEigenGap.
[[nodiscard]] EigenPair min_eigenpair(const Matrix& m);

/// A matrix known to be a valid density operator: Hermitian, unit trace and
/// positive semidefinite up to tol::kPositivity.
class DensityMatrix {
  public:
    /// Validates; throws ContractError when any density invariant fails.
    explicit DensityMatrix(Matrix m);

    static DensityMatrix maximally_mixed(std::size_t dim);
    static DensityMatrix pure(const Ket& psi);

    [[nodiscard]] const Matrix& matrix() const noexcept { return m_; }
    [[nodiscard]] std::size_t dim() const noexcept { return m_.dim(); }
    [[nodiscard]] const Complex& operator()(std::size_t r, std::size_t c) const { return m_(r, c); }

  private:
    Matrix m_;
};

/// Re Tr(rho obs). Throws DimensionError on mismatch, ContractError if obs is
/// not Hermitian and NumericalError if Im Tr exceeds tol::kImaginaryTrace.
[[nodiscard]] double expect(const DensityMatrix& rho, const Matrix& obs);

// JSON form {"dim": n, "re": [[...]], "im": [[...]]}.
[[nodiscard]] nlohmann::json to_json(const Matrix& m);
[[nodiscard]] Matrix matrix_from_json(const nlohmann::json& j);
[[nodiscard]] nlohmann::json to_json(const Ket& k);

}  // namespace nlw
