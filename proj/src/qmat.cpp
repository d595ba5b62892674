#include "nlw/qmat.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "nlw/errors.hpp"

namespace nlw {

namespace {

bool finite(const Complex& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

void require_finite(std::span<const Complex> values, const char* what) {
    if (!std::all_of(values.begin(), values.end(), finite)) {
        throw DomainError(std::string(what) + ": non-finite entry");
    }
}

void require_same_dim(const Matrix& a, const Matrix& b, const char* what) {
    if (a.dim() != b.dim()) {
        throw DimensionError(std::string(what) + ": dimension mismatch " + std::to_string(a.dim()) +
                             " vs " + std::to_string(b.dim()));
    }
}

}  // namespace

// ---------------------------------------------------------------------------
// Ket

Ket::Ket(std::vector<Complex> amplitudes) : amps_(std::move(amplitudes)) {
    if (amps_.empty()) throw DimensionError("Ket: empty amplitude list");
    require_finite(amps_, "Ket");
}

Ket::Ket(std::initializer_list<Complex> amplitudes) : Ket(std::vector<Complex>(amplitudes)) {}

Ket Ket::basis(std::size_t dim, std::size_t index) {
    if (index >= dim) throw DimensionError("Ket::basis: index out of range");
    std::vector<Complex> amps(dim);
    amps[index] = 1.0;
    return Ket(std::move(amps));
}

double Ket::norm() const {
    double sum = 0.0;
    for (const auto& a : amps_) sum += std::norm(a);
    return std::sqrt(sum);
}

Ket Ket::normalized() const {
    const double n = norm();
    if (n == 0.0) throw DomainError("Ket::normalized: zero vector");
    std::vector<Complex> amps(amps_);
    for (auto& a : amps) a /= n;
    return Ket(std::move(amps));
}

bool Ket::is_normalized(double tolerance) const {
    double sum = 0.0;
    for (const auto& a : amps_) sum += std::norm(a);
    return std::abs(sum - 1.0) <= tolerance;
}

Complex Ket::inner(const Ket& other) const {
    if (dim() != other.dim()) throw DimensionError("Ket::inner: dimension mismatch");
    Complex sum = 0.0;
    for (std::size_t i = 0; i < dim(); ++i) sum += std::conj(amps_[i]) * other.amps_[i];
    return sum;
}

Ket Ket::phase_canonical(double threshold) const {
    auto lead = std::find_if(amps_.begin(), amps_.end(),
                             [threshold](const Complex& a) { return std::abs(a) > threshold; });
    if (lead == amps_.end()) return *this;
    const Complex rotate = std::abs(*lead) / *lead;
    std::vector<Complex> amps(amps_);
    for (auto& a : amps) a *= rotate;
    amps[static_cast<std::size_t>(lead - amps_.begin())] = std::abs(*lead);
    return Ket(std::move(amps));
}

Ket kron(const Ket& a, const Ket& b) {
    std::vector<Complex> amps;
    amps.reserve(a.dim() * b.dim());
    for (std::size_t i = 0; i < a.dim(); ++i) {
        for (std::size_t p = 0; p < b.dim(); ++p) amps.push_back(a[i] * b[p]);
    }
    return Ket(std::move(amps));
}

// ---------------------------------------------------------------------------
// Matrix

Matrix::Matrix(std::size_t dim) : dim_(dim), data_(dim * dim) {
    if (dim == 0) throw DimensionError("Matrix: zero dimension");
}

Matrix::Matrix(std::initializer_list<std::initializer_list<Complex>> rows) : dim_(rows.size()) {
    if (dim_ == 0) throw DimensionError("Matrix: zero dimension");
    data_.reserve(dim_ * dim_);
    for (const auto& row : rows) {
        if (row.size() != dim_) throw DimensionError("Matrix: ragged or non-square initializer");
        data_.insert(data_.end(), row.begin(), row.end());
    }
    require_finite(data_, "Matrix");
}

Matrix::Matrix(std::size_t dim, std::vector<Complex> row_major) : dim_(dim), data_(std::move(row_major)) {
    if (dim_ == 0 || data_.size() != dim_ * dim_) {
        throw DimensionError("Matrix: entry count does not match dim^2");
    }
    require_finite(data_, "Matrix");
}

Matrix Matrix::identity(std::size_t dim) {
    Matrix m(dim);
    for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::diagonal(std::span<const Complex> values) {
    Matrix m(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
    require_finite(m.data_, "Matrix::diagonal");
    return m;
}

Matrix Matrix::diagonal(std::initializer_list<Complex> values) {
    return diagonal(std::span<const Complex>(values.begin(), values.size()));
}

Matrix Matrix::outer(const Ket& a, const Ket& b) {
    if (a.dim() != b.dim()) throw DimensionError("Matrix::outer: dimension mismatch");
    Matrix m(a.dim());
    for (std::size_t i = 0; i < a.dim(); ++i) {
        for (std::size_t j = 0; j < b.dim(); ++j) m(i, j) = a[i] * std::conj(b[j]);
    }
    return m;
}

Matrix Matrix::projector(const Ket& a) { return outer(a, a); }

Matrix Matrix::adjoint() const {
    Matrix out(dim_);
    for (std::size_t i = 0; i < dim_; ++i) {
        for (std::size_t j = 0; j < dim_; ++j) out(j, i) = std::conj((*this)(i, j));
    }
    return out;
}

Matrix Matrix::transpose() const {
    Matrix out(dim_);
    for (std::size_t i = 0; i < dim_; ++i) {
        for (std::size_t j = 0; j < dim_; ++j) out(j, i) = (*this)(i, j);
    }
    return out;
}

Complex Matrix::trace() const {
    Complex sum = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) sum += (*this)(i, i);
    return sum;
}

double Matrix::frobenius_norm() const {
    double sum = 0.0;
    for (const auto& z : data_) sum += std::norm(z);
    return std::sqrt(sum);
}

double Matrix::max_abs() const {
    double best = 0.0;
    for (const auto& z : data_) best = std::max(best, std::abs(z));
    return best;
}

bool Matrix::is_finite() const { return std::all_of(data_.begin(), data_.end(), finite); }

bool Matrix::is_hermitian(double tolerance) const {
    const double scaled = tolerance * std::max(1.0, max_abs());
    for (std::size_t i = 0; i < dim_; ++i) {
        for (std::size_t j = i; j < dim_; ++j) {
            if (std::abs((*this)(i, j) - std::conj((*this)(j, i))) > scaled) return false;
        }
    }
    return true;
}

bool Matrix::is_unitary(double tolerance) const {
    return max_abs_diff((*this) * adjoint(), identity(dim_)) <= tolerance;
}

bool Matrix::is_diagonal(double tolerance) const {
    for (std::size_t i = 0; i < dim_; ++i) {
        for (std::size_t j = 0; j < dim_; ++j) {
            if (i != j && std::abs((*this)(i, j)) > tolerance) return false;
        }
    }
    return true;
}

Matrix Matrix::hermitian_part() const { return (*this + adjoint()) * Complex(0.5); }

Matrix& Matrix::operator+=(const Matrix& rhs) {
    require_same_dim(*this, rhs, "Matrix::operator+");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += rhs.data_[i];
    return *this;
}

Matrix& Matrix::operator-=(const Matrix& rhs) {
    require_same_dim(*this, rhs, "Matrix::operator-");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= rhs.data_[i];
    return *this;
}

Matrix& Matrix::operator*=(Complex scale) {
    for (auto& z : data_) z *= scale;
    return *this;
}

Matrix operator*(const Matrix& lhs, const Matrix& rhs) {
    require_same_dim(lhs, rhs, "Matrix::operator*");
    const std::size_t n = lhs.dim();
    Matrix out(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < n; ++k) {
            const Complex a = lhs(i, k);
            if (a == Complex(0.0)) continue;
            for (std::size_t j = 0; j < n; ++j) out(i, j) += a * rhs(k, j);
        }
    }
    return out;
}

Ket operator*(const Matrix& lhs, const Ket& rhs) {
    if (lhs.dim() != rhs.dim()) throw DimensionError("Matrix*Ket: dimension mismatch");
    std::vector<Complex> out(rhs.dim());
    for (std::size_t i = 0; i < lhs.dim(); ++i) {
        for (std::size_t j = 0; j < lhs.dim(); ++j) out[i] += lhs(i, j) * rhs[j];
    }
    return Ket(std::move(out));
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
    require_same_dim(a, b, "max_abs_diff");
    double best = 0.0;
    for (std::size_t i = 0; i < a.row_major().size(); ++i) {
        best = std::max(best, std::abs(a.row_major()[i] - b.row_major()[i]));
    }
    return best;
}

Matrix kron(const Matrix& a, const Matrix& b) {
    const std::size_t da = a.dim();
    const std::size_t db = b.dim();
    Matrix out(da * db);
    for (std::size_t i = 0; i < da; ++i) {
        for (std::size_t j = 0; j < da; ++j) {
            for (std::size_t p = 0; p < db; ++p) {
                for (std::size_t q = 0; q < db; ++q) out(i * db + p, j * db + q) = a(i, j) * b(p, q);
            }
        }
    }
    return out;
}

Matrix partial_transpose_b(const Matrix& m) {
    if (m.dim() != 4) {
        throw DimensionError("partial_transpose_b: expected a 4x4 operator, got dim " +
                             std::to_string(m.dim()));
    }
    Matrix out(4);
    for (std::size_t i = 0; i < 2; ++i) {
        for (std::size_t j = 0; j < 2; ++j) {
            for (std::size_t p = 0; p < 2; ++p) {
                for (std::size_t q = 0; q < 2; ++q) out(2 * i + q, 2 * j + p) = m(2 * i + p, 2 * j + q);
            }
        }
    }
    return out;
}

Complex trace_product(const Matrix& a, const Matrix& b) {
    require_same_dim(a, b, "trace_product");
    Complex sum = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) {
        for (std::size_t k = 0; k < a.dim(); ++k) sum += a(i, k) * b(k, i);
    }
    return sum;
}

namespace pauli {
Matrix identity() { return Matrix::identity(2); }
Matrix x() { return Matrix{{0.0, 1.0}, {1.0, 0.0}}; }
Matrix y() { return Matrix{{0.0, Complex(0.0, -1.0)}, {Complex(0.0, 1.0), 0.0}}; }
Matrix z() { return Matrix::diagonal({1.0, -1.0}); }

Matrix by_index(int index) {
    switch (index) {
        case 0: return identity();
        case 1: return x();
        case 2: return y();
        case 3: return z();
        default: throw DomainError("pauli::by_index: index must be 0..3");
    }
}

std::array<Complex, 16> expand(const Matrix& m) {
    if (m.dim() != 4) throw DimensionError("pauli::expand: expected a 4x4 operator");
    std::array<Complex, 16> coeffs{};
    for (int a = 0; a < 4; ++a) {
        for (int b = 0; b < 4; ++b) {
            coeffs[static_cast<std::size_t>(4 * a + b)] = trace_product(kron(by_index(a), by_index(b)), m) / 4.0;
        }
    }
    return coeffs;
}
}  // namespace pauli

// ---------------------------------------------------------------------------
// Jacobi eigensolver

EigenDecomposition eig_hermitian(const Matrix& m) {
    if (!m.is_hermitian()) throw ContractError("eig_hermitian: input is not Hermitian");

    const std::size_t n = m.dim();
    Matrix a = m.hermitian_part();
    Matrix v = Matrix::identity(n);
    const double scale = std::max(a.frobenius_norm(), 1e-300);

    auto off_diagonal = [&] {
        double sum = 0.0;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = 0; q < n; ++q) {
                if (p != q) sum += std::norm(a(p, q));
            }
        }
        return std::sqrt(sum);
    };

    constexpr int kMaxSweeps = 64;
    int sweep = 0;
    for (; sweep < kMaxSweeps && off_diagonal() > 1e-15 * scale; ++sweep) {
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double mag = std::abs(a(p, q));
                if (mag <= 1e-18 * scale) continue;

                // G = D R: D rotates a(p,q) onto the positive real axis, R is
                // the real symmetric Jacobi rotation that annihilates it.
                const Complex phase = a(p, q) / mag;
                const Complex phase_conj = std::conj(phase);
                const double tau = (a(q, q).real() - a(p, p).real()) / (2.0 * mag);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;

                for (std::size_t k = 0; k < n; ++k) {
                    const Complex akp = a(k, p);
                    const Complex akq = a(k, q);
                    a(k, p) = c * akp - s * phase_conj * akq;
                    a(k, q) = s * akp + c * phase_conj * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const Complex apk = a(p, k);
                    const Complex aqk = a(q, k);
                    a(p, k) = c * apk - s * phase * aqk;
                    a(q, k) = s * apk + c * phase * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const Complex vkp = v(k, p);
                    const Complex vkq = v(k, q);
                    v(k, p) = c * vkp - s * phase_conj * vkq;
                    v(k, q) = s * vkp + c * phase_conj * vkq;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                a(p, p) = a(p, p).real();
                a(q, q) = a(q, q).real();
            }
        }
    }
    if (off_diagonal() > 1e-15 * scale && off_diagonal() > 1e-13) {
        throw NumericalError("eig_hermitian: Jacobi sweeps did not converge");
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return a(i, i).real() < a(j, j).real(); });

    EigenDecomposition out;
    out.values.reserve(n);
    out.vectors.reserve(n);
    for (std::size_t col : order) {
        out.values.push_back(a(col, col).real());
        std::vector<Complex> amps(n);
        for (std::size_t k = 0; k < n; ++k) amps[k] = v(k, col);
        out.vectors.push_back(Ket(std::move(amps)).phase_canonical());
    }
    return out;
}

EigenPair min_eigenpair(const Matrix& m) {
    auto eig = eig_hermitian(m);
    if (eig.values.size() > 1 && eig.values[1] - eig.values[0] <= tol::kEigenGap) {
        throw ConstructionError("min_eigenpair: lowest eigenvalue is degenerate");
    }
    return {eig.values.front(), std::move(eig.vectors.front())};
}

// ---------------------------------------------------------------------------
// DensityMatrix

DensityMatrix::DensityMatrix(Matrix m) : m_(std::move(m)) {
    if (!m_.is_hermitian()) throw ContractError("DensityMatrix: not Hermitian");
    const Complex tr = m_.trace();
    if (std::abs(tr - Complex(1.0)) > tol::kAlgebraic) {
        throw ContractError("DensityMatrix: trace " + std::to_string(tr.real()) + " != 1");
    }
    const auto eig = eig_hermitian(m_);
    if (eig.values.front() < -tol::kPositivity) {
        throw ContractError("DensityMatrix: negative eigenvalue " + std::to_string(eig.values.front()));
    }
}

DensityMatrix DensityMatrix::maximally_mixed(std::size_t dim) {
    return DensityMatrix(Matrix::identity(dim) * Complex(1.0 / static_cast<double>(dim)));
}

DensityMatrix DensityMatrix::pure(const Ket& psi) {
    if (!psi.is_normalized()) throw DomainError("DensityMatrix::pure: ket is not normalized");
    return DensityMatrix(Matrix::projector(psi));
}

double expect(const DensityMatrix& rho, const Matrix& obs) {
    if (rho.dim() != obs.dim()) throw DimensionError("expect: dimension mismatch");
    if (!obs.is_hermitian()) throw ContractError("expect: observable is not Hermitian");
    const Complex tr = trace_product(rho.matrix(), obs);
    if (std::abs(tr.imag()) > tol::kImaginaryTrace) {
        throw NumericalError("expect: imaginary trace residue " + std::to_string(tr.imag()));
    }
    return tr.real();
}

// ---------------------------------------------------------------------------
// JSON

nlohmann::json to_json(const Matrix& m) {
    nlohmann::json re = nlohmann::json::array();
    nlohmann::json im = nlohmann::json::array();
    for (std::size_t i = 0; i < m.dim(); ++i) {
        nlohmann::json re_row = nlohmann::json::array();
        nlohmann::json im_row = nlohmann::json::array();
        for (std::size_t j = 0; j < m.dim(); ++j) {
            re_row.push_back(m(i, j).real());
            im_row.push_back(m(i, j).imag());
        }
        re.push_back(std::move(re_row));
        im.push_back(std::move(im_row));
    }
    return {{"dim", m.dim()}, {"re", std::move(re)}, {"im", std::move(im)}};
}

Matrix matrix_from_json(const nlohmann::json& j) {
    try {
        const auto dim = j.at("dim").get<std::size_t>();
        const auto& re = j.at("re");
        const auto& im = j.at("im");
        if (re.size() != dim || im.size() != dim) throw DimensionError("matrix JSON: row count != dim");
        std::vector<Complex> data;
        data.reserve(dim * dim);
        for (std::size_t r = 0; r < dim; ++r) {
            if (re[r].size() != dim || im[r].size() != dim) {
                throw DimensionError("matrix JSON: column count != dim");
            }
            for (std::size_t c = 0; c < dim; ++c) {
                data.emplace_back(re[r][c].get<double>(), im[r][c].get<double>());
            }
        }
        return Matrix(dim, std::move(data));
    } catch (const nlohmann::json::exception& e) {
        throw DomainError(std::string("matrix JSON: ") + e.what());
    }
}

nlohmann::json to_json(const Ket& k) {
    nlohmann::json re = nlohmann::json::array();
    nlohmann::json im = nlohmann::json::array();
    for (const auto& a : k.amplitudes()) {
        re.push_back(a.real());
        im.push_back(a.imag());
    }
    return {{"dim", k.dim()}, {"re", std::move(re)}, {"im", std::move(im)}};
}

}  // namespace nlw
