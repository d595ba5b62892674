#include "nlw/oracle.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "nlw/errors.hpp"
#include "nlw/states.hpp"

namespace nlw {

namespace {

// Second negative PT eigenvalue below this is a numerical contract breach.
constexpr double kDustNegative = 1e-10;
constexpr double kRankTolerance = 1e-10;

}  // namespace

OracleVerdict negativity(const DensityMatrix& rho) {
    if (rho.dim() != 4) throw DimensionError("negativity: expected a two-qubit state");
    const auto eig = eig_hermitian(partial_transpose_b(rho.matrix()));
    OracleVerdict v;
    v.min_pt_eigenvalue = eig.values.front();
    int significant = 0;
    for (double lambda : eig.values) {
        if (lambda < 0.0) v.negativity += -lambda;
        if (lambda < -kDustNegative) ++significant;
    }
    if (significant > 1) throw NumericalError("negativity: more than one negative partial-transpose eigenvalue");
    v.entangled = v.min_pt_eigenvalue < -kEntanglementThreshold;
    return v;
}

TomographyResult tomography_from_probabilities(std::span<const LocalProjector> projectors,
                                               std::span<const double> probabilities) {
    if (projectors.size() != probabilities.size()) {
        throw DimensionError("tomography: projector and probability counts differ");
    }
    const auto rows = static_cast<Eigen::Index>(projectors.size());

    // Orthonormal Hermitian basis sigma_a (x) sigma_b / 2.
    std::vector<Matrix> basis;
    basis.reserve(16);
    for (int a = 0; a < 4; ++a) {
        for (int b = 0; b < 4; ++b) basis.push_back(kron(pauli::by_index(a), pauli::by_index(b)) * Complex(0.5));
    }

    Eigen::MatrixXd design(rows, 16);
    Eigen::VectorXd rhs(rows);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const Matrix p = projectors[static_cast<std::size_t>(i)].matrix();
        for (Eigen::Index k = 0; k < 16; ++k) {
            design(i, k) = trace_product(p, basis[static_cast<std::size_t>(k)]).real();
        }
        rhs(i) = probabilities[static_cast<std::size_t>(i)];
    }

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(design, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    if (sv.size() < 16 || sv(sv.size() - 1) <= kRankTolerance * sv(0)) {
        throw InformationalCompletenessError("tomography: projector set does not span the operator space");
    }
    const Eigen::VectorXd x = svd.solve(rhs);

    Matrix raw(4);
    for (std::size_t k = 0; k < 16; ++k) raw += basis[k] * Complex(x(static_cast<Eigen::Index>(k)));

    const auto eig = eig_hermitian(raw.hermitian_part());
    double kept = 0.0;
    double clipped = 0.0;
    Matrix projected(4);
    for (std::size_t i = 0; i < eig.values.size(); ++i) {
        if (eig.values[i] <= 0.0) {
            clipped += -eig.values[i];
            continue;
        }
        kept += eig.values[i];
        projected += Matrix::projector(eig.vectors[i]) * Complex(eig.values[i]);
    }
    if (!(kept > 0.0)) throw NumericalError("tomography: reconstruction has no positive spectrum");
    projected *= Complex(1.0 / kept);

    return {DensityMatrix(projected.hermitian_part()), std::move(raw), clipped};
}

TomographyResult tomography_linear(std::span<const CountRecord> records) {
    const auto table = ProbabilityTable::from_records(records);
    std::vector<LocalProjector> projectors;
    std::vector<double> probs;
    projectors.reserve(records.size());
    probs.reserve(records.size());
    for (const auto& r : records) {
        projectors.push_back(r.projector);
        probs.push_back(table.probability(r.projector));
    }
    return tomography_from_probabilities(projectors, probs);
}

double fidelity(const DensityMatrix& rho, const Ket& target) {
    if (rho.dim() != target.dim()) throw DimensionError("fidelity: dimension mismatch");
    return target.inner(rho.matrix() * target).real();
}

double extract_phase(const DensityMatrix& rho, bool correlated) {
    if (rho.dim() != 4) throw DimensionError("extract_phase: expected a two-qubit state");
    const Complex coherence = correlated ? rho(3, 0) : rho(2, 1);
    return wrap_phase(std::arg(coherence));
}

nlohmann::json to_json(const OracleVerdict& verdict) {
    return {{"negativity", verdict.negativity},
            {"min_pt_eigenvalue", verdict.min_pt_eigenvalue},
            {"entangled", verdict.entangled}};
}

}  // namespace nlw
