#pragma once

// Ground-truth entanglement certification, independent of the witnesses:
// PPT negativity and linear-inversion tomography.

#include <span>
#include <vector>

#include <json.hpp>

#include "nlw/measurement.hpp"
#include "nlw/qmat.hpp"

namespace nlw {

inline constexpr double kEntanglementThreshold = 1e-9;

struct OracleVerdict {
    double negativity = 0.0;
    double min_pt_eigenvalue = 0.0;
    bool entangled = false;
};

/// Sum of |negative eigenvalues| of rho^{T_B}. Two-qubit partial transposes
/// have at most one negative eigenvalue; a second one raises NumericalError.
[[nodiscard]] OracleVerdict negativity(const DensityMatrix& rho);

struct TomographyResult {
    DensityMatrix rho;
    /// Least-squares estimate before projection onto the density cone.
    Matrix raw;
    /// Total weight of the eigenvalues clipped to zero.
    double clipped_mass = 0.0;
};

/// Least-squares fit of a Hermitian operator to projector probabilities, then
/// Hermitise, clip negative eigenvalues and renormalise the trace. Throws
/// InformationalCompletenessError when the projectors do not span the
/// 16-dimensional operator space.
[[nodiscard]] TomographyResult tomography_from_probabilities(std::span<const LocalProjector> projectors,
                                                             std::span<const double> probabilities);
[[nodiscard]] TomographyResult tomography_linear(std::span<const CountRecord> records);

/// <target|rho|target>
[[nodiscard]] double fidelity(const DensityMatrix& rho, const Ket& target);

/// arg <kk|rho|jj> (correlated) or arg <kj|rho|jk> (anti-correlated), in [0, 2pi).
[[nodiscard]] double extract_phase(const DensityMatrix& rho, bool correlated);

[[nodiscard]] nlohmann::json to_json(const OracleVerdict& verdict);

}  // namespace nlw
