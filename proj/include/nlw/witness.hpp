#pragma once

// Linear entanglement witnesses built from the partial-transpose construction
// and their nonlinear improvements w2 and w_infinity.

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "nlw/qmat.hpp"

namespace nlw {

enum class BellLabel { PhiPlus, PhiMinus, PsiPlus, PsiMinus };

enum class UnitaryKind {
    SigmaZZNeg,           // -sigma_z (x) sigma_z
    SigmaZZPos,           // +sigma_z (x) sigma_z
    TwicePsiPlusWitness,  // (1 - XX - YY + ZZ)/2 = 2 W_L^{Psi+}
};

[[nodiscard]] std::string_view to_string(BellLabel label);
[[nodiscard]] std::string_view to_string(UnitaryKind kind);
/// Accepts "Phi+", "Phi-", "Psi+", "Psi-". Throws ConfigError otherwise.
[[nodiscard]] BellLabel parse_bell_label(std::string_view text);
/// Accepts "sigma_zz_neg", "sigma_zz_pos", "twice_WPsiPlus".
[[nodiscard]] UnitaryKind parse_unitary_kind(std::string_view text);

[[nodiscard]] Ket bell_state(BellLabel label);
[[nodiscard]] bool is_correlated_family(BellLabel label);
/// -ZZ for the Phi family, +ZZ for the Psi family.
[[nodiscard]] UnitaryKind default_unitary(BellLabel label);

/// Single-qubit measurement kets: |j>, |k>, |x+-> = (|j> +- |k>)/sqrt2,
/// |y+-> = (|j> +- i|k>)/sqrt2.
enum class LocalKet { J, K, XPlus, XMinus, YPlus, YMinus };

enum class LocalBasis { Z, X, Y };

[[nodiscard]] Ket local_ket(LocalKet which);
[[nodiscard]] std::string_view to_string(LocalKet which);
[[nodiscard]] LocalKet parse_local_ket(std::string_view text);
[[nodiscard]] LocalBasis basis_of(LocalKet which);
[[nodiscard]] std::string_view to_string(LocalBasis basis);

/// Product projector |a,b><a,b|.
struct LocalProjector {
    LocalKet a;
    LocalKet b;

    [[nodiscard]] Ket ket() const;
    [[nodiscard]] Matrix matrix() const;
    [[nodiscard]] std::string label() const;

    friend auto operator<=>(const LocalProjector&, const LocalProjector&) = default;
};

struct DecompositionTerm {
    double coefficient;
    LocalProjector projector;
};

using Decomposition = std::vector<DecompositionTerm>;

[[nodiscard]] Matrix assemble(const Decomposition& terms);

struct LinearWitness {
    Matrix w_l;
    Ket eta;
};

/// W_L = (|eta><eta|)^{T_B} with eta the lowest eigenvector of the target's
/// partial transpose. Throws ConstructionError for PPT targets
/// (min eigenvalue >= -1e-8) or a degenerate minimum.
[[nodiscard]] LinearWitness witness_from_target(const Ket& target);

/// Six-term local decomposition of the Bell-state witness.
[[nodiscard]] Decomposition canonical_decomposition(BellLabel label);

[[nodiscard]] Matrix make_unitary(UnitaryKind kind);

/// Immutable witness description. Construction checks that the decomposition
/// reassembles W_L, that W_L = (|eta><eta|)^{T_B} and that U is unitary, all
/// within 1e-10.
class WitnessSpec {
  public:
    WitnessSpec(Matrix w_l, Ket eta, Matrix unitary, Decomposition decomposition, std::string label);

    [[nodiscard]] const Matrix& w_l() const noexcept { return w_l_; }
    [[nodiscard]] const Ket& eta() const noexcept { return eta_; }
    [[nodiscard]] const Matrix& unitary() const noexcept { return u_; }
    [[nodiscard]] const Decomposition& decomposition() const noexcept { return decomposition_; }
    [[nodiscard]] const std::string& label() const noexcept { return label_; }

    /// (rho_eta U)^{T_B}, generally non-Hermitian.
    [[nodiscard]] const Matrix& eta_u_pt() const noexcept { return eta_u_pt_; }
    /// U^{T_B}.
    [[nodiscard]] const Matrix& u_pt() const noexcept { return u_pt_; }
    [[nodiscard]] bool diagonal_unitary() const { return u_.is_diagonal(); }

  private:
    Matrix w_l_;
    Ket eta_;
    Matrix u_;
    Decomposition decomposition_;
    std::string label_;
    Matrix eta_u_pt_;
    Matrix u_pt_;
};

/// Bell-state witness with its canonical decomposition and the given unitary
/// (defaults to the family's sigma_z (x) sigma_z choice).
[[nodiscard]] WitnessSpec make_spec(BellLabel label, std::optional<UnitaryKind> unitary = std::nullopt);

/// The w_infinity limit when 1 - |u|^2 vanishes; entanglement is reported from
/// the linear value alone.
struct SingularVerdict {
    double linear_value;

    [[nodiscard]] bool entangled() const noexcept { return linear_value < 0.0; }
};

using WInfinity = std::variant<double, SingularVerdict>;

inline constexpr double kSingularThreshold = 1e-9;

[[nodiscard]] inline bool is_singular(const WInfinity& w) { return std::holds_alternative<SingularVerdict>(w); }

/// True when w is a regular value below -threshold, or a singular verdict with
/// a negative linear value.
[[nodiscard]] bool detects(const WInfinity& w, double threshold = 0.0);

/// Nonlinear witness values from the three traces
///   t = Tr(rho W_L), a = Tr(rho (rho_eta U)^{T_B}), u = Tr(rho U^{T_B}).
[[nodiscard]] double nonlinear_second(double t, Complex a);
[[nodiscard]] WInfinity nonlinear_infinity(double t, Complex a, Complex u);

[[nodiscard]] double w1(const DensityMatrix& rho, const WitnessSpec& spec);
[[nodiscard]] double w2(const DensityMatrix& rho, const WitnessSpec& spec);
[[nodiscard]] WInfinity w_infinity(const DensityMatrix& rho, const WitnessSpec& spec);

/// Tr(rho U^{T_B}).
[[nodiscard]] Complex contrast(const DensityMatrix& rho, const WitnessSpec& spec);

/// Deduplicated union of the decomposition projectors and the eigenprojectors
/// of a diagonal U. Throws UnsupportedError for a non-diagonal U, reporting
/// the size of measurement_union().
[[nodiscard]] std::vector<LocalProjector> required_measurements(const WitnessSpec& spec);

/// Every local projector the estimator reads for this spec, for any U.
[[nodiscard]] std::vector<LocalProjector> measurement_union(const WitnessSpec& spec);

[[nodiscard]] nlohmann::json to_json(const WitnessSpec& spec);

}  // namespace nlw
