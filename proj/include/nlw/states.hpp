#pragma once

// Two-qubit OAM states: correlated / anti-correlated superpositions, white
// noise and dephasing, and the Dove-prism preparation from a downconversion
// source.

#include <optional>

#include <json.hpp>

#include "nlw/qmat.hpp"

namespace nlw {

inline constexpr int kDefaultMaxOam = 10;

/// Azimuthal OAM quantum number.
class OamLabel {
  public:
    /// Throws DomainError when |ell| > max_abs.
    explicit OamLabel(int ell, int max_abs = kDefaultMaxOam);

    [[nodiscard]] int ell() const noexcept { return ell_; }
    [[nodiscard]] OamLabel flipped() const { return OamLabel(-ell_, std::abs(ell_)); }

    friend bool operator==(OamLabel, OamLabel) = default;

  private:
    int ell_;
};

/// The two modes spanning one arm's qubit: |j> is logical 0, |k> logical 1.
struct ArmModes {
    OamLabel j;
    OamLabel k;
};

class QubitSubspace {
  public:
    /// Throws DomainError if j == k within an arm.
    QubitSubspace(ArmModes arm_a, ArmModes arm_b);

    [[nodiscard]] const ArmModes& arm_a() const noexcept { return arm_a_; }
    [[nodiscard]] const ArmModes& arm_b() const noexcept { return arm_b_; }

  private:
    ArmModes arm_a_;
    ArmModes arm_b_;
};

struct StateMeta {
    double epsilon = 1.0;
    double phase = 0.0;  // wrapped to [0, 2pi)
    double purity_p = 1.0;
    double dephasing_gamma = 1.0;
    bool correlated = true;
    int ell = 0;
    double theta_b = 0.0;
    std::optional<double> theta_a;
};

struct PreparedState {
    DensityMatrix rho;
    QubitSubspace subspace;
    StateMeta meta;
};

/// (|jj> + eps e^{i phase} |kk>) / sqrt(1 + eps^2)
[[nodiscard]] Ket make_correlated(double epsilon, double phase);
/// (|jk> + eps e^{i phase} |kj>) / sqrt(1 + eps^2)
[[nodiscard]] Ket make_anticorrelated(double epsilon, double phase);

/// p |psi><psi| + (1 - p) 1/4. Throws DomainError for p outside [0, 1].
[[nodiscard]] DensityMatrix mix_white(const Ket& psi, double p);

/// Scales the coherences <jj|rho|kk> and <jk|rho|kj> (and their conjugates)
/// by gamma in [0, 1].
[[nodiscard]] DensityMatrix dephase(const DensityMatrix& rho, double gamma);

/// Wraps an angle into [0, 2pi).
[[nodiscard]] double wrap_phase(double angle);

/// Distance between two angles on the circle, in [0, pi].
[[nodiscard]] double phase_distance(double a, double b);

struct ModeImage {
    OamLabel ell;
    double phase;  // accumulated phase in radians, not wrapped
};

/// Dove prism at mode-space angle theta (physical rotation theta / 2). Maps
/// |ell> to e^{-i ell theta} |-ell>: the outgoing mode carries phase
/// ell_out * theta.
class DovePrism {
  public:
    explicit DovePrism(double theta) : theta_(theta) {}

    [[nodiscard]] double theta() const noexcept { return theta_; }
    [[nodiscard]] ModeImage apply(OamLabel in) const;
    [[nodiscard]] ModeImage apply(const ModeImage& in) const;

  private:
    double theta_;
};

/// Source (|0,0> + eps |ell>_A |-ell>_B) / sqrt(1 + eps^2), a prism at
/// theta_b in arm B and optionally a second one at theta_a in arm A.
/// One prism gives the correlated state in {0, ell} x {0, ell} with phase
/// ell*theta_b; two give the anti-correlated state with arm A in {0, -ell},
/// arm B in {ell, 0} and phase ell*(theta_b - theta_a).
/// Throws DomainError for ell < 1.
[[nodiscard]] PreparedState prepare_via_prisms(int ell, double epsilon, double theta_b,
                                               std::optional<double> theta_a = std::nullopt);

/// Applies white noise p and dephasing gamma to a prepared state.
[[nodiscard]] PreparedState with_noise(const PreparedState& state, double p, double gamma = 1.0);

/// Ket of the prepared pure state in the (jj, jk, kj, kk) basis.
[[nodiscard]] Ket ideal_ket(const StateMeta& meta);

[[nodiscard]] nlohmann::json to_json(const PreparedState& state);

}  // namespace nlw
