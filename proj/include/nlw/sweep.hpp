#pragma once

// Phase sweep over prism-prepared states: the full simulated experiment
// (preparation, tomography check, witness measurement, error bars).

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nlw/measurement.hpp"
#include "nlw/oracle.hpp"
#include "nlw/states.hpp"
#include "nlw/witness.hpp"

namespace nlw {

enum class SweepMode { Correlated, Anticorrelated };

[[nodiscard]] std::string_view to_string(SweepMode mode);
[[nodiscard]] SweepMode parse_sweep_mode(std::string_view text);

/// White-noise weights that give |Tr(rho U)| = 0.69 (correlated, one prism)
/// and 0.92 (anti-correlated, two prisms). Chosen to match those contrasts;
/// not fitted to any data set.
inline constexpr double kCorrelatedPurity = 0.69;
inline constexpr double kAnticorrelatedPurity = 0.92;
inline constexpr int kDefaultPhasePoints = 16;
inline constexpr std::uint64_t kDefaultSeed = 20130611;

/// `count` phases at the centres of equal bins over [0, 2pi).
[[nodiscard]] std::vector<double> midpoint_phase_grid(int count);

/// "W_inf^Phi+" / "W_L^Psi-" style witness selector.
struct WitnessSelector {
    bool nonlinear = false;
    BellLabel label = BellLabel::PhiPlus;

    [[nodiscard]] std::string name() const;
    [[nodiscard]] static WitnessSelector parse(std::string_view text);
};

struct SweepConfig {
    SweepMode mode = SweepMode::Correlated;
    int ell = 2;
    double epsilon = 1.0;
    double purity_p = kCorrelatedPurity;
    double dephasing_gamma = 1.0;
    std::vector<double> phase_grid = midpoint_phase_grid(kDefaultPhasePoints);
    double flux = kDefaultFlux;
    int n_mc = kDefaultMonteCarlo;
    std::uint64_t seed = kDefaultSeed;
    /// One nonlinear and two linear selectors; the first linear one fills the
    /// w_L_plus columns, the second w_L_minus.
    std::vector<std::string> witnesses;
    std::optional<UnitaryKind> unitary;
    bool tomography = true;
    int threads = 1;
};

/// Mode-appropriate defaults: {W_inf^Phi+, W_L^Phi+, W_L^Phi-} with p = 0.69,
/// or {W_inf^Psi+, W_L^Psi+, W_L^Psi-} with p = 0.92.
[[nodiscard]] SweepConfig default_config(SweepMode mode);

/// Throws ConfigError describing the first invalid field.
void validate(const SweepConfig& config);

/// Flat JSON object with SweepConfig field names. Unset fields keep the
/// mode's defaults; unknown keys are rejected.
[[nodiscard]] SweepConfig config_from_json(const nlohmann::json& j);
[[nodiscard]] nlohmann::json to_json(const SweepConfig& config);

/// Exact (noise-free) witness values of the state prepared at one phase.
struct AnalyticPoint {
    double w_l_plus = 0.0;
    double w_l_minus = 0.0;
    WInfinity w_inf = 0.0;
    double u = 0.0;
};

struct TomographyCheck {
    double fidelity = 0.0;
    double negativity = 0.0;
    double phase = 0.0;
    bool entangled = false;
};

struct PointResult {
    double phase = 0.0;
    double theta_b = 0.0;
    std::optional<double> theta_a;
    double prepared_phase = 0.0;  // phase reported by the preparation model
    AnalyticPoint analytic;
    EstimatedValue w_l_plus;
    EstimatedValue w_l_minus;
    std::optional<EstimatedValue> w_inf;
    std::optional<SingularVerdict> singular;
    EstimatedValue u;
    OracleVerdict oracle;
    std::optional<TomographyCheck> tomography;
    /// Every estimate lies within 5 sigma of its analytic value.
    bool consistent = true;
};

struct SweepResult {
    SweepConfig config;
    std::vector<PointResult> points;

    [[nodiscard]] bool consistent() const;
};

/// State prepared by the prism pipeline at one target phase, with the
/// configured white noise and dephasing applied.
[[nodiscard]] PreparedState prepare_point(const SweepConfig& config, double phase);

[[nodiscard]] AnalyticPoint analytic_point(const SweepConfig& config, double phase);

/// Validates the config first; deterministic for a given config. Points are
/// independent and seeded from (seed, index), so the thread count does not
/// change the result.
[[nodiscard]] SweepResult run_sweep(const SweepConfig& config);

enum class OutputFormat { Csv, Json, Svg };

[[nodiscard]] OutputFormat parse_output_format(std::string_view text);

void write_csv(std::ostream& out, const SweepResult& result);
void write_json(std::ostream& out, const SweepResult& result);
void write_svg(std::ostream& out, const SweepResult& result);

/// Writes the result in `format` to `path`; throws IoError when the file
/// cannot be written.
void emit(const SweepResult& result, OutputFormat format, const std::filesystem::path& path);

}  // namespace nlw
