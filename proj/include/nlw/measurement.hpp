#pragma once

// Simulated coincidence counting for product-basis projective measurements,
// and witness estimation from the resulting counts.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nlw/qmat.hpp"
#include "nlw/witness.hpp"

namespace nlw {

inline constexpr double kDefaultFlux = 1e4;
inline constexpr int kDefaultMonteCarlo = 100;

/// One complete product basis: four projectors {a0,a1} x {b0,b1}.
struct BasisGroup {
    LocalBasis a;
    LocalBasis b;

    [[nodiscard]] std::array<LocalProjector, 4> projectors() const;
    [[nodiscard]] std::string label() const;

    friend auto operator<=>(const BasisGroup&, const BasisGroup&) = default;
};

[[nodiscard]] BasisGroup group_of(const LocalProjector& p);
[[nodiscard]] BasisGroup parse_basis_group(std::string_view label);

/// z(x)z, x(x)x, y(x)y: enough for every witness in scope.
[[nodiscard]] std::vector<BasisGroup> witness_groups();
/// All nine product groups (36 projectors).
[[nodiscard]] std::vector<BasisGroup> tomography_groups();

/// Independent 64-bit seed for sub-stream `stream` of `seed`.
[[nodiscard]] std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

struct CountRecord {
    LocalProjector projector;
    std::int64_t counts = 0;
    BasisGroup group;
    double flux = 0.0;
    std::uint64_t seed = 0;
};

/// Poisson counts with mean flux * Tr(rho P) for each of the four projectors
/// of one complete product basis. Throws BasisError unless the projectors
/// form one product group resolving the identity within 1e-10.
[[nodiscard]] std::vector<CountRecord> simulate_counts(const DensityMatrix& rho, std::span<const LocalProjector> basis,
                                                       double flux, std::uint64_t seed);

/// simulate_counts over several groups; group i uses derive_seed(seed, i).
[[nodiscard]] std::vector<CountRecord> simulate_groups(const DensityMatrix& rho, std::span<const BasisGroup> groups,
                                                       double flux, std::uint64_t seed);

/// Per-group normalised outcome probabilities.
class ProbabilityTable {
  public:
    /// Throws BasisError for incomplete groups and UndefinedProbabilityError
    /// for groups with zero total counts.
    static ProbabilityTable from_records(std::span<const CountRecord> records);
    /// Noise-free probabilities Tr(rho P).
    static ProbabilityTable exact(const DensityMatrix& rho, std::span<const BasisGroup> groups);

    [[nodiscard]] double probability(const LocalProjector& p) const;
    [[nodiscard]] bool has_group(const BasisGroup& g) const;
    [[nodiscard]] std::vector<BasisGroup> groups() const;

    /// Tr(rho op) from the Pauli expansion of op. Throws BasisError when a
    /// needed group is absent.
    [[nodiscard]] Complex pauli_expectation(const Matrix& op) const;

    /// Projectors read through probability() since construction or reset.
    [[nodiscard]] const std::vector<LocalProjector>& touched() const noexcept { return touched_; }
    void reset_touched() const { touched_.clear(); }

  private:
    [[nodiscard]] double correlator(int pauli_a, int pauli_b) const;

    std::map<LocalProjector, double> probs_;
    mutable std::vector<LocalProjector> touched_;
};

/// counts(target) / total counts of target's group.
[[nodiscard]] double estimate_probability(std::span<const CountRecord> records, const LocalProjector& target);

struct WitnessEstimate {
    double w_l = 0.0;
    double u = 0.0;
    WInfinity w_inf = 0.0;
};

/// Linear value from the decomposition, contrast u = Tr(rho U^{T_B}) and
/// w_infinity from the nonlinear formula.
[[nodiscard]] WitnessEstimate estimate_witness(const ProbabilityTable& table, const WitnessSpec& spec);
[[nodiscard]] WitnessEstimate estimate_witness(std::span<const CountRecord> records, const WitnessSpec& spec);

/// Projectors whose probabilities enter the w_L and u formulas.
[[nodiscard]] std::vector<LocalProjector> analysis_projectors(const WitnessSpec& spec);

struct EstimatedValue {
    double value = 0.0;
    double sigma = 0.0;
    int n_mc = kDefaultMonteCarlo;
};

struct WitnessEstimates {
    EstimatedValue w_l;
    EstimatedValue u;
    std::optional<EstimatedValue> w_inf;   // empty when the point estimate is singular
    std::optional<SingularVerdict> singular;
};

/// Point estimate from the records plus standard deviations over n_mc
/// Poisson resamplings of every count. Throws ParameterError for n_mc < 2.
[[nodiscard]] WitnessEstimates mc_error_bars(std::span<const CountRecord> records, const WitnessSpec& spec,
                                             int n_mc, std::uint64_t seed);

/// CSV columns basis_group,ketA_label,ketB_label,counts,flux,seed.
void write_counts_csv(std::ostream& out, std::span<const CountRecord> records);
[[nodiscard]] std::vector<CountRecord> read_counts_csv(std::istream& in);

}  // namespace nlw
