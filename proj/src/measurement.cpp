#include "nlw/measurement.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

#include "nlw/errors.hpp"

namespace nlw {

namespace {

constexpr double kCompleteness = 1e-10;

LocalKet outcome_ket(LocalBasis basis, int outcome) {
    switch (basis) {
        case LocalBasis::Z: return outcome == 0 ? LocalKet::J : LocalKet::K;
        case LocalBasis::X: return outcome == 0 ? LocalKet::XPlus : LocalKet::XMinus;
        case LocalBasis::Y: return outcome == 0 ? LocalKet::YPlus : LocalKet::YMinus;
    }
    throw DomainError("unknown local basis");
}

LocalBasis pauli_basis(int index) {
    switch (index) {
        case 1: return LocalBasis::X;
        case 2: return LocalBasis::Y;
        case 3: return LocalBasis::Z;
        default: throw DomainError("identity has no measurement basis");
    }
}

LocalBasis parse_local_basis(char c) {
    switch (c) {
        case 'z': return LocalBasis::Z;
        case 'x': return LocalBasis::X;
        case 'y': return LocalBasis::Y;
        default: throw ConfigError(std::string("unknown local basis '") + c + "'");
    }
}

std::int64_t poisson_draw(double mean, std::mt19937_64& rng) {
    if (mean <= 0.0) return 0;
    std::poisson_distribution<std::int64_t> dist(mean);
    return dist(rng);
}

double sample_stddev(const std::vector<double>& xs) {
    if (xs.size() < 2) return 0.0;
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

}  // namespace

// ---------------------------------------------------------------------------
// Basis groups

std::array<LocalProjector, 4> BasisGroup::projectors() const {
    return {LocalProjector{outcome_ket(a, 0), outcome_ket(b, 0)}, LocalProjector{outcome_ket(a, 0), outcome_ket(b, 1)},
            LocalProjector{outcome_ket(a, 1), outcome_ket(b, 0)}, LocalProjector{outcome_ket(a, 1), outcome_ket(b, 1)}};
}

std::string BasisGroup::label() const { return std::string(to_string(a)) + std::string(to_string(b)); }

BasisGroup group_of(const LocalProjector& p) { return {basis_of(p.a), basis_of(p.b)}; }

BasisGroup parse_basis_group(std::string_view label) {
    if (label.size() != 2) throw ConfigError("basis group label must be two letters, e.g. 'zz'");
    return {parse_local_basis(label[0]), parse_local_basis(label[1])};
}

std::vector<BasisGroup> witness_groups() {
    return {{LocalBasis::Z, LocalBasis::Z}, {LocalBasis::X, LocalBasis::X}, {LocalBasis::Y, LocalBasis::Y}};
}

std::vector<BasisGroup> tomography_groups() {
    std::vector<BasisGroup> out;
    for (auto a : {LocalBasis::Z, LocalBasis::X, LocalBasis::Y}) {
        for (auto b : {LocalBasis::Z, LocalBasis::X, LocalBasis::Y}) out.push_back({a, b});
    }
    return out;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    // splitmix64 finaliser over the combined word
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// ---------------------------------------------------------------------------
// Simulation

std::vector<CountRecord> simulate_counts(const DensityMatrix& rho, std::span<const LocalProjector> basis, double flux,
                                         std::uint64_t seed) {
    if (!(flux > 0.0) || !std::isfinite(flux)) throw DomainError("simulate_counts: flux must be finite and > 0");
    if (basis.size() != 4) throw BasisError("simulate_counts: a complete basis has exactly 4 projectors");

    const BasisGroup group = group_of(basis.front());
    Matrix sum(4);
    for (const auto& p : basis) {
        if (group_of(p) != group) throw BasisError("simulate_counts: projectors span more than one product basis");
        sum += p.matrix();
    }
    if (max_abs_diff(sum, Matrix::identity(4)) > kCompleteness) {
        throw BasisError("simulate_counts: projectors do not resolve the identity");
    }

    std::mt19937_64 rng(seed);
    std::vector<CountRecord> out;
    out.reserve(4);
    for (const auto& p : basis) {
        const double mean = flux * std::max(0.0, expect(rho, p.matrix()));
        out.push_back({p, poisson_draw(mean, rng), group, flux, seed});
    }
    return out;
}

std::vector<CountRecord> simulate_groups(const DensityMatrix& rho, std::span<const BasisGroup> groups, double flux,
                                         std::uint64_t seed) {
    std::vector<CountRecord> out;
    for (std::size_t i = 0; i < groups.size(); ++i) {
        const auto basis = groups[i].projectors();
        auto records = simulate_counts(rho, basis, flux, derive_seed(seed, i));
        out.insert(out.end(), records.begin(), records.end());
    }
    return out;
}

// ---------------------------------------------------------------------------
// Probability tables

ProbabilityTable ProbabilityTable::from_records(std::span<const CountRecord> records) {
    std::map<BasisGroup, std::vector<const CountRecord*>> by_group;
    for (const auto& r : records) {
        if (r.counts < 0) throw DomainError("count record with negative counts");
        if (group_of(r.projector) != r.group) throw BasisError("count record filed under the wrong basis group");
        by_group[r.group].push_back(&r);
    }

    ProbabilityTable table;
    for (const auto& [group, members] : by_group) {
        const auto expected = group.projectors();
        for (const auto& p : expected) {
            const auto hits = std::count_if(members.begin(), members.end(),
                                            [&](const CountRecord* r) { return r->projector == p; });
            if (hits != 1) {
                throw BasisError("basis group " + group.label() + " needs exactly one record for " + p.label());
            }
        }
        std::int64_t total = 0;
        for (const auto* r : members) total += r->counts;
        if (total == 0) throw UndefinedProbabilityError("basis group " + group.label() + " has zero total counts");
        for (const auto* r : members) {
            table.probs_[r->projector] = static_cast<double>(r->counts) / static_cast<double>(total);
        }
    }
    return table;
}

ProbabilityTable ProbabilityTable::exact(const DensityMatrix& rho, std::span<const BasisGroup> groups) {
    ProbabilityTable table;
    for (const auto& g : groups) {
        for (const auto& p : g.projectors()) table.probs_[p] = expect(rho, p.matrix());
    }
    return table;
}

double ProbabilityTable::probability(const LocalProjector& p) const {
    const auto it = probs_.find(p);
    if (it == probs_.end()) throw BasisError("no counts recorded for projector " + p.label());
    if (std::find(touched_.begin(), touched_.end(), p) == touched_.end()) touched_.push_back(p);
    return it->second;
}

bool ProbabilityTable::has_group(const BasisGroup& g) const {
    return probs_.contains(g.projectors().front());
}

std::vector<BasisGroup> ProbabilityTable::groups() const {
    std::vector<BasisGroup> out;
    for (const auto& [p, prob] : probs_) {
        const auto g = group_of(p);
        if (std::find(out.begin(), out.end(), g) == out.end()) out.push_back(g);
    }
    return out;
}

double ProbabilityTable::correlator(int pauli_a, int pauli_b) const {
    std::vector<BasisGroup> candidates;
    if (pauli_a != 0 && pauli_b != 0) {
        candidates.push_back({pauli_basis(pauli_a), pauli_basis(pauli_b)});
    } else if (pauli_a != 0) {
        const auto a = pauli_basis(pauli_a);
        candidates = {{a, a}, {a, LocalBasis::Z}, {a, LocalBasis::X}, {a, LocalBasis::Y}};
    } else {
        const auto b = pauli_basis(pauli_b);
        candidates = {{b, b}, {LocalBasis::Z, b}, {LocalBasis::X, b}, {LocalBasis::Y, b}};
    }
    const auto found = std::find_if(candidates.begin(), candidates.end(), [&](const auto& g) { return has_group(g); });
    if (found == candidates.end()) {
        throw BasisError("no basis group available for correlator <" + std::to_string(pauli_a) + "," +
                         std::to_string(pauli_b) + ">");
    }
    const auto projectors = found->projectors();
    double sum = 0.0;
    for (int oa = 0; oa < 2; ++oa) {
        for (int ob = 0; ob < 2; ++ob) {
            const double sign_a = (pauli_a == 0 || oa == 0) ? 1.0 : -1.0;
            const double sign_b = (pauli_b == 0 || ob == 0) ? 1.0 : -1.0;
            sum += sign_a * sign_b * probability(projectors[static_cast<std::size_t>(2 * oa + ob)]);
        }
    }
    return sum;
}

Complex ProbabilityTable::pauli_expectation(const Matrix& op) const {
    const auto coeffs = pauli::expand(op);
    Complex sum = coeffs[0];
    for (int a = 0; a < 4; ++a) {
        for (int b = 0; b < 4; ++b) {
            const Complex c = coeffs[static_cast<std::size_t>(4 * a + b)];
            if ((a == 0 && b == 0) || std::abs(c) < 1e-12) continue;
            sum += c * correlator(a, b);
        }
    }
    return sum;
}

double estimate_probability(std::span<const CountRecord> records, const LocalProjector& target) {
    const BasisGroup group = group_of(target);
    std::vector<CountRecord> members;
    for (const auto& r : records) {
        if (r.group == group) members.push_back(r);
    }
    return ProbabilityTable::from_records(members).probability(target);
}

// ---------------------------------------------------------------------------
// Witness estimation

WitnessEstimate estimate_witness(const ProbabilityTable& table, const WitnessSpec& spec) {
    WitnessEstimate est;
    if (spec.decomposition().empty()) {
        est.w_l = table.pauli_expectation(spec.w_l()).real();
    } else {
        for (const auto& t : spec.decomposition()) est.w_l += t.coefficient * table.probability(t.projector);
    }

    if (spec.diagonal_unitary()) {
        const auto zz = BasisGroup{LocalBasis::Z, LocalBasis::Z}.projectors();
        for (std::size_t i = 0; i < 4; ++i) est.u += spec.unitary()(i, i).real() * table.probability(zz[i]);
    } else {
        est.u = table.pauli_expectation(spec.u_pt()).real();
    }

    Complex a = est.w_l;
    if (max_abs_diff(spec.eta_u_pt(), spec.w_l()) > tol::kAlgebraic) a = table.pauli_expectation(spec.eta_u_pt());

    est.w_inf = nonlinear_infinity(est.w_l, a, est.u);
    return est;
}

WitnessEstimate estimate_witness(std::span<const CountRecord> records, const WitnessSpec& spec) {
    return estimate_witness(ProbabilityTable::from_records(records), spec);
}

std::vector<LocalProjector> analysis_projectors(const WitnessSpec& spec) {
    // Every group at uniform probability: only which entries are read matters.
    ProbabilityTable table = ProbabilityTable::exact(DensityMatrix::maximally_mixed(4), tomography_groups());
    table.reset_touched();
    (void)estimate_witness(table, spec);
    return table.touched();
}

WitnessEstimates mc_error_bars(std::span<const CountRecord> records, const WitnessSpec& spec, int n_mc,
                               std::uint64_t seed) {
    if (n_mc < 2) throw ParameterError("mc_error_bars: n_mc must be >= 2 for a sample standard deviation");

    const WitnessEstimate point = estimate_witness(records, spec);

    std::mt19937_64 rng(seed);
    std::vector<CountRecord> resampled(records.begin(), records.end());
    std::vector<double> w_l;
    std::vector<double> u;
    std::vector<double> w_inf;
    w_l.reserve(static_cast<std::size_t>(n_mc));
    u.reserve(static_cast<std::size_t>(n_mc));
    w_inf.reserve(static_cast<std::size_t>(n_mc));

    for (int it = 0; it < n_mc; ++it) {
        for (std::size_t i = 0; i < records.size(); ++i) {
            resampled[i].counts = poisson_draw(static_cast<double>(records[i].counts), rng);
        }
        const auto est = estimate_witness(resampled, spec);
        w_l.push_back(est.w_l);
        u.push_back(est.u);
        if (const auto* v = std::get_if<double>(&est.w_inf)) w_inf.push_back(*v);
    }

    WitnessEstimates out;
    out.w_l = {point.w_l, sample_stddev(w_l), n_mc};
    out.u = {point.u, sample_stddev(u), n_mc};
    if (const auto* v = std::get_if<double>(&point.w_inf)) {
        out.w_inf = EstimatedValue{*v, sample_stddev(w_inf), n_mc};
    } else {
        out.singular = std::get<SingularVerdict>(point.w_inf);
    }
    return out;
}

// ---------------------------------------------------------------------------
// CSV

void write_counts_csv(std::ostream& out, std::span<const CountRecord> records) {
    out << "basis_group,ketA_label,ketB_label,counts,flux,seed\n";
    for (const auto& r : records) {
        std::ostringstream flux;
        flux.precision(17);
        flux << r.flux;
        out << r.group.label() << ',' << to_string(r.projector.a) << ',' << to_string(r.projector.b) << ','
            << r.counts << ',' << flux.str() << ',' << r.seed << '\n';
    }
}

std::vector<CountRecord> read_counts_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != "basis_group,ketA_label,ketB_label,counts,flux,seed") {
        throw ConfigError("counts CSV: missing or unexpected header");
    }
    std::vector<CountRecord> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (cells.size() != 6) throw ConfigError("counts CSV: expected 6 columns in '" + line + "'");
        try {
            CountRecord r;
            r.group = parse_basis_group(cells[0]);
            r.projector = {parse_local_ket(cells[1]), parse_local_ket(cells[2])};
            r.counts = std::stoll(cells[3]);
            r.flux = std::stod(cells[4]);
            r.seed = std::stoull(cells[5]);
            if (group_of(r.projector) != r.group) throw ConfigError("counts CSV: projector/group mismatch");
            out.push_back(r);
        } catch (const std::logic_error&) {
            throw ConfigError("counts CSV: malformed number in '" + line + "'");
        }
    }
    return out;
}

}  // namespace nlw
