#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "nlw/errors.hpp"
#include "nlw/measurement.hpp"
#include "nlw/states.hpp"
#include "support/random_states.hpp"

using namespace nlw;
using std::numbers::pi;

namespace {

const BasisGroup kZZ{LocalBasis::Z, LocalBasis::Z};
const BasisGroup kXX{LocalBasis::X, LocalBasis::X};

std::vector<CountRecord> records_for(BasisGroup g, std::array<std::int64_t, 4> counts) {
    std::vector<CountRecord> out;
    const auto ps = g.projectors();
    for (std::size_t i = 0; i < 4; ++i) out.push_back({ps[i], counts[i], g, 1000.0, 7});
    return out;
}

/// Exact-probability records scaled by `flux`, rounded to integers.
std::vector<CountRecord> exact_records(const DensityMatrix& rho, double flux) {
    std::vector<CountRecord> out;
    for (const auto& g : witness_groups()) {
        for (const auto& p : g.projectors()) {
            const double prob = std::max(0.0, expect(rho, p.matrix()));
            out.push_back({p, static_cast<std::int64_t>(std::llround(prob * flux)), g, flux, 0});
        }
    }
    return out;
}

double mean_of(const std::vector<double>& xs) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

double stddev_of(const std::vector<double>& xs) {
    const double m = mean_of(xs);
    double ss = 0.0;
    for (double x : xs) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

}  // namespace

TEST_CASE("basis groups") {
    CHECK(kZZ.label() == "zz");
    CHECK(parse_basis_group("xy") == BasisGroup{LocalBasis::X, LocalBasis::Y});
    CHECK_THROWS_AS((void)parse_basis_group("zq"), ConfigError);
    CHECK(witness_groups().size() == 3);
    CHECK(tomography_groups().size() == 9);
    for (const auto& g : tomography_groups()) {
        Matrix sum(4);
        for (const auto& p : g.projectors()) {
            CHECK(group_of(p) == g);
            sum += p.matrix();
        }
        CHECK(max_abs_diff(sum, Matrix::identity(4)) <= 1e-15);
    }
    CHECK(derive_seed(1, 0) != derive_seed(1, 1));
    CHECK(derive_seed(1, 0) != derive_seed(2, 0));
    CHECK(derive_seed(5, 3) == derive_seed(5, 3));
}

TEST_CASE("simulate_counts examples") {
    const auto bell = DensityMatrix::pure(make_correlated(1.0, 0.0));
    const auto zz = kZZ.projectors();

    SUBCASE("Phi+ in the computational basis") {
        const auto r = simulate_counts(bell, zz, 1e6, 42);
        REQUIRE(r.size() == 4);
        CHECK(r[1].counts == 0);
        CHECK(r[2].counts == 0);
        const double sigma = std::sqrt(5e5);
        CHECK(std::abs(static_cast<double>(r[0].counts) - 5e5) <= 5.0 * sigma);
        CHECK(std::abs(static_cast<double>(r[3].counts) - 5e5) <= 5.0 * sigma);
        for (const auto& rec : r) {
            CHECK(rec.flux == 1e6);
            CHECK(rec.seed == 42);
            CHECK(rec.group == kZZ);
        }
    }
    SUBCASE("maximally mixed has flux / 4 means") {
        const auto mixed = DensityMatrix::maximally_mixed(4);
        std::array<double, 4> sums{};
        const int trials = 400;
        for (int s = 0; s < trials; ++s) {
            const auto r = simulate_counts(mixed, kXX.projectors(), 1e4, static_cast<std::uint64_t>(s));
            for (std::size_t i = 0; i < 4; ++i) sums[i] += static_cast<double>(r[i].counts);
        }
        const double sigma_of_mean = std::sqrt(2500.0 / trials);
        for (double s : sums) CHECK(std::abs(s / trials - 2500.0) <= 5.0 * sigma_of_mean);
    }
    SUBCASE("fixed seed is deterministic") {
        const auto a = simulate_counts(bell, kXX.projectors(), 1e4, 9);
        const auto b = simulate_counts(bell, kXX.projectors(), 1e4, 9);
        const auto c = simulate_counts(bell, kXX.projectors(), 1e4, 10);
        bool differs = false;
        for (std::size_t i = 0; i < 4; ++i) {
            CHECK(a[i].counts == b[i].counts);
            differs = differs || a[i].counts != c[i].counts;
        }
        CHECK(differs);
    }
    SUBCASE("incomplete or mixed bases") {
        std::vector<LocalProjector> three(zz.begin(), zz.begin() + 3);
        CHECK_THROWS_AS((void)simulate_counts(bell, three, 1e4, 1), BasisError);
        std::vector<LocalProjector> dup{zz[0], zz[0], zz[1], zz[2]};
        CHECK_THROWS_AS((void)simulate_counts(bell, dup, 1e4, 1), BasisError);
        auto mixed = std::vector<LocalProjector>(zz.begin(), zz.end());
        mixed[3] = kXX.projectors()[3];
        CHECK_THROWS_AS((void)simulate_counts(bell, mixed, 1e4, 1), BasisError);
        CHECK_THROWS_AS((void)simulate_counts(bell, zz, 0.0, 1), DomainError);
    }
}

TEST_CASE("estimate_probability examples") {
    const auto zz = kZZ.projectors();
    CHECK(estimate_probability(records_for(kZZ, {500, 0, 0, 500}), zz[0]) == 0.5);
    for (const auto& p : zz) CHECK(estimate_probability(records_for(kZZ, {250, 250, 250, 250}), p) == 0.25);
    CHECK_THROWS_AS((void)estimate_probability(records_for(kZZ, {0, 0, 0, 0}), zz[0]), UndefinedProbabilityError);
    CHECK_THROWS_AS((void)estimate_probability(records_for(kZZ, {1, 1, 1, 1}), kXX.projectors()[0]), BasisError);

    auto partial = records_for(kZZ, {1, 1, 1, 1});
    partial.pop_back();
    CHECK_THROWS_AS((void)estimate_probability(partial, zz[0]), BasisError);

    const auto bell = DensityMatrix::pure(make_correlated(1.0, 0.0));
    const auto r = simulate_counts(bell, zz, 1e6, 123);
    CHECK(std::abs(estimate_probability(r, zz[0]) - 0.5) <= 3e-3);
}

TEST_CASE("estimate_witness on exact probabilities") {
    const auto groups = witness_groups();
    SUBCASE("correlated p = 0.9") {
        const auto rho = mix_white(make_correlated(1.0, 0.0), 0.9);
        const auto e = estimate_witness(ProbabilityTable::exact(rho, groups), make_spec(BellLabel::PhiPlus));
        CHECK(e.w_l == doctest::Approx(-0.425).epsilon(1e-12));
        CHECK(e.u == doctest::Approx(-0.9).epsilon(1e-12));
        CHECK(std::get<double>(e.w_inf) == doctest::Approx(-4.0375).epsilon(1e-12));
    }
    SUBCASE("maximally mixed") {
        const auto e = estimate_witness(ProbabilityTable::exact(DensityMatrix::maximally_mixed(4), groups),
                                        make_spec(BellLabel::PhiPlus));
        CHECK(e.w_l == doctest::Approx(0.25).epsilon(1e-14));
        CHECK(std::abs(e.u) <= 1e-15);
        CHECK(std::get<double>(e.w_inf) == doctest::Approx(0.125).epsilon(1e-14));
    }
    SUBCASE("anti-correlated mirror") {
        const auto rho = mix_white(make_anticorrelated(1.0, 0.0), 0.9);
        const auto e = estimate_witness(ProbabilityTable::exact(rho, groups),
                                        make_spec(BellLabel::PsiPlus, UnitaryKind::SigmaZZPos));
        CHECK(e.w_l == doctest::Approx(-0.425).epsilon(1e-12));
        CHECK(e.u == doctest::Approx(-0.9).epsilon(1e-12));
        CHECK(std::get<double>(e.w_inf) == doctest::Approx(-4.0375).epsilon(1e-12));
    }
    SUBCASE("pure input is singular") {
        const auto e = estimate_witness(
            ProbabilityTable::exact(DensityMatrix::pure(make_correlated(1.0, 0.3)), groups),
            make_spec(BellLabel::PhiPlus));
        CHECK(is_singular(e.w_inf));
    }
    SUBCASE("counts for a missing group") {
        const auto only_zz = std::vector<BasisGroup>{kZZ};
        const auto table = ProbabilityTable::exact(DensityMatrix::maximally_mixed(4), only_zz);
        CHECK_THROWS_AS((void)estimate_witness(table, make_spec(BellLabel::PhiPlus)), BasisError);
    }
}

TEST_CASE("estimates agree with direct traces for random states and every unitary") {
    std::mt19937_64 rng(55);
    const auto groups = witness_groups();
    for (int trial = 0; trial < 200; ++trial) {
        const auto rho = testing::ginibre(rng);
        const auto table = ProbabilityTable::exact(rho, groups);
        for (auto label : {BellLabel::PhiPlus, BellLabel::PhiMinus, BellLabel::PsiPlus, BellLabel::PsiMinus}) {
            for (auto kind : {UnitaryKind::SigmaZZNeg, UnitaryKind::SigmaZZPos, UnitaryKind::TwicePsiPlusWitness}) {
                const auto spec = make_spec(label, kind);
                const auto e = estimate_witness(table, spec);
                CHECK(std::abs(e.w_l - w1(rho, spec)) <= 1e-12);
                CHECK(std::abs(e.u - contrast(rho, spec).real()) <= 1e-12);
                const auto direct = w_infinity(rho, spec);
                REQUIRE(is_singular(direct) == is_singular(e.w_inf));
                if (!is_singular(direct)) {
                    CHECK(std::abs(std::get<double>(e.w_inf) - std::get<double>(direct)) <= 1e-9);
                }
            }
        }
    }
}

TEST_CASE("eight analysis projectors per witness") {
    for (auto label : {BellLabel::PhiPlus, BellLabel::PhiMinus, BellLabel::PsiPlus, BellLabel::PsiMinus}) {
        const auto spec = make_spec(label);
        const auto used = analysis_projectors(spec);
        const std::set<LocalProjector> distinct(used.begin(), used.end());
        CHECK(distinct.size() == 8);
        const auto required = required_measurements(spec);
        CHECK(distinct == std::set<LocalProjector>(required.begin(), required.end()));
    }
}

TEST_CASE("mc_error_bars examples") {
    const auto spec = make_spec(BellLabel::PhiPlus);
    SUBCASE("vanishing shot noise") {
        const auto rho = mix_white(make_correlated(1.0, 0.7), 0.8);
        const auto e = mc_error_bars(exact_records(rho, 1e12), spec, 20, 3);
        CHECK(e.w_l.sigma <= 1e-4);
        CHECK(e.u.sigma <= 1e-4);
        REQUIRE(e.w_inf);
        CHECK(e.w_inf->sigma <= 1e-4);
        CHECK(e.w_l.n_mc == 20);
    }
    SUBCASE("at least two resamples") {
        const auto r = exact_records(DensityMatrix::maximally_mixed(4), 1e4);
        CHECK_THROWS_AS((void)mc_error_bars(r, spec, 1, 3), ParameterError);
        CHECK_THROWS_AS((void)mc_error_bars(r, spec, 0, 3), ParameterError);
    }
    SUBCASE("deterministic given the seed") {
        const auto r = simulate_groups(mix_white(make_correlated(1.0, 0.2), 0.7), witness_groups(), 1e4, 5);
        const auto a = mc_error_bars(r, spec, 50, 8);
        const auto b = mc_error_bars(r, spec, 50, 8);
        CHECK(a.w_l.sigma == b.w_l.sigma);
        CHECK(a.w_inf->sigma == b.w_inf->sigma);
    }
    SUBCASE("Phi+ has no spread in the linear witness") {
        const auto bell = DensityMatrix::pure(make_correlated(1.0, 0.0));
        const auto e = mc_error_bars(simulate_groups(bell, witness_groups(), 1e4, 1), spec, 100, 2);
        CHECK(e.w_l.value == doctest::Approx(-0.5));
        CHECK(e.w_l.sigma <= 1e-12);
        CHECK(e.singular.has_value());
        CHECK_FALSE(e.w_inf.has_value());
    }
}

TEST_CASE("resampling sigma tracks the spread of independent simulations") {
    const auto spec = make_spec(BellLabel::PhiPlus);
    for (double p : {0.6, 0.9}) {
        const auto rho = mix_white(make_correlated(1.0, 0.4), p);
        const auto groups = witness_groups();
        std::vector<double> w_l;
        std::vector<double> u;
        for (std::uint64_t s = 0; s < 1000; ++s) {
            const auto e = estimate_witness(simulate_groups(rho, groups, 1e4, derive_seed(77, s)), spec);
            w_l.push_back(e.w_l);
            u.push_back(e.u);
        }
        const auto bars = mc_error_bars(simulate_groups(rho, groups, 1e4, 4242), spec, 100, 99);
        CAPTURE(p);
        const double ratio_w = bars.w_l.sigma / stddev_of(w_l);
        const double ratio_u = bars.u.sigma / stddev_of(u);
        CHECK(ratio_w <= 1.5);
        CHECK(ratio_w >= 1.0 / 1.5);
        CHECK(ratio_u <= 1.5);
        CHECK(ratio_u >= 1.0 / 1.5);
    }
}

TEST_CASE("estimators are unbiased at flux 1e5") {
    std::mt19937_64 rng(606);
    const auto groups = witness_groups();
    const auto spec = make_spec(BellLabel::PhiPlus);
    for (int state = 0; state < 10; ++state) {
        const auto rho = testing::ginibre(rng);
        std::vector<double> w_l;
        std::vector<double> u;
        for (std::uint64_t s = 0; s < 1000; ++s) {
            const auto e = estimate_witness(simulate_groups(rho, groups, 1e5, derive_seed(1000 + state, s)), spec);
            w_l.push_back(e.w_l);
            u.push_back(e.u);
        }
        CAPTURE(state);
        CHECK(std::abs(mean_of(w_l) - w1(rho, spec)) <= 3.0 * stddev_of(w_l) / std::sqrt(1000.0));
        CHECK(std::abs(mean_of(u) - contrast(rho, spec).real()) <= 3.0 * stddev_of(u) / std::sqrt(1000.0));
    }
}

TEST_CASE("counts csv round trip") {
    const auto records = simulate_groups(mix_white(make_correlated(1.0, 1.0), 0.5), tomography_groups(), 1e4, 17);
    std::stringstream buffer;
    write_counts_csv(buffer, records);
    const std::string text = buffer.str();
    CHECK(text.rfind("basis_group,ketA_label,ketB_label,counts,flux,seed\n", 0) == 0);
    const auto back = read_counts_csv(buffer);
    REQUIRE(back.size() == records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        CHECK(back[i].projector == records[i].projector);
        CHECK(back[i].counts == records[i].counts);
        CHECK(back[i].group == records[i].group);
        CHECK(back[i].flux == records[i].flux);
        CHECK(back[i].seed == records[i].seed);
    }
    std::stringstream bad("basis_group,ketA_label,ketB_label,counts,flux,seed\nzz,j,x+,3,1,1\n");
    CHECK_THROWS_AS((void)read_counts_csv(bad), ConfigError);
}
