#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "nlw/errors.hpp"
#include "nlw/oracle.hpp"
#include "nlw/states.hpp"
#include "support/eigen_oracle.hpp"

using namespace nlw;
using std::numbers::pi;

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

double ket_distance(const Ket& a, const Ket& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

/// |<a|b>| = 1 means equal up to global phase.
double overlap(const Ket& a, const Ket& b) { return std::abs(a.inner(b)); }

}  // namespace

TEST_CASE("make_correlated examples") {
    CHECK(ket_distance(make_correlated(1.0, 0.0), Ket{kInvSqrt2, 0.0, 0.0, kInvSqrt2}) <= 1e-15);
    CHECK(ket_distance(make_correlated(0.0, 1.234), Ket{1.0, 0.0, 0.0, 0.0}) <= 1e-15);
    CHECK(ket_distance(make_correlated(1.0, pi / 2), Ket{kInvSqrt2, 0.0, 0.0, Complex(0.0, kInvSqrt2)}) <= 1e-15);
}

TEST_CASE("make_anticorrelated examples") {
    CHECK(ket_distance(make_anticorrelated(1.0, 0.0), Ket{0.0, kInvSqrt2, kInvSqrt2, 0.0}) <= 1e-15);
    CHECK(ket_distance(make_anticorrelated(1.0, pi), Ket{0.0, kInvSqrt2, -kInvSqrt2, 0.0}) <= 1e-15);
    const double n = std::sqrt(1.25);
    const Ket expected{0.0, 1.0 / n, 0.5 * std::polar(1.0, pi / 3) / n, 0.0};
    CHECK(ket_distance(make_anticorrelated(0.5, pi / 3), expected) <= 1e-15);
}

TEST_CASE("pure states are normalised for all epsilon and phase") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> eps(0.0, 20.0);
    std::uniform_real_distribution<double> ph(-10.0, 10.0);
    for (int trial = 0; trial < 1000; ++trial) {
        const double e = eps(rng);
        const double p = ph(rng);
        CHECK(std::abs(make_correlated(e, p).norm() - 1.0) <= 1e-12);
        CHECK(std::abs(make_anticorrelated(e, p).norm() - 1.0) <= 1e-12);
    }
}

TEST_CASE("mix_white examples and errors") {
    const Ket phi = make_correlated(1.0, 0.0);
    CHECK(max_abs_diff(mix_white(phi, 1.0).matrix(), Matrix::projector(phi)) <= 1e-15);
    CHECK(max_abs_diff(mix_white(make_anticorrelated(0.3, 2.0), 0.0).matrix(), Matrix::identity(4) * Complex(0.25)) ==
          0.0);
    const auto third = mix_white(phi, 1.0 / 3.0);
    CHECK(std::abs(testing::reference_min_eigenvalue(partial_transpose_b(third.matrix()))) <= 1e-15);

    CHECK_THROWS_AS((void)mix_white(phi, -0.01), DomainError);
    CHECK_THROWS_AS((void)mix_white(phi, 1.01), DomainError);
    CHECK_THROWS_AS((void)mix_white(phi, std::nan("")), DomainError);
}

TEST_CASE("mix_white spectrum") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const double p = u(rng);
        const Ket psi = make_correlated(3.0 * u(rng), 7.0 * u(rng));
        const auto eig = testing::reference_spectrum(mix_white(psi, p).matrix());
        for (int i = 0; i < 3; ++i) CHECK(std::abs(eig[static_cast<std::size_t>(i)] - (1.0 - p) / 4.0) <= 1e-10);
        CHECK(std::abs(eig[3] - (p + (1.0 - p) / 4.0)) <= 1e-10);
    }
}

TEST_CASE("Werner threshold on a p grid") {
    const Ket phi = make_correlated(1.0, 0.0);
    for (int i = 0; i <= 5; ++i) {
        const double p = 0.30 + 0.02 * i;
        const double min_eig = testing::reference_min_eigenvalue(partial_transpose_b(mix_white(phi, p).matrix()));
        CAPTURE(p);
        CHECK((min_eig < -1e-12) == (p > 1.0 / 3.0));
        CHECK(negativity(mix_white(phi, p)).entangled == (p > 1.0 / 3.0));
    }
}

TEST_CASE("dephasing scales only the coherences") {
    const auto rho = mix_white(make_correlated(1.0, 0.7), 0.8);
    const auto d = dephase(rho, 0.25);
    CHECK(std::abs(d(0, 3) - 0.25 * rho(0, 3)) <= 1e-15);
    CHECK(std::abs(d(3, 0) - 0.25 * rho(3, 0)) <= 1e-15);
    for (std::size_t i = 0; i < 4; ++i) CHECK(d(i, i) == rho(i, i));
    CHECK(max_abs_diff(dephase(rho, 1.0).matrix(), rho.matrix()) == 0.0);
    CHECK_THROWS_AS((void)dephase(rho, 1.5), DomainError);
    CHECK_THROWS_AS((void)dephase(rho, -0.1), DomainError);

    const auto anti = mix_white(make_anticorrelated(1.0, 0.7), 1.0);
    const auto da = dephase(anti, 0.5);
    CHECK(std::abs(da(1, 2) - 0.5 * anti(1, 2)) <= 1e-15);
    CHECK(std::abs(da(2, 1) - 0.5 * anti(2, 1)) <= 1e-15);
}

TEST_CASE("OAM labels and subspaces") {
    CHECK(OamLabel(3).flipped().ell() == -3);
    CHECK_NOTHROW(OamLabel(-10));
    CHECK_THROWS_AS(OamLabel(11), DomainError);
    CHECK_NOTHROW(OamLabel(11, 20));
    CHECK_THROWS_AS(QubitSubspace({OamLabel(1), OamLabel(1)}, {OamLabel(0), OamLabel(1)}), DomainError);
}

TEST_CASE("dove prism examples") {
    const DovePrism prism(0.9);
    const auto zero = prism.apply(OamLabel(0));
    CHECK(zero.ell.ell() == 0);
    CHECK(zero.phase == 0.0);

    const auto two = DovePrism(pi / 2).apply(OamLabel(2));
    CHECK(two.ell.ell() == -2);
    const Complex factor = std::polar(1.0, two.phase);
    CHECK(std::abs(factor - Complex(-1.0)) <= 1e-15);

    for (int ell = -5; ell <= 5; ++ell) {
        const auto back = prism.apply(prism.apply(OamLabel(ell)));
        CHECK(back.ell.ell() == ell);
        CHECK(std::abs(back.phase) <= 1e-15);
    }
}

TEST_CASE("prepare_via_prisms examples") {
    SUBCASE("one prism at zero") {
        const auto s = prepare_via_prisms(2, 1.0, 0.0);
        CHECK(s.meta.correlated);
        CHECK(s.meta.phase == doctest::Approx(0.0));
        CHECK(overlap(ideal_ket(s.meta), make_correlated(1.0, 0.0)) == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(fidelity(s.rho, make_correlated(1.0, 0.0)) == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(s.subspace.arm_a().j.ell() == 0);
        CHECK(s.subspace.arm_a().k.ell() == 2);
        CHECK(s.subspace.arm_b().j.ell() == 0);
        CHECK(s.subspace.arm_b().k.ell() == 2);
    }
    SUBCASE("one prism at pi/2 gives the Phi- form") {
        const auto s = prepare_via_prisms(2, 1.0, pi / 2);
        CHECK(phase_distance(s.meta.phase, pi) <= 1e-12);
        CHECK(fidelity(s.rho, make_correlated(1.0, pi)) == doctest::Approx(1.0).epsilon(1e-14));
    }
    SUBCASE("two prisms at equal angles") {
        const auto s = prepare_via_prisms(2, 1.0, 0.8, 0.8);
        CHECK_FALSE(s.meta.correlated);
        CHECK(phase_distance(s.meta.phase, 0.0) <= 1e-12);
        CHECK(fidelity(s.rho, make_anticorrelated(1.0, 0.0)) == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(s.subspace.arm_a().j.ell() == 0);
        CHECK(s.subspace.arm_a().k.ell() == -2);
        CHECK(s.subspace.arm_b().j.ell() == 2);
        CHECK(s.subspace.arm_b().k.ell() == 0);
    }
    SUBCASE("degenerate subspace") {
        CHECK_THROWS_AS((void)prepare_via_prisms(0, 1.0, 0.3), DomainError);
        CHECK_THROWS_AS((void)prepare_via_prisms(-1, 1.0, 0.3), DomainError);
    }
}

TEST_CASE("prism phases follow the closed forms for random angles") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> angle(-2.0 * pi, 2.0 * pi);
    std::uniform_int_distribution<int> ells(1, 5);
    for (int trial = 0; trial < 100; ++trial) {
        const int ell = ells(rng);
        const double tb = angle(rng);
        const double ta = angle(rng);

        const auto one = prepare_via_prisms(ell, 1.0, tb);
        CHECK(phase_distance(one.meta.phase, ell * tb) <= 1e-12);
        CHECK(fidelity(one.rho, make_correlated(1.0, ell * tb)) == doctest::Approx(1.0).epsilon(1e-12));

        const auto two = prepare_via_prisms(ell, 1.0, tb, ta);
        CHECK(phase_distance(two.meta.phase, ell * (tb - ta)) <= 1e-12);
        CHECK(fidelity(two.rho, make_anticorrelated(1.0, ell * (tb - ta))) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("pure prepared states have rank one") {
    std::mt19937_64 rng(32);
    std::uniform_real_distribution<double> u(0.0, 3.0);
    for (int trial = 0; trial < 50; ++trial) {
        const auto s = prepare_via_prisms(2, u(rng), u(rng), trial % 2 ? std::optional(u(rng)) : std::nullopt);
        CHECK(testing::reference_spectrum(s.rho.matrix()).back() >= 1.0 - 1e-9);
    }
}

TEST_CASE("with_noise applies mixing then dephasing") {
    const auto s = prepare_via_prisms(2, 1.0, 0.4);
    const auto noisy = with_noise(s, 0.7, 0.5);
    const auto expected = dephase(mix_white(ideal_ket(s.meta), 0.7), 0.5);
    CHECK(max_abs_diff(noisy.rho.matrix(), expected.matrix()) <= 1e-14);
    CHECK(noisy.meta.purity_p == 0.7);
    CHECK(noisy.meta.dephasing_gamma == 0.5);
}

TEST_CASE("phase helpers") {
    CHECK(wrap_phase(-0.5) == doctest::Approx(2.0 * pi - 0.5));
    CHECK(wrap_phase(2.0 * pi) == doctest::Approx(0.0));
    CHECK(wrap_phase(7.0) == doctest::Approx(7.0 - 2.0 * pi));
    CHECK(phase_distance(0.1, 2.0 * pi - 0.1) == doctest::Approx(0.2));
    CHECK(phase_distance(0.0, pi) == doctest::Approx(pi));
}

TEST_CASE("prepared state json") {
    const auto j = to_json(prepare_via_prisms(3, 1.0, 0.2, 0.1));
    CHECK(j["dim"] == 4);
    CHECK(j["meta"]["ell"] == 3);
    CHECK(j["meta"]["thetaA"] == doctest::Approx(0.1));
    CHECK(j["meta"]["thetaB"] == doctest::Approx(0.2));
    CHECK(j["meta"]["correlated"] == false);
    CHECK(j["meta"].contains("epsilon"));
    CHECK(j["meta"].contains("p"));
    CHECK(j["meta"].contains("phase"));
    CHECK(j["meta"]["phase"].get<double>() == doctest::Approx(wrap_phase(0.3)));
    CHECK(to_json(prepare_via_prisms(3, 1.0, 0.2))["meta"]["thetaA"].is_null());
}
