#include "nlw/states.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "nlw/errors.hpp"

namespace nlw {

namespace {

constexpr std::size_t kJJ = 0;
constexpr std::size_t kJK = 1;
constexpr std::size_t kKJ = 2;
constexpr std::size_t kKK = 3;

Ket two_term(std::size_t first, std::size_t second, double epsilon, double phase) {
    if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) throw DomainError("epsilon must be finite and >= 0");
    if (!std::isfinite(phase)) throw DomainError("phase must be finite");
    const double norm = 1.0 / std::sqrt(1.0 + epsilon * epsilon);
    std::vector<Complex> amps(4);
    amps[first] = norm;
    amps[second] = norm * epsilon * std::polar(1.0, phase);
    return Ket(std::move(amps));
}

DensityMatrix mix_matrix(const Matrix& pure, double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("mixing probability p must lie in [0, 1]");
    return DensityMatrix(pure * Complex(p) + Matrix::identity(4) * Complex((1.0 - p) / 4.0));
}

struct ModeTerm {
    ModeImage a;
    ModeImage b;
    double amplitude;
};

std::size_t slot(const ArmModes& arm, OamLabel mode) {
    if (mode == arm.j) return 0;
    if (mode == arm.k) return 1;
    throw NumericalError("prepare_via_prisms: mode " + std::to_string(mode.ell()) +
                         " escaped the qubit subspace");
}

}  // namespace

OamLabel::OamLabel(int ell, int max_abs) : ell_(ell) {
    if (std::abs(ell) > max_abs) {
        throw DomainError("OAM label " + std::to_string(ell) + " exceeds |ell| <= " + std::to_string(max_abs));
    }
}

QubitSubspace::QubitSubspace(ArmModes arm_a, ArmModes arm_b) : arm_a_(arm_a), arm_b_(arm_b) {
    if (arm_a_.j == arm_a_.k || arm_b_.j == arm_b_.k) {
        throw DomainError("qubit subspace needs two distinct modes per arm");
    }
}

Ket make_correlated(double epsilon, double phase) { return two_term(kJJ, kKK, epsilon, phase); }

Ket make_anticorrelated(double epsilon, double phase) { return two_term(kJK, kKJ, epsilon, phase); }

DensityMatrix mix_white(const Ket& psi, double p) {
    if (psi.dim() != 4) throw DimensionError("mix_white: expected a two-qubit ket");
    if (!psi.is_normalized()) throw DomainError("mix_white: ket is not normalized");
    return mix_matrix(Matrix::projector(psi), p);
}

DensityMatrix dephase(const DensityMatrix& rho, double gamma) {
    if (!(gamma >= 0.0 && gamma <= 1.0)) throw DomainError("dephasing gamma must lie in [0, 1]");
    if (rho.dim() != 4) throw DimensionError("dephase: expected a 4x4 density matrix");
    Matrix m = rho.matrix();
    for (auto [r, c] : {std::pair{kJJ, kKK}, std::pair{kJK, kKJ}}) {
        m(r, c) *= gamma;
        m(c, r) *= gamma;
    }
    return DensityMatrix(std::move(m));
}

double wrap_phase(double angle) {
    constexpr double kTwoPi = 2.0 * std::numbers::pi;
    double wrapped = std::fmod(angle, kTwoPi);
    if (wrapped < 0.0) wrapped += kTwoPi;
    if (wrapped >= kTwoPi) wrapped = 0.0;
    return wrapped;
}

double phase_distance(double a, double b) {
    const double d = wrap_phase(a - b);
    return std::min(d, 2.0 * std::numbers::pi - d);
}

ModeImage DovePrism::apply(OamLabel in) const { return apply(ModeImage{in, 0.0}); }

ModeImage DovePrism::apply(const ModeImage& in) const {
    const OamLabel out = in.ell.flipped();
    return {out, in.phase + static_cast<double>(out.ell()) * theta_};
}

PreparedState prepare_via_prisms(int ell, double epsilon, double theta_b, std::optional<double> theta_a) {
    if (ell < 1) throw DomainError("prepare_via_prisms: ell must be >= 1 (ell = 0 is a degenerate subspace)");
    if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) throw DomainError("epsilon must be finite and >= 0");
    const double norm = 1.0 / std::sqrt(1.0 + epsilon * epsilon);

    const OamLabel zero(0);
    const OamLabel plus(ell);
    const OamLabel minus(-ell);

    std::vector<ModeTerm> terms{
        {{zero, 0.0}, {zero, 0.0}, norm},
        {{plus, 0.0}, {minus, 0.0}, norm * epsilon},
    };

    const DovePrism prism_b(theta_b);
    for (auto& t : terms) t.b = prism_b.apply(t.b);
    if (theta_a) {
        const DovePrism prism_a(*theta_a);
        for (auto& t : terms) t.a = prism_a.apply(t.a);
    }

    const bool correlated = !theta_a.has_value();
    const QubitSubspace subspace = correlated ? QubitSubspace({zero, plus}, {zero, plus})
                                              : QubitSubspace({zero, minus}, {plus, zero});

    std::vector<Complex> amps(4);
    for (const auto& t : terms) {
        const std::size_t index = 2 * slot(subspace.arm_a(), t.a.ell) + slot(subspace.arm_b(), t.b.ell);
        amps[index] += t.amplitude * std::polar(1.0, t.a.phase + t.b.phase);
    }
    const Ket psi(std::move(amps));

    StateMeta meta;
    meta.epsilon = epsilon;
    meta.phase = wrap_phase((terms[1].a.phase + terms[1].b.phase) - (terms[0].a.phase + terms[0].b.phase));
    meta.purity_p = 1.0;
    meta.dephasing_gamma = 1.0;
    meta.correlated = correlated;
    meta.ell = ell;
    meta.theta_b = theta_b;
    meta.theta_a = theta_a;

    return {DensityMatrix::pure(psi), subspace, meta};
}

PreparedState with_noise(const PreparedState& state, double p, double gamma) {
    PreparedState out{dephase(mix_matrix(state.rho.matrix(), p), gamma), state.subspace, state.meta};
    out.meta.purity_p = state.meta.purity_p * p;
    out.meta.dephasing_gamma = state.meta.dephasing_gamma * gamma;
    return out;
}

Ket ideal_ket(const StateMeta& meta) {
    return meta.correlated ? make_correlated(meta.epsilon, meta.phase)
                           : make_anticorrelated(meta.epsilon, meta.phase);
}

nlohmann::json to_json(const PreparedState& state) {
    nlohmann::json j = to_json(state.rho.matrix());
    j["meta"] = {
        {"epsilon", state.meta.epsilon},
        {"phase", state.meta.phase},
        {"p", state.meta.purity_p},
        {"gamma", state.meta.dephasing_gamma},
        {"correlated", state.meta.correlated},
        {"ell", state.meta.ell},
        {"thetaA", state.meta.theta_a ? nlohmann::json(*state.meta.theta_a) : nlohmann::json(nullptr)},
        {"thetaB", state.meta.theta_b},
    };
    return j;
}

}  // namespace nlw
