#include "nlw/witness.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nlw/errors.hpp"

namespace nlw {

namespace {

constexpr double kFaithfulness = 1e-10;
constexpr double kPptMargin = 1e-8;

void push_unique(std::vector<LocalProjector>& out, const LocalProjector& p) {
    if (std::find(out.begin(), out.end(), p) == out.end()) out.push_back(p);
}

LocalKet basis_ket(LocalBasis basis, int outcome) {
    switch (basis) {
        case LocalBasis::Z: return outcome == 0 ? LocalKet::J : LocalKet::K;
        case LocalBasis::X: return outcome == 0 ? LocalKet::XPlus : LocalKet::XMinus;
        case LocalBasis::Y: return outcome == 0 ? LocalKet::YPlus : LocalKet::YMinus;
    }
    throw DomainError("unknown local basis");
}

LocalBasis basis_from_pauli(int index) {
    switch (index) {
        case 1: return LocalBasis::X;
        case 2: return LocalBasis::Y;
        case 3: return LocalBasis::Z;
        default: throw DomainError("identity has no measurement basis");
    }
}

// Product groups whose outcome statistics determine Tr(rho op).
std::vector<std::pair<LocalBasis, LocalBasis>> groups_for(const Matrix& op) {
    std::vector<std::pair<LocalBasis, LocalBasis>> groups;
    const auto coeffs = pauli::expand(op);
    for (int a = 0; a < 4; ++a) {
        for (int b = 0; b < 4; ++b) {
            if ((a == 0 && b == 0) || std::abs(coeffs[static_cast<std::size_t>(4 * a + b)]) < 1e-12) continue;
            const LocalBasis ba = basis_from_pauli(a == 0 ? b : a);
            const LocalBasis bb = basis_from_pauli(b == 0 ? a : b);
            const auto g = std::pair{ba, bb};
            if (std::find(groups.begin(), groups.end(), g) == groups.end()) groups.push_back(g);
        }
    }
    return groups;
}

void push_group(std::vector<LocalProjector>& out, LocalBasis a, LocalBasis b) {
    for (int oa = 0; oa < 2; ++oa) {
        for (int ob = 0; ob < 2; ++ob) push_unique(out, {basis_ket(a, oa), basis_ket(b, ob)});
    }
}

}  // namespace

std::string_view to_string(BellLabel label) {
    switch (label) {
        case BellLabel::PhiPlus: return "Phi+";
        case BellLabel::PhiMinus: return "Phi-";
        case BellLabel::PsiPlus: return "Psi+";
        case BellLabel::PsiMinus: return "Psi-";
    }
    return "?";
}

std::string_view to_string(UnitaryKind kind) {
    switch (kind) {
        case UnitaryKind::SigmaZZNeg: return "sigma_zz_neg";
        case UnitaryKind::SigmaZZPos: return "sigma_zz_pos";
        case UnitaryKind::TwicePsiPlusWitness: return "twice_WPsiPlus";
    }
    return "?";
}

BellLabel parse_bell_label(std::string_view text) {
    for (auto label : {BellLabel::PhiPlus, BellLabel::PhiMinus, BellLabel::PsiPlus, BellLabel::PsiMinus}) {
        if (text == to_string(label)) return label;
    }
    throw ConfigError("unknown Bell label '" + std::string(text) + "' (expected Phi+, Phi-, Psi+ or Psi-)");
}

UnitaryKind parse_unitary_kind(std::string_view text) {
    for (auto kind : {UnitaryKind::SigmaZZNeg, UnitaryKind::SigmaZZPos, UnitaryKind::TwicePsiPlusWitness}) {
        if (text == to_string(kind)) return kind;
    }
    throw ConfigError("unknown unitary '" + std::string(text) +
                      "' (expected sigma_zz_neg, sigma_zz_pos or twice_WPsiPlus)");
}

Ket bell_state(BellLabel label) {
    const double h = 1.0 / std::sqrt(2.0);
    switch (label) {
        case BellLabel::PhiPlus: return Ket{h, 0.0, 0.0, h};
        case BellLabel::PhiMinus: return Ket{h, 0.0, 0.0, -h};
        case BellLabel::PsiPlus: return Ket{0.0, h, h, 0.0};
        case BellLabel::PsiMinus: return Ket{0.0, h, -h, 0.0};
    }
    throw DomainError("unknown Bell label");
}

bool is_correlated_family(BellLabel label) {
    return label == BellLabel::PhiPlus || label == BellLabel::PhiMinus;
}

UnitaryKind default_unitary(BellLabel label) {
    return is_correlated_family(label) ? UnitaryKind::SigmaZZNeg : UnitaryKind::SigmaZZPos;
}

// ---------------------------------------------------------------------------
// Local kets and projectors

Ket local_ket(LocalKet which) {
    const double h = 1.0 / std::sqrt(2.0);
    switch (which) {
        case LocalKet::J: return Ket{1.0, 0.0};
        case LocalKet::K: return Ket{0.0, 1.0};
        case LocalKet::XPlus: return Ket{h, h};
        case LocalKet::XMinus: return Ket{h, -h};
        case LocalKet::YPlus: return Ket{h, Complex(0.0, h)};
        case LocalKet::YMinus: return Ket{h, Complex(0.0, -h)};
    }
    throw DomainError("unknown local ket");
}

std::string_view to_string(LocalKet which) {
    switch (which) {
        case LocalKet::J: return "j";
        case LocalKet::K: return "k";
        case LocalKet::XPlus: return "x+";
        case LocalKet::XMinus: return "x-";
        case LocalKet::YPlus: return "y+";
        case LocalKet::YMinus: return "y-";
    }
    return "?";
}

LocalKet parse_local_ket(std::string_view text) {
    for (auto k : {LocalKet::J, LocalKet::K, LocalKet::XPlus, LocalKet::XMinus, LocalKet::YPlus, LocalKet::YMinus}) {
        if (text == to_string(k)) return k;
    }
    throw ConfigError("unknown local ket label '" + std::string(text) + "'");
}

LocalBasis basis_of(LocalKet which) {
    switch (which) {
        case LocalKet::J:
        case LocalKet::K: return LocalBasis::Z;
        case LocalKet::XPlus:
        case LocalKet::XMinus: return LocalBasis::X;
        case LocalKet::YPlus:
        case LocalKet::YMinus: return LocalBasis::Y;
    }
    throw DomainError("unknown local ket");
}

std::string_view to_string(LocalBasis basis) {
    switch (basis) {
        case LocalBasis::Z: return "z";
        case LocalBasis::X: return "x";
        case LocalBasis::Y: return "y";
    }
    return "?";
}

Ket LocalProjector::ket() const { return kron(local_ket(a), local_ket(b)); }

Matrix LocalProjector::matrix() const { return Matrix::projector(ket()); }

std::string LocalProjector::label() const {
    return std::string(to_string(a)) + "," + std::string(to_string(b));
}

Matrix assemble(const Decomposition& terms) {
    Matrix sum(4);
    for (const auto& t : terms) sum += t.projector.matrix() * Complex(t.coefficient);
    return sum;
}

// ---------------------------------------------------------------------------
// Construction

LinearWitness witness_from_target(const Ket& target) {
    if (target.dim() != 4) throw DimensionError("witness_from_target: expected a two-qubit ket");
    if (!target.is_normalized()) throw DomainError("witness_from_target: target is not normalized");

    const Matrix pt = partial_transpose_b(Matrix::projector(target));
    const auto eig = eig_hermitian(pt);
    if (eig.values.front() >= -kPptMargin) {
        throw ConstructionError("witness_from_target: target has a positive partial transpose");
    }
    auto [value, eta] = min_eigenpair(pt);
    return {partial_transpose_b(Matrix::projector(eta)), std::move(eta)};
}

Decomposition canonical_decomposition(BellLabel label) {
    using K = LocalKet;
    const double h = 0.5;
    switch (label) {
        case BellLabel::PhiPlus:
        case BellLabel::PhiMinus: {
            const double s = label == BellLabel::PhiPlus ? 1.0 : -1.0;
            return {
                {h, {K::J, K::K}},
                {h, {K::K, K::J}},
                {s * h, {K::XPlus, K::XMinus}},
                {s * h, {K::XMinus, K::XPlus}},
                {-s * h, {K::YPlus, K::YMinus}},
                {-s * h, {K::YMinus, K::YPlus}},
            };
        }
        case BellLabel::PsiPlus:
        case BellLabel::PsiMinus: {
            const double s = label == BellLabel::PsiPlus ? 1.0 : -1.0;
            return {
                {h, {K::J, K::J}},
                {h, {K::K, K::K}},
                {-s * h, {K::XPlus, K::XPlus}},
                {-s * h, {K::XMinus, K::XMinus}},
                {s * h, {K::YPlus, K::YMinus}},
                {s * h, {K::YMinus, K::YPlus}},
            };
        }
    }
    throw DomainError("unknown Bell label");
}

Matrix make_unitary(UnitaryKind kind) {
    Matrix u;
    switch (kind) {
        case UnitaryKind::SigmaZZNeg: u = Matrix::diagonal({-1.0, 1.0, 1.0, -1.0}); break;
        case UnitaryKind::SigmaZZPos: u = Matrix::diagonal({1.0, -1.0, -1.0, 1.0}); break;
        case UnitaryKind::TwicePsiPlusWitness: {
            using namespace pauli;
            u = (Matrix::identity(4) - kron(x(), x()) - kron(y(), y()) + kron(z(), z())) * Complex(0.5);
            break;
        }
    }
    if (!u.is_unitary()) throw NumericalError("make_unitary: result is not unitary");
    return u;
}

WitnessSpec::WitnessSpec(Matrix w_l, Ket eta, Matrix unitary, Decomposition decomposition, std::string label)
    : w_l_(std::move(w_l)),
      eta_(std::move(eta)),
      u_(std::move(unitary)),
      decomposition_(std::move(decomposition)),
      label_(std::move(label)) {
    if (w_l_.dim() != 4 || eta_.dim() != 4 || u_.dim() != 4) {
        throw DimensionError("WitnessSpec: all operators must be 4x4");
    }
    if (!w_l_.is_hermitian()) throw ContractError("WitnessSpec: W_L is not Hermitian");
    if (!eta_.is_normalized()) throw ContractError("WitnessSpec: eta is not normalized");
    const Matrix rho_eta = Matrix::projector(eta_);
    if (max_abs_diff(w_l_, partial_transpose_b(rho_eta)) > kFaithfulness) {
        throw ContractError("WitnessSpec: W_L != (|eta><eta|)^T_B");
    }
    if (!u_.is_unitary(kFaithfulness)) throw ContractError("WitnessSpec: U is not unitary");
    if (!decomposition_.empty() && max_abs_diff(assemble(decomposition_), w_l_) > kFaithfulness) {
        throw ContractError("WitnessSpec: decomposition does not reassemble W_L");
    }
    eta_u_pt_ = partial_transpose_b(rho_eta * u_);
    u_pt_ = partial_transpose_b(u_);
}

WitnessSpec make_spec(BellLabel label, std::optional<UnitaryKind> unitary) {
    auto [w_l, eta] = witness_from_target(bell_state(label));
    const UnitaryKind kind = unitary.value_or(default_unitary(label));
    std::string name = "W^" + std::string(to_string(label)) + "[U=" + std::string(to_string(kind)) + "]";
    return WitnessSpec(std::move(w_l), std::move(eta), make_unitary(kind), canonical_decomposition(label),
                       std::move(name));
}

// ---------------------------------------------------------------------------
// Evaluation

bool detects(const WInfinity& w, double threshold) {
    if (const auto* v = std::get_if<double>(&w)) return *v < -threshold;
    return std::get<SingularVerdict>(w).entangled();
}

double nonlinear_second(double t, Complex a) { return t - std::norm(a); }

WInfinity nonlinear_infinity(double t, Complex a, Complex u) {
    const double denom = 1.0 - std::norm(u);
    if (denom < kSingularThreshold) return SingularVerdict{t};
    return t - std::norm(a) - std::norm(Complex(t) - a * u) / denom;
}

double w1(const DensityMatrix& rho, const WitnessSpec& spec) { return expect(rho, spec.w_l()); }

double w2(const DensityMatrix& rho, const WitnessSpec& spec) {
    return nonlinear_second(w1(rho, spec), trace_product(rho.matrix(), spec.eta_u_pt()));
}

WInfinity w_infinity(const DensityMatrix& rho, const WitnessSpec& spec) {
    return nonlinear_infinity(w1(rho, spec), trace_product(rho.matrix(), spec.eta_u_pt()), contrast(rho, spec));
}

Complex contrast(const DensityMatrix& rho, const WitnessSpec& spec) {
    return trace_product(rho.matrix(), spec.u_pt());
}

std::vector<LocalProjector> measurement_union(const WitnessSpec& spec) {
    std::vector<LocalProjector> out;
    if (spec.diagonal_unitary()) push_group(out, LocalBasis::Z, LocalBasis::Z);
    if (spec.decomposition().empty()) {
        for (auto [a, b] : groups_for(spec.w_l())) push_group(out, a, b);
    } else {
        for (const auto& t : spec.decomposition()) push_unique(out, t.projector);
    }
    if (!spec.diagonal_unitary()) {
        for (auto [a, b] : groups_for(spec.u_pt())) push_group(out, a, b);
        for (auto [a, b] : groups_for(spec.eta_u_pt())) push_group(out, a, b);
    }
    return out;
}

std::vector<LocalProjector> required_measurements(const WitnessSpec& spec) {
    if (!spec.diagonal_unitary()) {
        throw UnsupportedError("required_measurements: U is not diagonal; the measurement union has " +
                               std::to_string(measurement_union(spec).size()) + " projectors, not 8");
    }
    return measurement_union(spec);
}

nlohmann::json to_json(const WitnessSpec& spec) {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& t : spec.decomposition()) {
        terms.push_back({{"coefficient", t.coefficient},
                         {"a", std::string(to_string(t.projector.a))},
                         {"b", std::string(to_string(t.projector.b))}});
    }
    return {{"label", spec.label()},
            {"W_L", to_json(spec.w_l())},
            {"eta", to_json(spec.eta())},
            {"U", to_json(spec.unitary())},
            {"decomposition", std::move(terms)}};
}

}  // namespace nlw
