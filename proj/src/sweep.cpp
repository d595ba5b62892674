#include "nlw/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>
#include <numbers>
#include <ostream>
#include <thread>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "nlw/errors.hpp"

namespace nlw {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kGateSigmas = 5.0;

struct SpecSet {
    WitnessSpec nonlinear;
    WitnessSpec plus;
    WitnessSpec minus;
};

SpecSet build_specs(const SweepConfig& config) {
    std::vector<WitnessSelector> linear;
    std::optional<WitnessSelector> nonlinear;
    for (const auto& text : config.witnesses) {
        const auto sel = WitnessSelector::parse(text);
        if (sel.nonlinear) {
            nonlinear = sel;
        } else {
            linear.push_back(sel);
        }
    }
    return {make_spec(nonlinear->label, config.unitary), make_spec(linear[0].label), make_spec(linear[1].label)};
}

bool within(double estimate, double sigma, double truth) {
    const double diff = std::abs(estimate - truth);
    if (sigma > 0.0) return diff <= kGateSigmas * sigma;
    return diff <= tol::kAlgebraic;
}

std::string number(double x) { return fmt::format("{:.17g}", x); }

nlohmann::json estimated_json(const EstimatedValue& v) {
    return {{"value", v.value}, {"sigma", v.sigma}, {"n_mc", v.n_mc}};
}

nlohmann::json winf_json(const WInfinity& w) {
    if (const auto* v = std::get_if<double>(&w)) return *v;
    return nullptr;
}

PointResult run_point(const SweepConfig& config, const SpecSet& specs, std::size_t index) {
    const double phase = config.phase_grid[index];
    const std::uint64_t point_seed = derive_seed(config.seed, index);
    const PreparedState state = prepare_point(config, phase);

    PointResult pt;
    pt.phase = phase;
    pt.theta_b = state.meta.theta_b;
    pt.theta_a = state.meta.theta_a;
    pt.prepared_phase = state.meta.phase;
    pt.oracle = negativity(state.rho);

    if (config.tomography) {
        const auto groups = tomography_groups();
        const auto records = simulate_groups(state.rho, groups, config.flux, derive_seed(point_seed, 1));
        const auto tomo = tomography_linear(records);
        const auto verdict = negativity(tomo.rho);
        pt.tomography = TomographyCheck{fidelity(tomo.rho, ideal_ket(state.meta)), verdict.negativity,
                                        extract_phase(tomo.rho, state.meta.correlated), verdict.entangled};
    }

    const auto groups = witness_groups();
    const auto records = simulate_groups(state.rho, groups, config.flux, derive_seed(point_seed, 2));
    const auto mc_seed = derive_seed(point_seed, 3);
    const auto nonlinear = mc_error_bars(records, specs.nonlinear, config.n_mc, mc_seed);
    const auto plus = mc_error_bars(records, specs.plus, config.n_mc, mc_seed);
    const auto minus = mc_error_bars(records, specs.minus, config.n_mc, mc_seed);

    pt.w_l_plus = plus.w_l;
    pt.w_l_minus = minus.w_l;
    pt.w_inf = nonlinear.w_inf;
    pt.singular = nonlinear.singular;
    pt.u = nonlinear.u;

    const auto& rho = state.rho;
    pt.analytic.w_l_plus = w1(rho, specs.plus);
    pt.analytic.w_l_minus = w1(rho, specs.minus);
    pt.analytic.w_inf = w_infinity(rho, specs.nonlinear);
    pt.analytic.u = contrast(rho, specs.nonlinear).real();

    pt.consistent = within(pt.w_l_plus.value, pt.w_l_plus.sigma, pt.analytic.w_l_plus) &&
                    within(pt.w_l_minus.value, pt.w_l_minus.sigma, pt.analytic.w_l_minus) &&
                    within(pt.u.value, pt.u.sigma, pt.analytic.u);
    if (pt.w_inf) {
        if (const auto* exact = std::get_if<double>(&pt.analytic.w_inf)) {
            pt.consistent = pt.consistent && within(pt.w_inf->value, pt.w_inf->sigma, *exact);
        }
    }
    return pt;
}

// SVG layout
constexpr double kWidth = 800.0;
constexpr double kHeight = 500.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 20.0;
constexpr double kTop = 30.0;
constexpr double kBottom = 50.0;
constexpr int kCurveSamples = 181;

}  // namespace

std::string_view to_string(SweepMode mode) {
    return mode == SweepMode::Correlated ? "correlated" : "anticorrelated";
}

SweepMode parse_sweep_mode(std::string_view text) {
    if (text == "correlated") return SweepMode::Correlated;
    if (text == "anticorrelated") return SweepMode::Anticorrelated;
    throw ConfigError("mode must be 'correlated' or 'anticorrelated', got '" + std::string(text) + "'");
}

std::vector<double> midpoint_phase_grid(int count) {
    std::vector<double> grid;
    if (count <= 0) return grid;
    grid.reserve(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) grid.push_back((static_cast<double>(k) + 0.5) * kTwoPi / count);
    return grid;
}

std::string WitnessSelector::name() const {
    return std::string(nonlinear ? "W_inf^" : "W_L^") + std::string(to_string(label));
}

WitnessSelector WitnessSelector::parse(std::string_view text) {
    constexpr std::string_view kInf = "W_inf^";
    constexpr std::string_view kLin = "W_L^";
    if (text.starts_with(kInf)) return {true, parse_bell_label(text.substr(kInf.size()))};
    if (text.starts_with(kLin)) return {false, parse_bell_label(text.substr(kLin.size()))};
    throw ConfigError("witness selector must look like W_inf^Phi+ or W_L^Psi-, got '" + std::string(text) + "'");
}

SweepConfig default_config(SweepMode mode) {
    SweepConfig c;
    c.mode = mode;
    if (mode == SweepMode::Correlated) {
        c.purity_p = kCorrelatedPurity;
        c.witnesses = {"W_inf^Phi+", "W_L^Phi+", "W_L^Phi-"};
    } else {
        c.purity_p = kAnticorrelatedPurity;
        c.witnesses = {"W_inf^Psi+", "W_L^Psi+", "W_L^Psi-"};
    }
    return c;
}

void validate(const SweepConfig& c) {
    if (c.ell < 1 || c.ell > kDefaultMaxOam) throw ConfigError("ell must lie in [1, 10]");
    if (!(c.epsilon >= 0.0) || !std::isfinite(c.epsilon)) throw ConfigError("epsilon must be finite and >= 0");
    if (!(c.purity_p >= 0.0 && c.purity_p <= 1.0)) throw ConfigError("purity_p must lie in [0, 1]");
    if (!(c.dephasing_gamma >= 0.0 && c.dephasing_gamma <= 1.0)) {
        throw ConfigError("dephasing_gamma must lie in [0, 1]");
    }
    if (c.phase_grid.empty()) throw ConfigError("phase_grid must not be empty");
    if (!std::all_of(c.phase_grid.begin(), c.phase_grid.end(), [](double x) { return std::isfinite(x); })) {
        throw ConfigError("phase_grid entries must be finite");
    }
    if (!(c.flux > 0.0) || !std::isfinite(c.flux)) throw ConfigError("flux must be finite and > 0");
    if (c.n_mc < 2) throw ConfigError("n_mc must be >= 2");
    if (c.threads < 1) throw ConfigError("threads must be >= 1");

    int nonlinear = 0;
    int linear = 0;
    for (const auto& w : c.witnesses) {
        (WitnessSelector::parse(w).nonlinear ? nonlinear : linear)++;
    }
    if (nonlinear != 1 || linear != 2) {
        throw ConfigError("witnesses must name exactly one W_inf^ and two W_L^ selectors");
    }
}

SweepConfig config_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    SweepConfig c = default_config(j.contains("mode") && j["mode"].is_string()
                                       ? parse_sweep_mode(j["mode"].get<std::string>())
                                       : SweepMode::Correlated);
    try {
        for (const auto& [key, value] : j.items()) {
            if (key == "mode") {
                continue;
            } else if (key == "ell") {
                c.ell = value.get<int>();
            } else if (key == "epsilon") {
                c.epsilon = value.get<double>();
            } else if (key == "purity_p") {
                c.purity_p = value.get<double>();
            } else if (key == "dephasing_gamma") {
                c.dephasing_gamma = value.get<double>();
            } else if (key == "phase_grid") {
                c.phase_grid = value.get<std::vector<double>>();
            } else if (key == "phase_points") {
                c.phase_grid = midpoint_phase_grid(value.get<int>());
            } else if (key == "flux") {
                c.flux = value.get<double>();
            } else if (key == "n_mc") {
                c.n_mc = value.get<int>();
            } else if (key == "seed") {
                c.seed = value.get<std::uint64_t>();
            } else if (key == "witnesses") {
                c.witnesses = value.get<std::vector<std::string>>();
            } else if (key == "unitary") {
                c.unitary = value.is_null() ? std::nullopt
                                            : std::optional(parse_unitary_kind(value.get<std::string>()));
            } else if (key == "tomography") {
                c.tomography = value.get<bool>();
            } else if (key == "threads") {
                c.threads = value.get<int>();
            } else {
                throw ConfigError("unknown config key '" + key + "'");
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return c;
}

nlohmann::json to_json(const SweepConfig& c) {
    return {{"mode", std::string(to_string(c.mode))},
            {"ell", c.ell},
            {"epsilon", c.epsilon},
            {"purity_p", c.purity_p},
            {"dephasing_gamma", c.dephasing_gamma},
            {"phase_grid", c.phase_grid},
            {"flux", c.flux},
            {"n_mc", c.n_mc},
            {"seed", c.seed},
            {"witnesses", c.witnesses},
            {"unitary", c.unitary ? nlohmann::json(std::string(to_string(*c.unitary))) : nlohmann::json(nullptr)},
            {"tomography", c.tomography},
            {"threads", c.threads}};
}

bool SweepResult::consistent() const {
    return std::all_of(points.begin(), points.end(), [](const PointResult& p) { return p.consistent; });
}

PreparedState prepare_point(const SweepConfig& config, double phase) {
    const double theta_b = phase / config.ell;
    const auto theta_a = config.mode == SweepMode::Correlated ? std::nullopt : std::optional(0.0);
    return with_noise(prepare_via_prisms(config.ell, config.epsilon, theta_b, theta_a), config.purity_p,
                      config.dephasing_gamma);
}

AnalyticPoint analytic_point(const SweepConfig& config, double phase) {
    const SpecSet specs = build_specs(config);
    const auto state = prepare_point(config, phase);
    return {w1(state.rho, specs.plus), w1(state.rho, specs.minus), w_infinity(state.rho, specs.nonlinear),
            contrast(state.rho, specs.nonlinear).real()};
}

SweepResult run_sweep(const SweepConfig& config) {
    validate(config);
    const SpecSet specs = build_specs(config);

    SweepResult result{config, std::vector<PointResult>(config.phase_grid.size())};
    const std::size_t n = config.phase_grid.size();
    const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(config.threads), n);

    std::vector<std::exception_ptr> errors(workers);
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (std::size_t i = w; i < n; i += workers) result.points[i] = run_point(config, specs, i);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return result;
}

// ---------------------------------------------------------------------------
// Output

OutputFormat parse_output_format(std::string_view text) {
    if (text == "csv") return OutputFormat::Csv;
    if (text == "json") return OutputFormat::Json;
    if (text == "svg") return OutputFormat::Svg;
    throw ConfigError("output format must be csv, json or svg");
}

void write_csv(std::ostream& out, const SweepResult& result) {
    out << "phase,w_L_plus,w_L_plus_sigma,w_L_minus,w_L_minus_sigma,w_inf,w_inf_sigma,u,negativity,singular\n";
    for (const auto& p : result.points) {
        const std::string w_inf = p.w_inf ? number(p.w_inf->value) : "";
        const std::string w_inf_sigma = p.w_inf ? number(p.w_inf->sigma) : "";
        out << number(p.phase) << ',' << number(p.w_l_plus.value) << ',' << number(p.w_l_plus.sigma) << ','
            << number(p.w_l_minus.value) << ',' << number(p.w_l_minus.sigma) << ',' << w_inf << ','
            << w_inf_sigma << ',' << number(p.u.value) << ',' << number(p.oracle.negativity) << ','
            << (p.singular ? 1 : 0) << '\n';
    }
}

void write_json(std::ostream& out, const SweepResult& result) {
    std::vector<std::string> linear;
    std::string nonlinear;
    for (const auto& w : result.config.witnesses) {
        const auto sel = WitnessSelector::parse(w);
        if (sel.nonlinear) {
            nonlinear = sel.name();
        } else {
            linear.push_back(sel.name());
        }
    }

    nlohmann::json points = nlohmann::json::array();
    for (const auto& p : result.points) {
        nlohmann::json jp = {
            {"phase", p.phase},
            {"theta_b", p.theta_b},
            {"theta_a", p.theta_a ? nlohmann::json(*p.theta_a) : nlohmann::json(nullptr)},
            {"prepared_phase", p.prepared_phase},
            {"analytic",
             {{"w_L_plus", p.analytic.w_l_plus},
              {"w_L_minus", p.analytic.w_l_minus},
              {"w_inf", winf_json(p.analytic.w_inf)},
              {"u", p.analytic.u}}},
            {"w_L_plus", estimated_json(p.w_l_plus)},
            {"w_L_minus", estimated_json(p.w_l_minus)},
            {"w_inf", p.w_inf ? estimated_json(*p.w_inf) : nlohmann::json(nullptr)},
            {"singular", p.singular.has_value()},
            {"u", estimated_json(p.u)},
            {"oracle", to_json(p.oracle)},
            {"consistent", p.consistent},
        };
        if (p.singular) jp["singular_linear_value"] = p.singular->linear_value;
        if (p.tomography) {
            jp["tomography"] = {{"fidelity", p.tomography->fidelity},
                                {"negativity", p.tomography->negativity},
                                {"phase", p.tomography->phase},
                                {"entangled", p.tomography->entangled}};
        }
        points.push_back(std::move(jp));
    }

    const nlohmann::json doc = {
        {"config", to_json(result.config)},
        {"metadata",
         {{"witness_columns", {{"w_inf", nonlinear}, {"w_L_plus", linear.at(0)}, {"w_L_minus", linear.at(1)}}},
          {"horizontal_uncertainty", std::numbers::pi / 24.0},
          {"parameter_note",
           "purity_p and dephasing_gamma are chosen to reproduce contrast magnitudes 0.69 (correlated) and "
           "0.92 (anti-correlated); they are not fitted to measured data"},
          {"consistent", result.consistent()}}},
        {"points", std::move(points)},
    };
    out << doc.dump(2) << '\n';
}

void write_svg(std::ostream& out, const SweepResult& result) {
    const auto& config = result.config;
    std::vector<WitnessSelector> sels;
    for (const auto& w : config.witnesses) sels.push_back(WitnessSelector::parse(w));
    const auto nonlinear_sel = *std::find_if(sels.begin(), sels.end(), [](auto& s) { return s.nonlinear; });
    std::vector<WitnessSelector> linear_sels;
    std::copy_if(sels.begin(), sels.end(), std::back_inserter(linear_sels), [](auto& s) { return !s.nonlinear; });

    struct Curve {
        std::vector<std::pair<double, double>> xy;
    };
    std::array<Curve, 3> curves;  // w_inf, w_L_plus, w_L_minus
    for (int s = 0; s < kCurveSamples; ++s) {
        const double phase = kTwoPi * s / (kCurveSamples - 1);
        const auto a = analytic_point(config, phase);
        if (const auto* v = std::get_if<double>(&a.w_inf)) curves[0].xy.emplace_back(phase, *v);
        curves[1].xy.emplace_back(phase, a.w_l_plus);
        curves[2].xy.emplace_back(phase, a.w_l_minus);
    }

    struct Point {
        double x, y, sigma;
    };
    std::array<std::vector<Point>, 3> series;
    for (const auto& p : result.points) {
        if (p.w_inf) series[0].push_back({wrap_phase(p.phase), p.w_inf->value, p.w_inf->sigma});
        series[1].push_back({wrap_phase(p.phase), p.w_l_plus.value, p.w_l_plus.sigma});
        series[2].push_back({wrap_phase(p.phase), p.w_l_minus.value, p.w_l_minus.sigma});
    }

    double lo = 0.0;
    double hi = 0.0;
    for (const auto& c : curves) {
        for (auto [x, y] : c.xy) {
            lo = std::min(lo, y);
            hi = std::max(hi, y);
        }
    }
    for (const auto& s : series) {
        for (const auto& p : s) {
            lo = std::min(lo, p.y - p.sigma);
            hi = std::max(hi, p.y + p.sigma);
        }
    }
    const double pad = 0.05 * std::max(hi - lo, 1e-3);
    lo -= pad;
    hi += pad;

    const double plot_w = kWidth - kLeft - kRight;
    const double plot_h = kHeight - kTop - kBottom;
    auto sx = [&](double x) { return kLeft + plot_w * x / kTwoPi; };
    auto sy = [&](double y) { return kTop + plot_h * (hi - y) / (hi - lo); };

    const std::array<const char*, 3> colors = {"#1b6ca8", "#c0392b", "#27ae60"};
    const std::array<std::string, 3> names = {nonlinear_sel.name(), linear_sels[0].name(), linear_sels[1].name()};

    fmt::print(out, R"(<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {} {}">)" "\n",
               kWidth, kHeight, kWidth, kHeight);
    fmt::print(out, R"(<rect x="0" y="0" width="{}" height="{}" fill="white"/>)" "\n", kWidth, kHeight);
    fmt::print(out, R"(<line class="axis" x1="{:.2f}" y1="{:.2f}" x2="{:.2f}" y2="{:.2f}" stroke="black"/>)" "\n",
               kLeft, kTop + plot_h, kLeft + plot_w, kTop + plot_h);
    fmt::print(out, R"(<line class="axis" x1="{:.2f}" y1="{:.2f}" x2="{:.2f}" y2="{:.2f}" stroke="black"/>)" "\n",
               kLeft, kTop, kLeft, kTop + plot_h);
    const std::array<const char*, 5> tick_labels = {"0", "&#960;/2", "&#960;", "3&#960;/2", "2&#960;"};
    for (int t = 0; t < 5; ++t) {
        const double x = sx(t * std::numbers::pi / 2.0);
        fmt::print(out, R"(<text x="{:.2f}" y="{:.2f}" font-size="12" text-anchor="middle">{}</text>)" "\n", x,
                   kTop + plot_h + 18.0, tick_labels[static_cast<std::size_t>(t)]);
    }
    for (int t = 0; t <= 4; ++t) {
        const double y = lo + (hi - lo) * t / 4.0;
        fmt::print(out, R"(<text x="{:.2f}" y="{:.2f}" font-size="12" text-anchor="end">{:.2f}</text>)" "\n",
                   kLeft - 6.0, sy(y) + 4.0, y);
    }
    fmt::print(out, R"(<text x="{:.2f}" y="{:.2f}" font-size="13" text-anchor="middle">phase (rad)</text>)" "\n",
               kLeft + plot_w / 2.0, kHeight - 8.0);
    fmt::print(out,
               R"svg(<text x="16" y="{:.2f}" font-size="13" text-anchor="middle" transform="rotate(-90 16 {:.2f})">expectation value</text>)svg"
               "\n",
               kTop + plot_h / 2.0, kTop + plot_h / 2.0);
    fmt::print(out,
               R"(<line class="zero-line" x1="{:.2f}" y1="{:.2f}" x2="{:.2f}" y2="{:.2f}" stroke="gray" stroke-dasharray="4 3"/>)"
               "\n",
               kLeft, sy(0.0), kLeft + plot_w, sy(0.0));

    for (std::size_t c = 0; c < 3; ++c) {
        std::string pts;
        for (auto [x, y] : curves[c].xy) pts += fmt::format("{:.2f},{:.2f} ", sx(x), sy(y));
        fmt::print(out, R"(<polyline class="analytic" data-name="{}" fill="none" stroke="{}" points="{}"/>)" "\n",
                   names[c], colors[c], pts);
    }
    for (std::size_t s = 0; s < 3; ++s) {
        fmt::print(out, R"(<g class="series" data-name="{}" stroke="{}" fill="{}">)" "\n", names[s], colors[s],
                   colors[s]);
        for (const auto& p : series[s]) {
            fmt::print(out, R"(  <line x1="{:.2f}" y1="{:.2f}" x2="{:.2f}" y2="{:.2f}"/>)" "\n", sx(p.x),
                       sy(p.y - p.sigma), sx(p.x), sy(p.y + p.sigma));
            fmt::print(out, R"(  <circle cx="{:.2f}" cy="{:.2f}" r="3.5"/>)" "\n", sx(p.x), sy(p.y));
        }
        fmt::print(out, "</g>\n");
    }
    for (std::size_t s = 0; s < 3; ++s) {
        fmt::print(out, R"(<text x="{:.2f}" y="{:.2f}" font-size="12" fill="{}">{}</text>)" "\n", kLeft + 10.0,
                   kTop + 14.0 + 15.0 * static_cast<double>(s), colors[s], names[s]);
    }
    out << "</svg>\n";
}

void emit(const SweepResult& result, OutputFormat format, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    switch (format) {
        case OutputFormat::Csv: write_csv(out, result); break;
        case OutputFormat::Json: write_json(out, result); break;
        case OutputFormat::Svg: write_svg(out, result); break;
    }
    out.flush();
    if (!out) throw IoError("failed while writing '" + path.string() + "'");
}

}  // namespace nlw
