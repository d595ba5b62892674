// nlw: command-line front end for the witness simulation library.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>
#include <json.hpp>

#include "nlw/errors.hpp"
#include "nlw/oracle.hpp"
#include "nlw/states.hpp"
#include "nlw/sweep.hpp"
#include "nlw/witness.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitIo = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct SweepOverrides {
    std::string config_path;
    std::optional<std::string> mode;
    std::optional<int> ell;
    std::optional<double> epsilon;
    std::optional<double> purity_p;
    std::optional<double> dephasing_gamma;
    std::optional<int> phase_points;
    std::optional<double> flux;
    std::optional<int> n_mc;
    std::optional<std::uint64_t> seed;
    std::vector<std::string> witnesses;
    std::optional<std::string> unitary;
    bool no_tomography = false;
    std::optional<int> threads;
    std::string csv;
    std::string json;
    std::string svg;
};

nlohmann::json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw nlw::ConfigError("cannot read '" + path + "'");
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw nlw::ConfigError("'" + path + "' is not valid JSON: " + e.what());
    }
}

nlw::DensityMatrix read_state(const std::string& path) {
    try {
        return nlw::DensityMatrix(nlw::matrix_from_json(read_json_file(path)));
    } catch (const nlw::DomainError& e) {
        throw nlw::ConfigError(std::string("state file: ") + e.what());
    }
}

nlw::SweepConfig build_config(const SweepOverrides& o) {
    nlohmann::json j = o.config_path.empty() ? nlohmann::json::object() : read_json_file(o.config_path);
    if (!j.is_object()) throw nlw::ConfigError("config must be a JSON object");
    if (o.mode) j["mode"] = *o.mode;
    nlw::SweepConfig c = nlw::config_from_json(j);
    if (o.ell) c.ell = *o.ell;
    if (o.epsilon) c.epsilon = *o.epsilon;
    if (o.purity_p) c.purity_p = *o.purity_p;
    if (o.dephasing_gamma) c.dephasing_gamma = *o.dephasing_gamma;
    if (o.phase_points) c.phase_grid = nlw::midpoint_phase_grid(*o.phase_points);
    if (o.flux) c.flux = *o.flux;
    if (o.n_mc) c.n_mc = *o.n_mc;
    if (o.seed) c.seed = *o.seed;
    if (!o.witnesses.empty()) c.witnesses = o.witnesses;
    if (o.unitary) c.unitary = nlw::parse_unitary_kind(*o.unitary);
    if (o.no_tomography) c.tomography = false;
    if (o.threads) c.threads = *o.threads;
    nlw::validate(c);
    return c;
}

void print_summary(const nlw::SweepResult& r) {
    int winf_negative = 0;
    int plus_inconclusive = 0;
    int minus_inconclusive = 0;
    int singular = 0;
    for (const auto& p : r.points) {
        if (p.w_inf && p.w_inf->value < 0.0) ++winf_negative;
        if (p.singular) ++singular;
        if (p.w_l_plus.value >= 0.0) ++plus_inconclusive;
        if (p.w_l_minus.value >= 0.0) ++minus_inconclusive;
    }
    fmt::print(std::cerr, "{}: {} points, w_inf < 0 at {}, singular {}, linear inconclusive {} / {}, consistent {}\n",
               nlw::to_string(r.config.mode), r.points.size(), winf_negative, singular, plus_inconclusive,
               minus_inconclusive, r.consistent() ? "yes" : "no");
}

int run_sweep_command(const SweepOverrides& o) {
    const auto config = build_config(o);
    const auto result = nlw::run_sweep(config);
    if (!o.csv.empty()) nlw::emit(result, nlw::OutputFormat::Csv, o.csv);
    if (!o.json.empty()) nlw::emit(result, nlw::OutputFormat::Json, o.json);
    if (!o.svg.empty()) nlw::emit(result, nlw::OutputFormat::Svg, o.svg);
    if (o.csv.empty() && o.json.empty() && o.svg.empty()) nlw::write_csv(std::cout, result);
    print_summary(result);
    return result.consistent() ? kExitOk : kExitNumerical;
}

int run_demo(const std::string& out_dir, std::optional<int> n_mc, std::optional<double> flux) {
    std::filesystem::create_directories(out_dir);
    bool consistent = true;
    for (auto mode : {nlw::SweepMode::Correlated, nlw::SweepMode::Anticorrelated}) {
        auto config = nlw::default_config(mode);
        if (n_mc) config.n_mc = *n_mc;
        if (flux) config.flux = *flux;
        const auto result = nlw::run_sweep(config);
        const auto stem = std::filesystem::path(out_dir) / std::string(nlw::to_string(mode));
        nlw::emit(result, nlw::OutputFormat::Csv, stem.string() + ".csv");
        nlw::emit(result, nlw::OutputFormat::Json, stem.string() + ".json");
        nlw::emit(result, nlw::OutputFormat::Svg, stem.string() + ".svg");
        print_summary(result);
        consistent = consistent && result.consistent();
    }
    return consistent ? kExitOk : kExitNumerical;
}

nlohmann::json witness_report(const nlw::DensityMatrix& rho, const nlw::WitnessSpec& spec) {
    const auto winf = nlw::w_infinity(rho, spec);
    nlohmann::json j = {{"label", spec.label()},
                        {"w1", nlw::w1(rho, spec)},
                        {"w2", nlw::w2(rho, spec)},
                        {"u", nlw::contrast(rho, spec).real()},
                        {"singular", nlw::is_singular(winf)},
                        {"detects", nlw::detects(winf)}};
    if (const auto* v = std::get_if<double>(&winf)) {
        j["w_inf"] = *v;
    } else {
        j["w_inf"] = nullptr;
    }
    return j;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Linear and nonlinear entanglement witnesses on simulated OAM photon pairs"};
    app.require_subcommand(1);

    SweepOverrides sweep;
    auto* sweep_cmd = app.add_subcommand("sweep", "Run a phase sweep");
    sweep_cmd->add_option("--config", sweep.config_path, "Flat JSON config file");
    sweep_cmd->add_option("--mode", sweep.mode, "correlated or anticorrelated");
    sweep_cmd->add_option("--ell", sweep.ell);
    sweep_cmd->add_option("--epsilon", sweep.epsilon);
    sweep_cmd->add_option("--purity-p", sweep.purity_p);
    sweep_cmd->add_option("--dephasing-gamma", sweep.dephasing_gamma);
    sweep_cmd->add_option("--phase-points", sweep.phase_points, "Midpoint grid size");
    sweep_cmd->add_option("--flux", sweep.flux);
    sweep_cmd->add_option("--n-mc", sweep.n_mc);
    sweep_cmd->add_option("--seed", sweep.seed);
    sweep_cmd->add_option("--witnesses", sweep.witnesses, "e.g. W_inf^Phi+ W_L^Phi+ W_L^Phi-");
    sweep_cmd->add_option("--unitary", sweep.unitary, "sigma_zz_neg, sigma_zz_pos or twice_WPsiPlus");
    sweep_cmd->add_flag("--no-tomography", sweep.no_tomography);
    sweep_cmd->add_option("--threads", sweep.threads);
    sweep_cmd->add_option("--csv", sweep.csv);
    sweep_cmd->add_option("--json", sweep.json);
    sweep_cmd->add_option("--svg", sweep.svg);

    std::string state_path;
    std::string label = "Phi+";
    std::optional<std::string> unitary;
    auto* witness_cmd = app.add_subcommand("witness", "Evaluate w1, w2, w_inf on a state file");
    witness_cmd->add_option("--state", state_path, "JSON matrix {dim, re, im}")->required();
    witness_cmd->add_option("--label", label, "Phi+, Phi-, Psi+ or Psi-");
    witness_cmd->add_option("--unitary", unitary);

    bool tomography = false;
    double flux = 1e5;
    std::uint64_t seed = nlw::kDefaultSeed;
    auto* oracle_cmd = app.add_subcommand("oracle", "PPT verdict for a state file");
    oracle_cmd->add_option("--state", state_path, "JSON matrix {dim, re, im}")->required();
    oracle_cmd->add_flag("--tomography", tomography, "Also reconstruct from simulated counts");
    oracle_cmd->add_option("--flux", flux);
    oracle_cmd->add_option("--seed", seed);

    std::string prep_mode = "correlated";
    int prep_ell = 2;
    double prep_eps = 1.0;
    double prep_phase = 0.0;
    double prep_p = 1.0;
    double prep_gamma = 1.0;
    auto* prepare_cmd = app.add_subcommand("prepare", "Print a prism-prepared state as JSON");
    prepare_cmd->add_option("--mode", prep_mode);
    prepare_cmd->add_option("--ell", prep_ell);
    prepare_cmd->add_option("--epsilon", prep_eps);
    prepare_cmd->add_option("--phase", prep_phase);
    prepare_cmd->add_option("--purity-p", prep_p);
    prepare_cmd->add_option("--dephasing-gamma", prep_gamma);

    std::string out_dir = "nlw_demo";
    std::optional<int> demo_n_mc;
    std::optional<double> demo_flux;
    auto* demo_cmd = app.add_subcommand("demo", "Both default sweeps, written as csv/json/svg");
    demo_cmd->add_option("--out-dir", out_dir);
    demo_cmd->add_option("--n-mc", demo_n_mc);
    demo_cmd->add_option("--flux", demo_flux);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (sweep_cmd->parsed()) return run_sweep_command(sweep);
        if (demo_cmd->parsed()) return run_demo(out_dir, demo_n_mc, demo_flux);
        if (witness_cmd->parsed()) {
            const auto rho = read_state(state_path);
            const auto spec = nlw::make_spec(nlw::parse_bell_label(label),
                                             unitary ? std::optional(nlw::parse_unitary_kind(*unitary)) : std::nullopt);
            std::cout << witness_report(rho, spec).dump(2) << '\n';
            return kExitOk;
        }
        if (oracle_cmd->parsed()) {
            const auto rho = read_state(state_path);
            nlohmann::json j = {{"verdict", nlw::to_json(nlw::negativity(rho))}};
            if (tomography) {
                const auto groups = nlw::tomography_groups();
                const auto records = nlw::simulate_groups(rho, groups, flux, seed);
                const auto tomo = nlw::tomography_linear(records);
                j["tomography"] = nlw::to_json(tomo.rho.matrix());
                j["tomography"]["verdict"] = nlw::to_json(nlw::negativity(tomo.rho));
                j["tomography"]["clipped_mass"] = tomo.clipped_mass;
            }
            std::cout << j.dump(2) << '\n';
            return kExitOk;
        }
        if (prepare_cmd->parsed()) {
            auto config = nlw::default_config(nlw::parse_sweep_mode(prep_mode));
            config.ell = prep_ell;
            config.epsilon = prep_eps;
            config.purity_p = prep_p;
            config.dephasing_gamma = prep_gamma;
            std::cout << nlw::to_json(nlw::prepare_point(config, prep_phase)).dump(2) << '\n';
            return kExitOk;
        }
    } catch (const nlw::ConfigError& e) {
        fmt::print(std::cerr, "config error: {}\n", e.what());
        return kExitConfig;
    } catch (const nlw::IoError& e) {
        fmt::print(std::cerr, "io error: {}\n", e.what());
        return kExitIo;
    } catch (const std::filesystem::filesystem_error& e) {
        fmt::print(std::cerr, "io error: {}\n", e.what());
        return kExitIo;
    } catch (const nlw::DomainError& e) {
        fmt::print(std::cerr, "config error: {}\n", e.what());
        return kExitConfig;
    } catch (const nlw::Error& e) {
        fmt::print(std::cerr, "numerical error: {}\n", e.what());
        return kExitNumerical;
    }
    return kExitOk;
}
