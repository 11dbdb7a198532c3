// Command-line driver: amplitudes, pole maps, series convergence tables,
// mixing spectra, and the built-in verification suites.

#include <complex>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "wqed/closedform.hpp"
#include "wqed/config.hpp"
#include "wqed/crosscheck.hpp"
#include "wqed/dyson.hpp"
#include "wqed/poles.hpp"
#include "wqed/summation.hpp"

namespace {

using namespace wqed;

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitConfigError = 2;
constexpr int kExitOnPole = 3;

LinearForm var(Symbol s) { return LinearForm::variable(s); }

Amplitude build_canonical(const RunConfig& cfg) {
    const auto& in = cfg.photons.inputs;
    if (in.size() == 1) {
        return cfg.system.kind == EmitterKind::TLS
                   ? amp_single_tls(cfg.system, in[0])
                   : amp_single_lambda(cfg.system, cfg.initial_ground, in[0]);
    }
    return cfg.system.kind == EmitterKind::TLS
               ? amp_two_tls_fan(cfg.system, in[0], in[1])
               : canonicalize(amp_two_lambda(cfg.system, cfg.initial_ground, in[0], in[1]));
}

// structure-wise evaluation that completes the assignment from the deltas
// and reports nothing when the structure is incompatible with it
std::optional<complexd> try_eval_coefficient_quiet(const Amplitude& amp,
                                                   const StructureGroup& group,
                                                   const Assignment& outputs) {
    try {
        return try_eval_coefficient(amp, group.deltas, outputs, group.final_ground == 0
                                                                    ? std::optional<int>()
                                                                    : group.final_ground);
    } catch (const ConstraintViolated&) {
        return std::nullopt;
    }
}

int cmd_amp(const std::string& config_path, const std::vector<double>& outputs,
            const std::string& format) {
    const RunConfig cfg = load_config(config_path);
    const Amplitude amp = build_canonical(cfg);

    std::optional<Assignment> at;
    if (!outputs.empty()) {
        if (outputs.size() != cfg.photons.inputs.size())
            throw ConfigError("outputs must match the input photon count");
        Assignment a;
        if (outputs.size() == 1) {
            a.set(Symbol::F, outputs[0]);
        } else {
            a.set(Symbol::F0, outputs[0]);
            a.set(Symbol::F1, outputs[1]);
        }
        at = a;
    }

    if (format == "json") {
        nlohmann::json j = nlohmann::json::parse(amplitude_json(amp));
        if (at) {
            j["coefficients"] = nlohmann::json::array();
            for (const auto& group : structures(amp)) {
                const auto c = try_eval_coefficient_quiet(amp, group, *at);
                if (!c) continue;
                nlohmann::json jc;
                jc["deltas"] = structure_str(group.deltas);
                if (group.final_ground != 0) jc["final_ground"] = group.final_ground;
                jc["value"] = {c->real(), c->imag()};
                j["coefficients"].push_back(jc);
            }
        }
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << std::setprecision(17);
        for (const auto& group : structures(amp)) {
            std::cout << structure_str(group.deltas);
            if (group.final_ground != 0) std::cout << "  [final ground " << group.final_ground << "]";
            std::cout << "\n";
            for (std::size_t k : group.term_indices) {
                const Term& t = amp.terms[k];
                std::cout << "    (" << t.prefactor.real() << (t.prefactor.imag() < 0 ? "" : "+")
                          << t.prefactor.imag() << "i)";
                for (const auto& p : t.polefactors)
                    std::cout << " * (" << p.form.str() << ")^" << p.power;
                std::cout << "\n";
            }
            if (at) {
                const auto c = try_eval_coefficient_quiet(amp, group, *at);
                if (c)
                    std::cout << "    value at the requested outputs: " << c->real()
                              << (c->imag() < 0 ? "" : "+") << c->imag() << "i\n";
            }
        }
    }
    return kExitOk;
}

int cmd_poles(const std::string& config_path, const std::string& csv_path, bool json_out) {
    const RunConfig cfg = load_config(config_path);
    if (cfg.photons.inputs.size() != 2)
        throw ConfigError("pole maps need a two-photon drive (two entries in 'inputs')");
    const PoleMap map =
        pole_map(cfg.system, cfg.initial_ground, cfg.photons.inputs[0], cfg.photons.inputs[1]);
    if (!csv_path.empty()) {
        std::ofstream out(csv_path);
        if (!out) throw ConfigError("cannot open output file " + csv_path);
        write_pole_csv(out, map);
    }
    if (json_out) {
        std::cout << pole_map_json(map) << "\n";
        return kExitOk;
    }
    int preserving = 0, changing = 0, common = 0;
    for (const auto& p : map.poles) {
        if (p.cls == PoleClass::StatePreserving) ++preserving;
        else if (p.cls == PoleClass::StateChanging) ++changing;
        else ++common;
    }
    std::cout << "poles: " << map.poles.size() << " (state-preserving " << preserving
              << ", state-changing " << changing << ", common " << common << ")\n";
    std::cout << std::setprecision(17);
    for (const auto& p : map.poles)
        std::cout << "  " << p.location.real() << (p.location.imag() < 0 ? " - " : " + ")
                  << std::abs(p.location.imag()) << "i  " << pole_class_name(p.cls) << "\n";
    if (!csv_path.empty()) std::cout << "wrote " << csv_path << "\n";
    return kExitOk;
}

int cmd_series(const std::string& config_path, int n_max, double f0_opt, bool have_f0, int mu_opt) {
    const RunConfig cfg = load_config(config_path);
    const auto& in = cfg.photons.inputs;
    const int p = static_cast<int>(in.size());
    const int nu = cfg.initial_ground;
    const bool lam = cfg.system.kind == EmitterKind::Lambda;
    const int mu = lam ? mu_opt : 1;

    Assignment pt;
    std::vector<LinearForm> deltaset;
    if (p == 1) {
        pt.set(Symbol::I, in[0]);
        const double shift = lam ? cfg.system.dtilde(nu) - cfg.system.dtilde(mu) : 0.0;
        pt.set(Symbol::F, in[0] + shift);
        deltaset = {(var(Symbol::F) - var(Symbol::I)).plus_const(complexd{-shift, 0.0})};
    } else {
        if (!have_f0) throw ConfigError("two-photon series needs --f0 for the evaluation point");
        const double shift = lam ? cfg.system.dtilde(nu) - cfg.system.dtilde(mu) : 0.0;
        pt.set(Symbol::I0, in[0]);
        pt.set(Symbol::I1, in[1]);
        pt.set(Symbol::F0, f0_opt);
        pt.set(Symbol::F1, in[0] + in[1] + shift - f0_opt);
        deltaset = {(var(Symbol::F0) + var(Symbol::F1) - var(Symbol::I0) - var(Symbol::I1))
                        .plus_const(complexd{-shift, 0.0})};
    }

    const auto rep = partial_sum(n_max, p, cfg.system, pt, deltaset, nu,
                                 lam ? std::optional<int>(mu) : std::nullopt);
    std::cout << std::setprecision(12);
    std::cout << "# n  partial_re  partial_im\n";
    for (std::size_t k = 0; k < rep.orders.size(); ++k)
        std::cout << rep.orders[k] << "  " << rep.partials[k].real() << "  "
                  << rep.partials[k].imag() << "\n";
    std::cout << "ratio |pi gamma^2 g| = " << rep.ratio << "\n";
    if (rep.divergent) {
        std::cout << "series divergent; Borel summation:\n";
        if (p == 1) {
            const double D = detuning(cfg.system,
                                      lam ? std::optional<GroundLabel>(GroundLabel(nu)) : std::nullopt,
                                      in[0]);
            const auto b = borel_sum_geometric(cfg.system.gamma_scale() / D);
            const complexd t_rec = 2.0 * b.value - complexd{1.0, 0.0};
            std::cout << "  borel value " << b.value.real() << (b.value.imag() < 0 ? "" : "+")
                      << b.value.imag() << "i (error est. " << b.error_estimate << ", N "
                      << b.nodes_used << ")\n";
            std::cout << "  reconstructed kernel " << t_rec.real() << (t_rec.imag() < 0 ? "" : "+")
                      << t_rec.imag() << "i\n";
        } else {
            std::cout << "  (two-photon Borel reconstruction not defined; single-photon only)\n";
        }
    }
    // closed-form comparison
    const Amplitude closed = build_canonical(cfg);
    const auto cf = try_eval_coefficient(closed, deltaset, pt,
                                         lam ? std::optional<int>(mu) : std::nullopt);
    if (cf) {
        const double rel = std::abs(rep.value - *cf) / std::abs(*cf);
        std::cout << "closed form " << cf->real() << (cf->imag() < 0 ? "" : "+") << cf->imag()
                  << "i, |series - closed|/|closed| = " << rel << "\n";
        if (rep.converged)
            std::cout << "converged at order " << rep.converged_at << "\n";
        else if (!rep.divergent)
            std::cout << "not converged by order " << n_max << " (no convergence claim)\n";
    }
    return kExitOk;
}

int cmd_spectrum(const std::string& config_path, double fmin, double fmax, int points,
                 const std::string& csv_path, int mu_opt) {
    const RunConfig cfg = load_config(config_path);
    if (cfg.photons.inputs.size() != 2)
        throw ConfigError("spectra need a two-photon drive (two entries in 'inputs')");
    if (points < 2 || !(fmax > fmin)) throw ConfigError("empty or inverted frequency range");
    std::vector<double> grid;
    grid.reserve(points);
    for (int k = 0; k < points; ++k)
        grid.push_back(fmin + (fmax - fmin) * k / (points - 1));
    const auto spec = mixing_spectrum(cfg.system, cfg.initial_ground,
                                      cfg.system.kind == EmitterKind::TLS ? 1 : mu_opt,
                                      cfg.photons.inputs[0], cfg.photons.inputs[1], grid);
    std::ostream* os = &std::cout;
    std::ofstream file;
    if (!csv_path.empty()) {
        file.open(csv_path);
        if (!file) throw ConfigError("cannot open output file " + csv_path);
        os = &file;
    }
    *os << "f,abs2,flag\n" << std::setprecision(17);
    for (const auto& pt : spec) {
        if (pt.at_resonance)
            *os << pt.f << ",,at-resonance\n";
        else
            *os << pt.f << "," << pt.abs2 << ",\n";
    }
    return kExitOk;
}

int cmd_check(const std::string& which, std::uint64_t seed) {
    // reference systems for the built-in suites
    const auto tls = EmitterSystem::tls(2e15, 2e4);
    const auto lam = EmitterSystem::lambda(2e15, 2e4, 2e4 / std::sqrt(2.0), 0.0, 2e14);
    bool all_pass = true;
    std::vector<std::string> reports;
    const bool all = which == "all";

    if (all || which == "fan") {
        const auto rep = fan_equivalence(tls, 100, seed);
        all_pass = all_pass && rep.pass;
        reports.push_back(report_json(rep));
    }
    if (all || which == "pg") {
        const auto rep = pg_equivalence(lam, 100, seed);
        all_pass = all_pass && rep.pass;
        reports.push_back(report_json(rep));
    }
    if (all || which == "a8") {
        const auto rep = a8_fixture_check(seed);
        all_pass = all_pass && rep.pass;
        nlohmann::json j;
        j["check"] = "a8";
        j["raw_contractions"] = rep.raw_contractions;
        j["surviving_terms"] = rep.surviving_terms;
        j["species"] = rep.species_count;
        double worst = 0.0;
        for (const auto& s : rep.species) worst = std::max(worst, s.max_rel_dev);
        j["max_rel_dev"] = worst;
        j["pass"] = rep.pass;
        reports.push_back(j.dump(2));
    }
    if (all || which == "unitarity") {
        const auto r1 = unitarity_check(tls, 1000, seed);
        const auto r2 = unitarity_check(lam, 1000, seed);
        all_pass = all_pass && r1.pass && r2.pass;
        reports.push_back(report_json(r1));
        reports.push_back(report_json(r2));
    }
    if (reports.empty()) {
        std::cerr << "unknown check '" << which << "' (expected fan, pg, a8, unitarity or all)\n";
        return kExitCheckFailed;
    }
    for (const auto& r : reports) std::cout << r << "\n";
    return all_pass ? kExitOk : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Few-photon scattering amplitudes for waveguide-coupled emitters"};
    app.require_subcommand(1);

    std::string config_path, csv_path, format = "text", which = "all";
    std::vector<double> outputs;
    bool json_out = false;
    int n_max = 40, points = 201, mu = 1;
    double f0 = 0.0, fmin = 0.0, fmax = 0.0;
    std::uint64_t seed = 2024;

    auto* amp = app.add_subcommand("amp", "Canonical scattering amplitude for a configuration");
    amp->add_option("--config", config_path, "JSON configuration file")->required();
    amp->add_option("--outputs", outputs, "output frequencies to evaluate the coefficients at")
        ->delimiter(',');
    amp->add_option("--format", format, "output format: text or json");

    auto* poles = app.add_subcommand("poles", "Pole map of the frequency-mixing amplitude");
    poles->add_option("--config", config_path, "JSON configuration file")->required();
    poles->add_option("--out", csv_path, "CSV output path");
    poles->add_flag("--json", json_out, "print the map as JSON instead of a summary");

    auto* series = app.add_subcommand("series", "Dyson partial sums against the closed form");
    series->add_option("--config", config_path, "JSON configuration file")->required();
    series->add_option("--nmax", n_max, "largest Dyson order (default 40)");
    auto* f0_opt = series->add_option("--f0", f0, "scattered f0 for two-photon points");
    series->add_option("--mu", mu, "final ground state (lambda)");

    auto* spectrum = app.add_subcommand("spectrum", "Mixing coefficient magnitude over a grid");
    spectrum->add_option("--config", config_path, "JSON configuration file")->required();
    spectrum->add_option("--fmin", fmin, "grid start [rad/s]")->required();
    spectrum->add_option("--fmax", fmax, "grid end [rad/s]")->required();
    spectrum->add_option("--points", points, "grid size (default 201)");
    spectrum->add_option("--out", csv_path, "CSV output path (default stdout)");
    spectrum->add_option("--mu", mu, "final ground state (lambda)");

    auto* check = app.add_subcommand("check", "Built-in verification suites");
    check->add_option("which", which, "fan | pg | a8 | unitarity | all")->required();
    check->add_option("--seed", seed, "grid seed");

    int diag_n = 8, diag_p = 2;
    std::string diag_kind = "tls";
    auto* diagrams = app.add_subcommand("diagrams", "Dump the diagram census at an order as JSON");
    diagrams->add_option("--n", diag_n, "Dyson order (even, >= 2)");
    diagrams->add_option("--p", diag_p, "photon count (1 or 2)");
    diagrams->add_option("--kind", diag_kind, "tls or lambda");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*amp) return cmd_amp(config_path, outputs, format);
        if (*poles) return cmd_poles(config_path, csv_path, json_out);
        if (*series) return cmd_series(config_path, n_max, f0, f0_opt->count() > 0, mu);
        if (*spectrum) return cmd_spectrum(config_path, fmin, fmax, points, csv_path, mu);
        if (*check) return cmd_check(which, seed);
        if (*diagrams) {
            const auto kind = diag_kind == "lambda" ? EmitterKind::Lambda : EmitterKind::TLS;
            std::cout << diagrams_json(enumerate_diagrams(diag_n, diag_p, kind)) << "\n";
            return kExitOk;
        }
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const OnPoleError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitOnPole;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitCheckFailed;
    }
    return kExitOk;
}
