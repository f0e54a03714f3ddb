#include "zeldovich/cli.hpp"

#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "zeldovich/constants.hpp"
#include "zeldovich/cylinder.hpp"
#include "zeldovich/errors.hpp"
#include "zeldovich/plot.hpp"

namespace zeldovich {

using ojson = nlohmann::ordered_json;

namespace {

Eigen::VectorXd to_vector(const std::vector<double>& v) {
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

ojson peaks_json(const SweepResult& s) {
    ojson arr = ojson::array();
    for (std::size_t i = 0; i < static_cast<std::size_t>(s.F_grid.size()); ++i) {
        for (std::size_t k = 0; k < s.phase_count(); ++k) {
            const auto& p = s.peaks[k][i];
            arr.push_back({{"F_hz", p.F}, {"phase_label", s.labels[k]}, {"f_peak_hz", p.f_peak}, {"peak_volt", p.amplitude}});
        }
    }
    return arr;
}

}  // namespace

ArtifactSet sweep_artifacts(const RunConfig& cfg, bool no_cylinder) {
    const auto f = linear_grid(cfg.sweep.f_min, cfg.sweep.f_max, cfg.sweep.f_points);
    const auto baseline = frequency_sweep(cfg.circuits, nullptr, 0.0, f);
    ArtifactSet out;
    ojson summary;
    summary["command"] = "sweep";
    summary["with_cylinder"] = !no_cylinder;
    if (no_cylinder) {
        out.add("sweep.csv", sweep_csv(baseline));
        out.add("peaks.csv", peaks_csv(baseline));
        out.add("sweep.svg", plot_sweep(baseline, nullptr));
        summary["peaks"] = peaks_json(baseline);
    } else {
        const auto s = frequency_sweep(cfg.circuits, &cfg.cylinder, to_vector(cfg.sweep.F), f);
        out.add("sweep.csv", sweep_csv(s));
        out.add("peaks.csv", peaks_csv(s));
        out.add("baseline.csv", sweep_csv(baseline));
        out.add("sweep.svg", plot_sweep(s, &baseline));
        summary["peaks"] = peaks_json(s);
        summary["baseline_peaks"] = peaks_json(baseline);
        ojson gains = ojson::array();
        for (std::size_t i = 0; i < static_cast<std::size_t>(s.F_grid.size()); ++i) {
            for (std::size_t k = 0; k < s.phase_count(); ++k) {
                gains.push_back({{"F_hz", s.F_grid(static_cast<Eigen::Index>(i))},
                                 {"phase_label", s.labels[k]},
                                 {"gain", s.peaks[k][i].amplitude / baseline.peaks[k][0].amplitude}});
            }
        }
        summary["gains"] = gains;
    }
    out.add("summary.json", summary.dump(2) + "\n");
    return out;
}

ArtifactSet map_artifacts(const RunConfig& cfg) {
    const auto f = linear_grid(cfg.map.f_min, cfg.map.f_max, cfg.map.f_points);
    const auto F = linear_grid(cfg.map.F_min, cfg.map.F_max, cfg.map.F_points);
    const auto m = stability_map(cfg.circuits, &cfg.cylinder, f, F);
    ArtifactSet out;
    out.add("map.csv", map_csv(m));
    out.add("map.svg", plot_stability_map(m, cfg.cylinder.mode_m));
    ojson summary;
    summary["command"] = "map";
    summary["cells"] = m.unstable.size();
    summary["unstable_cells"] = m.unstable_count();
    if (m.unstable_count() > 0) {
        double lo = INFINITY, hi = -INFINITY;
        for (Eigen::Index i = 0; i < F.size(); ++i)
            if (m.unstable.row(i).any()) {
                lo = std::min(lo, F(i));
                hi = std::max(hi, F(i));
            }
        summary["unstable_F_min_hz"] = lo;
        summary["unstable_F_max_hz"] = hi;
    }
    out.add("summary.json", summary.dump(2) + "\n");
    return out;
}

ArtifactSet fit_artifacts(const RunConfig& cfg, const std::vector<FitPoint>& data) {
    const double w = constants::two_pi * cfg.fit.f;
    FitResult r;
    std::vector<double> model;
    ojson summary;
    summary["command"] = "fit";
    summary["target"] = to_string(cfg.fit.target);
    summary["f_hz"] = cfg.fit.f;
    if (cfg.fit.target == FitTarget::coupling) {
        r = fit_cylinder_coupling(data, cfg.fit.f, cfg.cylinder, cfg.fit.L_coil);
        CylinderParams c = cfg.cylinder;
        c.coupling_A = r.coupling_A;
        for (const auto& p : data)
            model.push_back(r.R_circ + cylinder_impedance(c, cfg.fit.L_coil, w, constants::two_pi * p.F).resistance);
        summary["coupling_A"] = r.coupling_A;
        summary["R_circ_ohm"] = r.R_circ;
    } else {
        r = fit_inductance_offset(data, cfg.fit.f, cfg.cylinder);
        for (const auto& p : data)
            model.push_back(r.L0 + cylinder_impedance(cfg.cylinder, r.L0, w, constants::two_pi * p.F).inductance);
        summary["coupling_A"] = cfg.cylinder.coupling_A;
        summary["L0_henry"] = r.L0;
    }
    summary["residual_rms"] = r.residual_rms;
    summary["iterations"] = r.iterations;
    summary["warnings"] = r.warnings;
    ArtifactSet out;
    out.add("fit.csv", fit_csv(data, model));
    out.add("fit.json", summary.dump(2) + "\n");
    return out;
}

ArtifactSet simulate_artifacts(const RunConfig& cfg) {
    const Scenario& sc = cfg.simulation;
    const auto tr = simulate(sc);
    ArtifactSet out;
    out.add("trace.csv", trace_csv(tr));
    out.add("events.jsonl", events_jsonl(tr));
    out.add("trace.svg", plot_trace(tr));
    if (sc.waveform_output.enabled) {
        out.add("waveform.csv", waveform_csv(synthesize_waveform(tr, sc.waveform_output.sample_rate)));
    }
    ojson summary;
    summary["command"] = "simulate";
    summary["duration_s"] = tr.t.back();
    summary["halted"] = tr.halted;
    summary["steps"] = tr.steps;
    summary["step_halvings"] = tr.halvings;
    summary["peak_amplitude_a"] = *std::max_element(tr.amplitude.begin(), tr.amplitude.end());
    summary["final_F_hz"] = tr.F.back();
    summary["final_f_inst_hz"] = tr.f_inst.back();
    summary["final_R_net_ohm"] = tr.R_net.back();
    summary["cycles"] = count_cycles(tr, 1e-6);
    summary["max_energy_residual"] = tr.max_energy_residual;
    summary["min_heat_rate_w"] = tr.min_heat_rate;
    ojson events = ojson::array();
    for (const auto& e : tr.events) events.push_back({{"time", e.time}, {"kind", e.kind}});
    summary["events"] = events;
    out.add("summary.json", summary.dump(2) + "\n");
    return out;
}

ArtifactSet analyze_artifacts(const RunConfig& cfg, const Waveform& w) {
    const auto& a = cfg.analysis;
    const Waveform filtered = bandpass(w, a.f_lo, a.f_hi, a.order);
    auto env = analytic_envelope(filtered, a.envelope);
    std::vector<std::string> labels;
    for (std::size_t k = 0; k < w.channels.size(); ++k) labels.push_back(cfg.circuits[k].label);
    if (a.attenuated_probes) {
        for (std::size_t k = 0; k < env.size(); ++k) {
            const auto& coeffs = cfg.probes.at(labels[k]);
            for (Eigen::Index i = 0; i < env[k].size(); ++i) {
                const auto r = probe_correction(env[k].amplitude(i), 0.0, env[k].f_inst(i), coeffs);
                env[k].amplitude(i) = r.volt;
                env[k].phase(i) += r.deg * constants::pi / 180.0;
            }
        }
    }
    std::vector<Eigen::VectorXd> R;
    for (const auto& e : env) R.push_back(extract_net_resistance(e, a.L, a.smoothing));
    const auto spec = spectrogram(filtered.channels.front(), w.sample_rate, a.window_len, a.hop, w.t0);

    ArtifactSet out;
    out.add("envelope.csv", envelope_csv(labels, env, R));
    out.add("spectrogram.csv", spectrogram_csv(spec, a.f_lo - 100, a.f_hi + 100));
    ojson summary;
    summary["command"] = "analyze";
    summary["sample_rate_hz"] = w.sample_rate;
    summary["samples"] = w.length();
    summary["channels"] = labels;
    ojson per = ojson::array();
    for (std::size_t k = 0; k < env.size(); ++k) {
        per.push_back({{"label", labels[k]},
                       {"peak_amplitude_volt", env[k].amplitude.maxCoeff()},
                       {"R_min_ohm", R[k].minCoeff()},
                       {"R_max_ohm", R[k].maxCoeff()}});
    }
    summary["per_channel"] = per;
    if (env.size() == 3) {
        const auto rel = relative_phases(env);
        summary["relative_phases_rad"] = rel;
        summary["rotation_direction"] = to_string(rotation_direction(rel));
    }
    out.add("analysis.json", summary.dump(2) + "\n");
    return out;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Zel'dovich amplification workbench"};
    app.require_subcommand(1);

    struct Options {
        std::string config;
        std::string out_dir{"out"};
        std::vector<std::string> overrides;
        std::optional<std::uint64_t> seed;
        bool no_cylinder{false};
        bool quiet{false};
        std::string input;
    } opt;

    auto add_common = [&](CLI::App* sub, bool input) {
        sub->add_option("--config", opt.config, "JSON run configuration")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", opt.out_dir, "output directory")->capture_default_str();
        sub->add_option("--set", opt.overrides, "override key=value (repeatable)");
        sub->add_option("--seed", opt.seed, "random seed for the simulation");
        sub->add_flag("--no-cylinder", opt.no_cylinder, "bare circuits without the rotor");
        sub->add_flag("--quiet", opt.quiet, "print nothing on success");
        if (input) {
            sub->add_option("--input", opt.input, "input CSV")->check(CLI::ExistingFile);
        }
    };
    auto* sweep = app.add_subcommand("sweep", "frequency sweeps at fixed rotor speeds");
    auto* map = app.add_subcommand("map", "instability map over (f, F)");
    auto* fit = app.add_subcommand("fit", "fit the cylinder coupling or the inductance offset");
    auto* sim = app.add_subcommand("simulate", "time-domain instability run");
    auto* ana = app.add_subcommand("analyze", "envelope, resistance and spectrogram of a waveform CSV");
    add_common(sweep, false);
    add_common(map, false);
    add_common(fit, true);
    add_common(sim, false);
    add_common(ana, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        return 2;
    }

    try {
        auto overrides = opt.overrides;
        if (opt.seed) overrides.push_back("simulation.seed=" + std::to_string(*opt.seed));
        const RunConfig cfg = load_config(opt.config, overrides);
        if (std::filesystem::exists(opt.out_dir) && !std::filesystem::is_directory(opt.out_dir)) {
            throw ConfigError("--out '" + opt.out_dir + "' exists and is not a directory");
        }
        if (opt.no_cylinder && !sweep->parsed()) {
            throw ConfigError("--no-cylinder applies to sweep only");
        }
        ArtifactSet artifacts;
        if (sweep->parsed()) {
            artifacts = sweep_artifacts(cfg, opt.no_cylinder);
        } else if (map->parsed()) {
            artifacts = map_artifacts(cfg);
        } else if (fit->parsed()) {
            const auto data = opt.input.empty() ? cfg.fit.data : parse_fit_csv(read_text_file(opt.input));
            artifacts = fit_artifacts(cfg, data);
        } else if (sim->parsed()) {
            artifacts = simulate_artifacts(cfg);
        } else if (ana->parsed()) {
            if (opt.input.empty()) throw ConfigError("analyze needs --input WAVEFORM.csv");
            artifacts = analyze_artifacts(cfg, read_waveform_csv(opt.input));
        }
        const auto written = artifacts.commit(opt.out_dir);
        if (!opt.quiet) {
            for (const auto& p : written) out << p.string() << "\n";
        }
        return 0;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace zeldovich
