// Command-line front end: swap-scan, qst, qpt, calibrate, analyze.
// Emits CSV/JSON only; every command is deterministic given (config, seed).

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sqisw/config.hpp"
#include "sqisw/dynamics.hpp"
#include "sqisw/measurement.hpp"
#include "sqisw/serialize.hpp"
#include "sqisw/tomography.hpp"

using namespace sqisw;
using nlohmann::json;

namespace {

struct CommonOpts {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> shots;
    int calibrate = -1; // -1 unset, 0 off, 1 on
    bool project = false;
    std::string out;
    int jobs = 1;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--config", o.config_path, "JSON config file (defaults: reference device)");
    cmd->add_option("--seed", o.seed, "Master RNG seed");
    cmd->add_option("--shots", o.shots, "Shots per experiment, or \"exact\"");
    cmd->add_flag("--calibrate,!--no-calibrate",
                  [&o](std::int64_t count) { o.calibrate = count > 0 ? 1 : 0; },
                  "Invert the readout model on measured data");
    cmd->add_flag("--project-physical", o.project, "Project reconstructed states to physical");
    cmd->add_option("--out", o.out, "Output path (default: stdout)");
    cmd->add_option("--jobs", o.jobs, "Worker threads for sweeps")->check(CLI::PositiveNumber);
}

RunConfig resolve_config(const CommonOpts& o) {
    RunConfig cfg = o.config_path.empty() ? RunConfig{} : load_config_file(o.config_path);
    if (o.seed) cfg.seed = *o.seed;
    if (o.shots) {
        if (*o.shots == "exact") {
            cfg.shots = 0;
        } else {
            try {
                cfg.shots = std::stoull(*o.shots);
            } catch (const std::exception&) {
                throw config_error("--shots expects a non-negative integer or \"exact\"");
            }
        }
    }
    if (o.calibrate >= 0) cfg.calibrate = o.calibrate == 1;
    if (o.project) cfg.project_physical = true;
    if (!o.out.empty()) cfg.out = o.out;
    cfg.validate();
    return cfg;
}

ExperimentOptions experiment_options(const RunConfig& cfg, int jobs) {
    ExperimentOptions opt;
    opt.noise = cfg.noise;
    opt.readout = cfg.measurement;
    opt.calibrate = cfg.calibrate;
    opt.project = cfg.project_physical;
    opt.pulse_pi_ns = cfg.pulse_window();
    opt.shots = cfg.shots;
    opt.seed = cfg.seed;
    opt.jobs = jobs;
    return opt;
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw config_error("cannot open output file: " + path);
    out << text;
}

void write_json(const std::string& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::vector<double> parse_tf_range(const std::string& spec) {
    double start = 0, stop = 0;
    int count = 0;
    char extra = 0;
    if (std::sscanf(spec.c_str(), "%lf:%lf:%d%c", &start, &stop, &count, &extra) != 3 ||
        count < 1 || stop < start || start < 0)
        throw config_error("--tf expects START:STOP:COUNT with 0 <= START <= STOP, COUNT >= 1");
    std::vector<double> tf(count);
    for (int i = 0; i < count; ++i)
        tf[i] = count == 1 ? start : start + (stop - start) * i / (count - 1);
    return tf;
}

std::vector<double> parse_delta_list(const std::string& spec) {
    std::vector<double> out;
    std::stringstream ss(spec);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            out.push_back(std::stod(tok));
        } catch (const std::exception&) {
            throw config_error("--delta-mhz expects a comma-separated list of numbers");
        }
    }
    if (out.empty()) throw config_error("--delta-mhz list is empty");
    return out;
}

// ---------------------------------------------------------------------------

int cmd_swap_scan(const CommonOpts& common, const std::string& tf_spec,
                  const std::string& delta_spec, const std::string& summary_path) {
    const RunConfig cfg = resolve_config(common);
    const std::vector<double> tf = parse_tf_range(tf_spec);
    const std::vector<double> deltas_mhz = parse_delta_list(delta_spec);

    std::vector<double> deltas(deltas_mhz.size());
    for (std::size_t i = 0; i < deltas_mhz.size(); ++i) deltas[i] = mhz_to_rad_ns(deltas_mhz[i]);

    SwapScanOptions opts;
    opts.shots = cfg.shots;
    opts.seed = cfg.seed;
    if (cfg.shots > 0) opts.readout = cfg.measurement;
    opts.evolve.pulse_pi_ns = cfg.pulse_window();
    opts.jobs = common.jobs;

    const DeviceParams params = cfg.device();
    const auto scan = swap_scan(params, cfg.noise, tf, deltas, opts);

    std::string csv = "delta_mhz,tf_ns,p00,p01,p10,p11\n";
    for (std::size_t di = 0; di < deltas.size(); ++di) {
        for (std::size_t ti = 0; ti < tf.size(); ++ti) {
            const auto& pt = scan[di * tf.size() + ti];
            csv += fmt(deltas_mhz[di]) + "," + fmt(pt.tf) + "," + fmt(pt.probs.p00) + "," +
                   fmt(pt.probs.p01) + "," + fmt(pt.probs.p10) + "," + fmt(pt.probs.p11) + "\n";
        }
    }
    write_text(cfg.out, csv);

    std::string summary = "delta_mhz,peak_to_peak,theory\n";
    for (std::size_t di = 0; di < deltas.size(); ++di) {
        double lo = 1.0, hi = 0.0;
        for (std::size_t ti = 0; ti < tf.size(); ++ti) {
            const double p = scan[di * tf.size() + ti].probs.p01;
            lo = std::min(lo, p);
            hi = std::max(hi, p);
        }
        const double g2 = params.g * params.g;
        const double theory = g2 / (g2 + deltas[di] * deltas[di]);
        summary += fmt(deltas_mhz[di]) + "," + fmt(hi - lo) + "," + fmt(theory) + "\n";
    }
    if (!summary_path.empty()) write_text(summary_path, summary);
    return 0;
}

int cmd_qst(const CommonOpts& common, const std::string& input_label,
            const std::string& gate) {
    const RunConfig cfg = resolve_config(common);
    const InputState input = input_from_label(input_label);
    const GateKind kind = gate_from_name(gate);

    ExperimentOptions opt = experiment_options(cfg, common.jobs);
    opt.keep_records = cfg.shots > 0;

    const StateTomographyRun run =
        run_state_tomography(kind, input, cfg.device(), opt);

    CVec psi = CVec::Zero(4);
    psi(0) = 1.0;
    const CVec target = ideal_gate_unitary(kind) * (prep_unitary(input) * psi);

    json j;
    j["input"] = input.label();
    j["gate"] = gate_name(kind);
    j["shots"] = cfg.shots;
    j["seed"] = cfg.seed;
    j["calibrated"] = cfg.calibrate && cfg.measurement.has_value();
    j["fidelity_to_ideal"] = state_fidelity(run.rho, CMat(target * target.adjoint()));
    j["min_eigenvalue"] = run.min_eigenvalue;
    j["negative_flagged"] = run.negative_flagged;
    j["rho"] = density_to_json(run.rho);
    if (!run.records.empty()) {
        json recs = json::array();
        for (const auto& r : run.records) recs.push_back(shot_record_to_json(r));
        j["records"] = std::move(recs);
    }
    write_json(cfg.out, j);
    return 0;
}

int cmd_qpt(const CommonOpts& common, const std::string& gate) {
    const RunConfig cfg = resolve_config(common);
    const GateKind kind = gate_from_name(gate);
    const ChiMatrix target = chi_theory(ideal_gate_unitary(kind));

    ExperimentOptions opt = experiment_options(cfg, common.jobs);
    opt.calibrate = true;
    const ProcessTomographyRun cal = run_process_tomography(kind, cfg.device(), opt);
    opt.calibrate = false;
    const ProcessTomographyRun raw = run_process_tomography(kind, cfg.device(), opt);

    json j;
    j["gate"] = gate_name(kind);
    j["shots"] = cfg.shots;
    j["seed"] = cfg.seed;
    j["fp_calibrated"] = process_fidelity(target, cal.chi);
    j["fp_uncalibrated"] = process_fidelity(target, raw.chi);
    j["residual_calibrated"] = cal.residual;
    j["residual_uncalibrated"] = raw.residual;
    j["trace_preservation_residual_calibrated"] = cal.tp_residual;
    j["trace_preservation_residual_uncalibrated"] = raw.tp_residual;
    j["negative_flagged"] = cal.negative_flagged;
    j["chi_calibrated"] = chi_to_json(cal.chi);
    j["chi_uncalibrated"] = chi_to_json(raw.chi);
    write_json(cfg.out, j);
    return 0;
}

int cmd_calibrate(const CommonOpts& common, double k_ratio) {
    const RunConfig cfg = resolve_config(common);
    if (!cfg.measurement)
        throw config_error("calibrate: config has no measurement model to characterize");
    const MeasurementModel& m = *cfg.measurement;

    // Preparation survival of a pi-pulsed |1> during the trailing half pulse
    // window (finite-pulse mode only).
    auto survival = [&](double t1) {
        if (!cfg.finite_pulse || !cfg.noise) return 1.0;
        return std::exp(-(cfg.pulse_pi_ns / 2.0) / t1);
    };

    std::uint64_t cell = 0;
    auto maybe_sample = [&](const ProbVector& p) {
        const std::uint64_t idx = cell++;
        if (cfg.shots == 0) return p;
        return sample(p, cfg.shots, derive_seed(cfg.seed, idx)).frequencies();
    };

    // Single-qubit fidelity runs: bias one qubit into operation, measure the
    // tunneling probability for |0> and for a pi-pulsed |1>.
    auto probe = [&](Qubit q, bool pi_pulse) {
        const double f0 = q == Qubit::A ? m.f0a : m.f0b;
        const double f1 = q == Qubit::A ? m.f1a : m.f1b;
        const double t1 = q == Qubit::A ? (cfg.noise ? cfg.noise->t1a : 1.0)
                                        : (cfg.noise ? cfg.noise->t1b : 1.0);
        double p1;
        if (pi_pulse) {
            const double s = survival(t1);
            p1 = s * f1 + (1.0 - s) * (1.0 - f0);
        } else {
            p1 = 1.0 - f0;
        }
        const ProbVector sampled = maybe_sample(ProbVector{1.0 - p1, p1, 0, 0});
        return sampled.p01;
    };

    FidelityPair fa, fb;
    if (cfg.finite_pulse && cfg.noise) {
        fa = estimate_fidelities(probe, Qubit::A, cfg.pulse_pi_ns / 2.0, cfg.noise->t1a);
        fb = estimate_fidelities(probe, Qubit::B, cfg.pulse_pi_ns / 2.0, cfg.noise->t1b);
    } else {
        fa = estimate_fidelities(probe, Qubit::A);
        fb = estimate_fidelities(probe, Qubit::B);
    }

    // Two-qubit runs for the crosstalk estimators: prepare |00>, |01>, |10>.
    auto two_qubit_run = [&](int prepared) {
        ProbVector p{0, 0, 0, 0};
        const double s = survival(prepared == 1 ? (cfg.noise ? cfg.noise->t1b : 1.0)
                                                : (cfg.noise ? cfg.noise->t1a : 1.0));
        switch (prepared) {
            case 0: p.p00 = 1.0; break;
            case 1: p.p01 = s; p.p00 = 1.0 - s; break;
            default: p.p10 = s; p.p00 = 1.0 - s; break;
        }
        return maybe_sample(apply_model(m, p));
    };

    const ProbVector run00 = two_qubit_run(0);
    const ProbVector run01 = two_qubit_run(1);
    const ProbVector run10 = two_qubit_run(2);

    const double xba_approx = estimate_crosstalk_ratio(run00, run01, Qubit::B, fa.f0);
    const double xab_approx = estimate_crosstalk_ratio(run00, run10, Qubit::A, fb.f0);

    // Joint fixed point of the two exact-denominator relations.
    double xba = xba_approx, xab = xab_approx;
    for (int it = 0; it < 32; ++it) {
        const double nba = estimate_crosstalk_ratio(run00, run01, Qubit::B, fa.f0, xab);
        const double nab = estimate_crosstalk_ratio(run00, run10, Qubit::A, fb.f0, xba);
        if (std::abs(nba - xba) < 1e-15 && std::abs(nab - xab) < 1e-15) break;
        xba = nba;
        xab = nab;
    }

    const double xab_cons = crosstalk_consistency_solve(run00, k_ratio);

    json j;
    j["shots"] = cfg.shots;
    j["seed"] = cfg.seed;
    j["fidelities"] = {{"f0a", fa.f0}, {"f1a", fa.f1}, {"f0b", fb.f0}, {"f1b", fb.f1}};
    j["crosstalk"] = {{"xba_ratio", xba_approx},      {"xab_ratio", xab_approx},
                      {"xba_ratio_exact", xba},       {"xab_ratio_exact", xab},
                      {"xab_consistency", xab_cons},  {"xba_consistency", k_ratio * xab_cons},
                      {"k", k_ratio}};
    write_json(cfg.out, j);
    return 0;
}

int cmd_analyze(const CommonOpts& common, const std::string& chi_path,
                std::optional<double> g_mhz, double threshold) {
    const RunConfig cfg = resolve_config(common);
    const double g = mhz_to_rad_ns(g_mhz.value_or(cfg.g_mhz));

    std::ifstream in(chi_path);
    if (!in) throw config_error("cannot open chi file: " + chi_path);
    json chi_json;
    try {
        in >> chi_json;
    } catch (const json::exception& e) {
        throw config_error(std::string("chi parse error: ") + e.what());
    }
    const ChiMatrix chi = chi_from_json(chi_json);
    if (chi.basis != kChiBasis)
        throw config_error("analyze: chi basis tag \"" + chi.basis + "\" is not \"" +
                           kChiBasis + "\"");

    const double t2 = extract_t2(chi, g);
    const double kappa = extract_kappa(chi);

    json flagged = json::array();
    for (const auto& f : flag_chi_elements(chi, g, threshold)) {
        flagged.push_back({{"element", f.row + "," + f.col},
                           {"re", f.re},
                           {"im", f.im},
                           {"magnitude", f.magnitude},
                           {"classification", f.classification}});
    }

    json j;
    j["g_mhz"] = g_mhz.value_or(cfg.g_mhz);
    j["t2_ns"] = t2;
    j["kappa"] = kappa;
    j["trace_preservation_residual"] = trace_preservation_residual(chi);
    j["flagged_elements"] = std::move(flagged);
    write_json(cfg.out, j);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-qubit entangling-gate simulator and tomography toolkit"};
    app.require_subcommand(1);

    CommonOpts scan_opts, qst_opts, qpt_opts, cal_opts, ana_opts;

    auto* scan = app.add_subcommand("swap-scan", "Detuned swap dynamics over a (delta, tf) grid");
    add_common(scan, scan_opts);
    std::string tf_spec = "0:182:365";
    std::string delta_spec = "0,5,11,25,50,100,200";
    std::string summary_path;
    scan->add_option("--tf", tf_spec, "Interaction-time grid START:STOP:COUNT in ns");
    scan->add_option("--delta-mhz", delta_spec, "Comma-separated detunings in MHz");
    scan->add_option("--summary-out", summary_path, "Peak-to-peak summary CSV path");

    auto* qst = app.add_subcommand("qst", "State tomography of a prepared and gated input");
    add_common(qst, qst_opts);
    std::string input_label = "0,1";
    std::string qst_gate = "sqisw";
    qst->add_option("--input", input_label,
                    "Per-qubit input labels from {0, 1, 0+1, 0+i1} (aliases +, i)");
    qst->add_option("--gate", qst_gate, "Gate: none | sqisw | iswap | cnot");

    auto* qpt = app.add_subcommand("qpt", "Process tomography over the 16 input states");
    add_common(qpt, qpt_opts);
    std::string qpt_gate = "sqisw";
    qpt->add_option("--gate", qpt_gate, "Gate: none | sqisw | iswap | cnot");

    auto* cal = app.add_subcommand("calibrate", "Readout fidelity and crosstalk estimation");
    add_common(cal, cal_opts);
    double k_ratio = 1.0;
    cal->add_option("--k", k_ratio, "Assumed crosstalk ratio x_ba/x_ab for the consistency solve")
        ->check(CLI::PositiveNumber);

    auto* ana = app.add_subcommand("analyze", "Decoherence parameters from a chi matrix");
    add_common(ana, ana_opts);
    std::string chi_path;
    std::optional<double> g_mhz;
    double threshold = 0.02;
    ana->add_option("--chi", chi_path, "chi matrix JSON file")->required();
    ana->add_option("--g-mhz", g_mhz, "Coupling g/2pi in MHz (default: config device)");
    ana->add_option("--threshold", threshold, "Magnitude threshold for flagged elements");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        std::cerr << json{{"error", {{"code", 2}, {"message", e.what()}}}}.dump() << "\n";
        return 2;
    }

    try {
        if (scan->parsed())
            return cmd_swap_scan(scan_opts, tf_spec, delta_spec, summary_path);
        if (qst->parsed()) return cmd_qst(qst_opts, input_label, qst_gate);
        if (qpt->parsed()) return cmd_qpt(qpt_opts, qpt_gate);
        if (cal->parsed()) return cmd_calibrate(cal_opts, k_ratio);
        if (ana->parsed()) return cmd_analyze(ana_opts, chi_path, g_mhz, threshold);
    } catch (const config_error& e) {
        std::cerr << json{{"error", {{"code", 2}, {"message", e.what()}}}}.dump() << "\n";
        return 2;
    } catch (const extraction_error& e) {
        std::cerr << json{{"error", {{"code", 4}, {"message", e.what()}}}}.dump() << "\n";
        return 4;
    } catch (const numerical_error& e) {
        std::cerr << json{{"error", {{"code", 3}, {"message", e.what()}}}}.dump() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << json{{"error", {{"code", 2}, {"message", e.what()}}}}.dump() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << json{{"error", {{"code", 1}, {"message", e.what()}}}}.dump() << "\n";
        return 1;
    }
    return 0;
}
