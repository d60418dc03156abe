#ifndef AMPFORGE_CLI_HPP
#define AMPFORGE_CLI_HPP

// Command-line front end: `design`, `verify` and `sweep` subcommands.
// Exit codes: 0 pass, 1 usage/parse/design/I-O error, 2 verification failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ampforge/design.hpp"
#include "ampforge/devices.hpp"
#include "ampforge/netlist.hpp"
#include "ampforge/values.hpp"
#include "ampforge/verify.hpp"

namespace ampforge {

inline constexpr int kExitPass = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitFail = 2;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::string subcommand;
    std::string topology;
    std::optional<GainTarget> gain;
    std::optional<double> v0_peak;
    std::optional<double> v_cc;
    std::optional<double> r_l;
    std::optional<double> r_s;
    std::optional<double> f_l;
    std::optional<double> stability;
    std::optional<double> power;
    std::optional<double> r_base;
    std::optional<double> tolerance;
    std::string params_path;
    SeriesName series = SeriesName::E24;
    std::string netlist;  // input for verify/sweep
    std::string out;
    std::string report;
    std::string csv;
    double f_from = 1.0;
    double f_to = 1e6;
    int points = 200;
};

/// Checks per-subcommand required flags and output path distinctness.
inline void validate(const RunConfig& cfg) {
    std::vector<std::string> outputs;
    for (const auto* p : {&cfg.out, &cfg.report, &cfg.csv})
        if (!p->empty()) outputs.push_back(*p);
    for (std::size_t i = 0; i < outputs.size(); ++i)
        for (std::size_t j = i + 1; j < outputs.size(); ++j)
            if (outputs[i] == outputs[j]) throw UsageError("output paths must be distinct");

    if (cfg.subcommand == "design") {
        const auto& t = cfg.topology;
        if (t == "single-stage" || t == "two-stage" || t == "opamp" || t == "diff") {
            if (!cfg.gain) throw UsageError("design " + t + " requires --gain, --gain-min or --gain-max");
        } else if (t == "power") {
            if (!cfg.power || !cfg.v_cc || !cfg.r_l) throw UsageError("design power requires --power, --vcc and --rl");
        } else {
            throw UsageError("unknown topology '" + t + "'");
        }
    } else if (cfg.subcommand == "verify" || cfg.subcommand == "sweep") {
        if (cfg.netlist.empty()) throw UsageError(cfg.subcommand + " requires a netlist path");
        if (cfg.subcommand == "sweep" && (!(cfg.f_from > 0.0) || !(cfg.f_to > cfg.f_from) || cfg.points < 2))
            throw UsageError("sweep needs 0 < --from < --to and --points >= 2");
    } else {
        throw UsageError("unknown subcommand '" + cfg.subcommand + "'");
    }
}

inline DeviceSet devices_for(const RunConfig& cfg) {
    return cfg.params_path.empty() ? DeviceSet{} : load_devices(cfg.params_path);
}

inline ComponentSet design_from(const RunConfig& cfg, const DeviceSet& dev) {
    DesignOptions opt;
    opt.resistor_series = cfg.series;
    const auto& t = cfg.topology;
    if (t == "single-stage") {
        SingleStageSpec s;
        s.gain = *cfg.gain;
        s.v0_peak = cfg.v0_peak;
        s.v_cc = cfg.v_cc;
        s.r_l = cfg.r_l;
        s.r_s = cfg.r_s;
        if (cfg.f_l) s.f_l = *cfg.f_l;
        if (cfg.stability) s.stability = *cfg.stability;
        return design_single_stage(s, dev.bjt, opt);
    }
    if (t == "two-stage") {
        TwoStageSpec s;
        s.gain = *cfg.gain;
        s.v0_peak = cfg.v0_peak;
        s.v_cc = cfg.v_cc;
        s.r_l = cfg.r_l;
        s.r_s = cfg.r_s;
        if (cfg.f_l) s.f_l = *cfg.f_l;
        if (cfg.stability) s.stability = *cfg.stability;
        return design_two_stage(s, dev.bjt, opt);
    }
    if (t == "opamp") {
        OpAmpSpec s;
        s.gain = *cfg.gain;
        if (cfg.r_base) s.r_base = *cfg.r_base;
        return design_opamp(s, opt);
    }
    if (t == "diff") {
        DiffAmpSpec s;
        s.a_d = cfg.gain->value;
        if (cfg.r_base) s.r_base = *cfg.r_base;
        return design_diff_amp(s, opt);
    }
    PowerAmpSpec s;
    s.p_load = *cfg.power;
    s.v_cc = *cfg.v_cc;
    s.r_l = *cfg.r_l;
    if (cfg.f_l) s.f_l = *cfg.f_l;
    if (cfg.stability) s.stability = *cfg.stability;
    return design_power_amp(s, dev.bjt, opt);
}

inline std::string format_verification(const VerificationReport& r) {
    std::ostringstream os;
    char buf[160];
    os << "verification\n";
    if (r.target_gain) os << "  target gain      " << format_magnitude(*r.target_gain) << '\n';
    std::snprintf(buf, sizeof buf, "  analytic gain    %.6g\n", r.analytic_gain);
    os << buf;
    std::snprintf(buf, sizeof buf, "  midband gain     %.6g at %.6g deg (1 kHz, MNA)\n", r.midband.magnitude,
                  r.midband.phase_deg);
    os << buf;
    if (r.common_mode_gain) {
        std::snprintf(buf, sizeof buf, "  common-mode gain %.3g\n", *r.common_mode_gain);
        os << buf;
    }
    for (const auto& op : r.dc) {
        std::snprintf(buf, sizeof buf, "  dc %-4s V_B=%.4g V_E=%.4g V_CE=%.4g I_C=%.4g mA (%s)\n", op.device.c_str(),
                      op.v_b, op.v_e, op.v_ce, op.i_c * 1e3, to_string(op.state));
        os << buf;
    }
    for (std::size_t i = 0; i < r.stability.size(); ++i) {
        std::snprintf(buf, sizeof buf, "  stability        %.4g\n", r.stability[i]);
        os << buf;
    }
    std::snprintf(buf, sizeof buf, "  tolerance        %.3g %%\n", r.tolerance * 100.0);
    os << buf;
    for (const auto& f : r.failures) os << "  FAIL: " << f << '\n';
    os << "  verdict          " << (r.pass ? "PASS" : "FAIL") << '\n';
    return os.str();
}

inline std::string format_design_report(const ComponentSet& cs, const VerificationReport& r) {
    std::ostringstream os;
    char buf[200];
    os << "design report: " << topology_title(cs.topology, cs.variant) << '\n';
    if (cs.target)
        os << "target gain: " << format_magnitude(cs.target->value) << " (" << to_string(cs.target->qualifier)
           << ")\n";
    os << '\n';
    std::snprintf(buf, sizeof buf, "%-8s %-12s %-12s %-12s %s\n", "part", "raw", "nominal", "quantized", "rule");
    os << buf;
    for (const auto& c : cs.parts) {
        std::string rule = c.direction ? to_string(*c.direction) : "given";
        if (!c.placed) rule += ", not placed";
        std::snprintf(buf, sizeof buf, "%-8s %-12.6g %-12.6g %-12s %s\n", c.label.c_str(), c.raw, c.nominal,
                      format_magnitude(c.quantized).c_str(), rule.c_str());
        os << buf;
    }
    for (const auto& b : cs.bias) {
        std::snprintf(buf, sizeof buf,
                      "\nbias stage %d: V_CEQ=%.6g V  I_CQ=%.6g mA  V_RE=%.6g V  V_CC=%.6g V (rail %.6g V)  "
                      "R_b=%.6g ohm  s=%.4g\n",
                      b.stage, b.v_ceq, b.i_cq * 1e3, b.v_re, b.v_cc, b.v_cc_rail, b.r_b, b.stability_achieved);
        os << buf;
        if (b.power) {
            std::snprintf(buf, sizeof buf,
                          "power: V_CE,peak=%.6g V  I_C,peak=%.6g mA  R_L'=%.6g ohm  P_RE=%.6g W\n",
                          b.power->v_ce_peak, b.power->i_c_peak * 1e3, b.power->r_l_prime, b.power->p_re);
            os << buf;
        }
    }
    if (!cs.notes.empty()) {
        os << "\nnotes\n";
        for (const auto& n : cs.notes) os << "  " << n << '\n';
    }
    os << '\n' << format_verification(r);
    return os.str();
}

namespace detail {

inline void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write '" + path + "'");
    f << text;
    if (!f) throw std::runtime_error("error writing '" + path + "'");
}

inline std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot read '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

inline void emit_report(const RunConfig& cfg, const std::string& text, std::ostream& out) {
    if (cfg.report.empty())
        out << text;
    else
        write_file(cfg.report, text);
}

}  // namespace detail

inline int run_design(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        validate(cfg);
        const auto dev = devices_for(cfg);
        const auto cs = design_from(cfg, dev);
        const auto circuit = build_circuit(cs, dev.bjt, dev.opamp);
        const std::string path = cfg.out.empty() ? cfg.topology + ".net" : cfg.out;
        detail::write_file(path, emit(circuit));
        const auto report = check_design(cs, dev.bjt, dev.opamp, cfg.tolerance);
        detail::emit_report(cfg, format_design_report(cs, report), out);
        return report.pass ? kExitPass : kExitFail;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitError;
    }
}

inline int run_verify(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        validate(cfg);
        const auto dev = devices_for(cfg);
        const auto circuit = parse(detail::read_file(cfg.netlist));
        std::optional<double> target;
        if (cfg.gain) target = cfg.gain->value;
        const auto topo = topology_from_title(circuit.title);
        if (!topo) throw ModelError("cannot tell the amplifier topology from title '" + circuit.title + "'");
        if (!target && topo->first != Topology::Power) throw UsageError("verify requires --gain for this topology");
        const auto report = verify_netlist(circuit, dev.bjt, dev.opamp, target, cfg.tolerance);
        detail::emit_report(cfg, "netlist: " + cfg.netlist + " (" + circuit.title + ")\n" + format_verification(report),
                            out);
        return report.pass ? kExitPass : kExitFail;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitError;
    }
}

inline int run_sweep(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        validate(cfg);
        const auto dev = devices_for(cfg);
        const auto circuit = parse(detail::read_file(cfg.netlist));
        const auto rows = sweep(small_signal_of(circuit, dev.bjt, dev.opamp), cfg.f_from, cfg.f_to, cfg.points);
        std::ostringstream csv;
        write_csv(csv, rows);
        if (cfg.csv.empty())
            out << csv.str();
        else
            detail::write_file(cfg.csv, csv.str());
        return kExitPass;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitError;
    }
}

/// Parses argv into a RunConfig and dispatches.
inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Amplifier design synthesis, netlist generation and verification"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string gain, gain_min, gain_max, v0, vcc, rl, rs, fl, stab, power, rbase, tol, from, to;
    std::string series = "e24";

    auto magnitudes = [&](CLI::App* sub, bool design_flags) {
        sub->add_option("--params", cfg.params_path, "Device parameter file")->check(CLI::ExistingFile);
        auto* g = sub->add_option("--gain", gain, "Voltage gain (exact)");
        auto* gmin = sub->add_option("--gain-min", gain_min, "Minimum voltage gain");
        auto* gmax = sub->add_option("--gain-max", gain_max, "Maximum voltage gain");
        g->excludes(gmin)->excludes(gmax);
        gmin->excludes(gmax);
        sub->add_option("--tolerance", tol, "Relative gain tolerance");
        sub->add_option("--report", cfg.report, "Report file (default: stdout)");
        if (!design_flags) return;
        sub->add_option("--v0-peak", v0, "Output voltage peak");
        sub->add_option("--vcc", vcc, "Supply voltage");
        sub->add_option("--rl", rl, "Load resistance");
        sub->add_option("--rs", rs, "Source resistance");
        sub->add_option("--fl", fl, "Lower cutoff frequency");
        sub->add_option("--stability", stab, "Stability factor");
        sub->add_option("--power", power, "Load power");
        sub->add_option("--rbase", rbase, "Base (maximum) resistance for op-amp networks");
        sub->add_option("--series", series, "Resistor series")->check(CLI::IsMember({"e6", "e12", "e24"}, CLI::ignore_case));
        sub->add_option("--out", cfg.out, "Netlist output path");
    };

    auto* design = app.add_subcommand("design", "Synthesize an amplifier and write its netlist");
    design->add_option("topology", cfg.topology, "single-stage | two-stage | opamp | diff | power")
        ->required()
        ->check(CLI::IsMember({"single-stage", "two-stage", "opamp", "diff", "power"}));
    magnitudes(design, true);

    auto* verify = app.add_subcommand("verify", "Verify a netlist against a gain target");
    verify->add_option("netlist", cfg.netlist, "Netlist file")->required();
    magnitudes(verify, false);

    auto* sweep_cmd = app.add_subcommand("sweep", "Frequency sweep of a netlist to CSV");
    sweep_cmd->add_option("netlist", cfg.netlist, "Netlist file")->required();
    sweep_cmd->add_option("--params", cfg.params_path, "Device parameter file")->check(CLI::ExistingFile);
    sweep_cmd->add_option("--from", from, "Start frequency");
    sweep_cmd->add_option("--to", to, "Stop frequency");
    sweep_cmd->add_option("--points", cfg.points, "Number of points");
    sweep_cmd->add_option("--csv", cfg.csv, "CSV output path (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitPass;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitPass;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitError;
    }

    try {
        auto mag = [](const std::string& s) -> std::optional<double> {
            if (s.empty()) return std::nullopt;
            return parse_magnitude(s);
        };
        if (!gain.empty()) cfg.gain = GainTarget{parse_magnitude(gain), Qualifier::Exact};
        if (!gain_min.empty()) cfg.gain = GainTarget{parse_magnitude(gain_min), Qualifier::AtLeast};
        if (!gain_max.empty()) cfg.gain = GainTarget{parse_magnitude(gain_max), Qualifier::AtMost};
        cfg.v0_peak = mag(v0);
        cfg.v_cc = mag(vcc);
        cfg.r_l = mag(rl);
        cfg.r_s = mag(rs);
        cfg.f_l = mag(fl);
        cfg.stability = mag(stab);
        cfg.power = mag(power);
        cfg.r_base = mag(rbase);
        cfg.tolerance = mag(tol);
        if (auto f = mag(from)) cfg.f_from = *f;
        if (auto f = mag(to)) cfg.f_to = *f;
        cfg.series = series_from_string(series);
    } catch (const std::exception& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitError;
    }

    if (design->parsed()) {
        cfg.subcommand = "design";
        return run_design(cfg, out, err);
    }
    if (verify->parsed()) {
        cfg.subcommand = "verify";
        return run_verify(cfg, out, err);
    }
    cfg.subcommand = "sweep";
    return run_sweep(cfg, out, err);
}

}  // namespace ampforge

#endif  // AMPFORGE_CLI_HPP
