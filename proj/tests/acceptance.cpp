// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

#include "ampforge/design.hpp"
#include "ampforge/netlist.hpp"
#include "ampforge/values.hpp"
#include "ampforge/verify.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace ampforge;

namespace {

// Pinned tolerances.
constexpr double kSingleLo = 17.0, kSingleHi = 23.0;
constexpr double kTwoLo = 75.0, kTwoHi = 125.0;
constexpr double kOpAmpTol = 0.10;
constexpr double kTNetworkTol = 0.05;
constexpr double kDiffMnaTol = 1e-3;
constexpr double kCommonMode = 1e-5;
constexpr double kPowerTol = 1e-12;
constexpr double kExactTol = 1e-9;
constexpr double kLadderTol = 1e-9;
constexpr double kCornerTol = 1e-6;
constexpr double kRuntimeSec = 1.0;
constexpr int kRandomSpecs = 500;
constexpr int kQuantizerSamples = 10000;
constexpr int kRandomCircuits = 100;
constexpr int kLadders = 1000;

const BjtParams P = load_params(oracle::data_path("2n2222.params"));
const OpAmpModel M = load_devices(oracle::data_path("2n2222.params")).opamp;

int failures = 0;

void report(const std::string& name, bool ok, const std::string& detail) {
    std::printf("%s  %-28s %s\n", ok ? "PASS" : "FAIL", name.c_str(), detail.c_str());
    if (!ok) ++failures;
}

std::string fmt(const char* f, auto... args) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double seconds(const std::function<void()>& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void single_stage_gain() {
    VerificationReport r;
    const double t = seconds([&] {
        SingleStageSpec s;
        s.gain = {20.0, Qualifier::Exact};
        const auto cs = design_single_stage(s, P);
        r = verify_netlist(parse(emit(build_circuit(cs, P, M))), P, M, 20.0);
    });
    const double g = r.midband.magnitude;
    report("single-stage gain", g >= kSingleLo && g <= kSingleHi && t < kRuntimeSec,
           fmt("|A|=%.4f in [%g, %g], %.3f s", g, kSingleLo, kSingleHi, t));
}

void two_stage_gain() {
    VerificationReport r;
    const double t = seconds([&] {
        TwoStageSpec s;
        s.gain = {100.0, Qualifier::Exact};
        const auto cs = design_two_stage(s, P);
        r = verify_netlist(parse(emit(build_circuit(cs, P, M))), P, M, 100.0);
    });
    const double g = r.midband.magnitude;
    report("two-stage gain", g >= kTwoLo && g <= kTwoHi && t < kRuntimeSec,
           fmt("|A|=%.4f in [%g, %g], %.3f s", g, kTwoLo, kTwoHi, t));
}

void opamp_gains() {
    bool ok = true;
    std::string detail;
    for (double target : {10.0, -10.0}) {
        OpAmpSpec s;
        s.gain = {target, Qualifier::Exact};
        const auto cs = design_opamp(s);
        const auto r = check_design(cs, P, M);
        const double mna = r.midband.gain.real();
        ok = ok && std::abs(r.analytic_gain - target) <= kOpAmpTol * 10.0 && std::abs(mna - target) <= kOpAmpTol * 10.0;
        detail += fmt("%+g: analytic %.4f MNA %.4f; ", target, r.analytic_gain, mna);
    }
    OpAmpSpec s;
    s.gain = {-100.0, Qualifier::Exact};
    const double a = gain_formula(Topology::OpAmp, OpAmpVariant::TNetwork, design_opamp(s).quantized_values(), P);
    const double dev = std::abs(a + 100.0) / 100.0;
    ok = ok && dev <= kTNetworkTol;
    detail += fmt("T-network -100: analytic %.4f (%.1f%%)", a, dev * 100.0);
    report("op-amp gains", ok, detail);
}

void difference_amp() {
    bool ok = true;
    double worst_mna = 0.0, worst_cm = 0.0;
    for (double a_d : {1.0, 2.0, 5.0, 7.5, 10.0, 33.0, 100.0}) {
        DiffAmpSpec s;
        s.a_d = a_d;
        const auto cs = design_diff_amp(s);
        const double ratio = cs.quantized("R2") / cs.quantized("R1");
        const bool matched = ratio == cs.quantized("R4") / cs.quantized("R3");
        const double analytic = gain_formula(Topology::Diff, OpAmpVariant::None, cs.quantized_values(), P);
        const auto r = check_design(cs, P, M);
        const double mna_err = std::abs(r.midband.magnitude - ratio) / ratio;
        worst_mna = std::max(worst_mna, mna_err);
        worst_cm = std::max(worst_cm, r.common_mode_gain.value_or(1.0));
        ok = ok && matched && analytic == ratio && mna_err <= kDiffMnaTol && r.common_mode_gain &&
             *r.common_mode_gain <= kCommonMode;
    }
    report("difference amplifier", ok, fmt("A_d=R2/R1 exact, worst MNA err %.2e, worst CM gain %.2e", worst_mna, worst_cm));
}

void power_identities() {
    PowerAmpSpec s;
    s.v_cc = 12.0;
    s.p_load = 0.5;
    s.r_l = 8.0;
    const auto cs = design_power_amp(s, P);
    const auto& pw = *cs.bias.at(0).power;
    const double p = 0.5 * pw.v_ce_peak * pw.i_c_peak;
    const double n = cs.raw("NRATIO");
    const bool ok = std::abs(p - 0.5) / 0.5 <= kPowerTol && n == std::sqrt(pw.r_l_prime / s.r_l);
    report("power amplifier identities", ok, fmt("P=%.15g W, N1/N2=%.6f", p, n));
}

void raw_exactness() {
    std::mt19937_64 rng(500);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    int counts[5] = {0, 0, 0, 0, 0};
    int attempts = 0;
    auto track = [&](double got, double want) { worst = std::max(worst, oracle::rel_err(got, want)); };
    auto pick_qualifier = [&] {
        const double x = u(rng);
        return x < 1.0 / 3 ? Qualifier::AtLeast : x < 2.0 / 3 ? Qualifier::AtMost : Qualifier::Exact;
    };
    while (counts[0] < kRandomSpecs && attempts++ < 50 * kRandomSpecs) {
        SingleStageSpec s;
        s.gain = {1.5 + 300.0 * u(rng), pick_qualifier()};
        if (u(rng) < 0.5) s.r_l = std::pow(10.0, 2.5 + 2.5 * u(rng));
        if (u(rng) < 0.3) s.v_cc = 9.0 + 9.0 * u(rng);
        if (u(rng) < 0.3) s.r_s = 50.0 + 950.0 * u(rng);
        s.stability = 2.0 + 18.0 * u(rng);
        try {
            const auto cs = design_single_stage(s, P);
            track(gain_formula(cs.topology, cs.variant, cs.raw_values(), P), s.gain.value);
            ++counts[0];
        } catch (const DesignError&) {
        }
    }
    while (counts[1] < kRandomSpecs && attempts++ < 100 * kRandomSpecs) {
        TwoStageSpec s;
        s.gain = {4.0 + 400.0 * u(rng), pick_qualifier()};
        if (u(rng) < 0.5) s.r_l = std::pow(10.0, 3.0 + 2.0 * u(rng));
        s.stability = 2.0 + 18.0 * u(rng);
        try {
            const auto cs = design_two_stage(s, P);
            track(gain_formula(cs.topology, cs.variant, cs.raw_values(), P), s.gain.value);
            ++counts[1];
        } catch (const DesignError&) {
        }
    }
    for (; counts[2] < kRandomSpecs; ++counts[2]) {
        OpAmpSpec s;
        const double mag = 1.0 + 999.0 * u(rng);
        s.gain = {u(rng) < 0.5 ? mag : -mag, Qualifier::Exact};
        s.r_base = std::pow(10.0, 3.0 + 2.0 * u(rng));
        const auto cs = design_opamp(s);
        track(gain_formula(cs.topology, cs.variant, cs.raw_values(), P), s.gain.value);
    }
    for (; counts[3] < kRandomSpecs; ++counts[3]) {
        DiffAmpSpec s;
        s.a_d = 1.0 + 199.0 * u(rng);
        s.r_base = std::pow(10.0, 3.0 + 2.0 * u(rng));
        const auto cs = design_diff_amp(s);
        track(gain_formula(cs.topology, cs.variant, cs.raw_values(), P), s.a_d);
    }
    // The power stage has no gain target; its design target is the load power.
    while (counts[4] < kRandomSpecs && attempts++ < 200 * kRandomSpecs) {
        PowerAmpSpec s;
        s.v_cc = 6.0 + 24.0 * u(rng);
        s.p_load = 0.05 + 5.0 * u(rng);
        s.r_l = 2.0 + 30.0 * u(rng);
        try {
            const auto cs = design_power_amp(s, P);
            const auto& pw = *cs.bias.at(0).power;
            track(0.5 * pw.v_ce_peak * pw.i_c_peak, s.p_load);
            track(cs.raw("NRATIO") * cs.raw("NRATIO") * s.r_l, pw.r_l_prime);
            ++counts[4];
        } catch (const DesignError&) {
        }
    }
    bool ok = worst <= kExactTol;
    for (int c : counts) ok = ok && c == kRandomSpecs;
    report("raw-design exactness", ok,
           fmt("%d/%d/%d/%d/%d specs, worst rel err %.2e", counts[0], counts[1], counts[2], counts[3], counts[4], worst));
}

void quantizer_oracle() {
    std::mt19937_64 rng(10000);
    std::uniform_real_distribution<double> lg(-12.0, 12.0);
    const std::pair<const char*, const Series*> series[] = {
        {"E6", &Series::e6()}, {"E12", &Series::e12()}, {"E24", &Series::e24()}};
    std::vector<double> tables[3];
    for (int i = 0; i < 3; ++i) tables[i] = oracle::full_table(series[i].first);
    int mismatches = 0, law_breaks = 0;
    for (int i = 0; i < kQuantizerSamples; ++i) {
        const double x = std::pow(10.0, lg(rng));
        const int k = i % 3;
        const Series& s = *series[k].second;
        const double hi = quantize(x, Direction::Higher, s);
        const double lo = quantize(x, Direction::Lower, s);
        const double nr = quantize(x, Direction::Nearest, s);
        mismatches += hi != oracle::scan_quantize(tables[k], x, oracle::Dir::Higher);
        mismatches += lo != oracle::scan_quantize(tables[k], x, oracle::Dir::Lower);
        mismatches += nr != oracle::scan_quantize(tables[k], x, oracle::Dir::Nearest);
        law_breaks += !(hi >= x) + !(lo <= x) + !(nr == hi || nr == lo);
        for (double q : {hi, lo, nr})
            for (auto d : {Direction::Higher, Direction::Lower, Direction::Nearest}) law_breaks += quantize(q, d, s) != q;
    }
    report("quantizer oracle", mismatches == 0 && law_breaks == 0,
           fmt("%d samples, %d oracle mismatches, %d law violations", kQuantizerSamples, mismatches, law_breaks));
}

void netlist_round_trip() {
    int stable = 0, total = 0;
    auto check = [&](const Circuit& c) {
        ++total;
        const auto once = emit(c);
        stable += emit(parse(once)) == once;
    };
    SingleStageSpec ss;
    ss.gain = {20.0, Qualifier::Exact};
    check(build_circuit(design_single_stage(ss, P), P, M));
    TwoStageSpec ts;
    ts.gain = {100.0, Qualifier::Exact};
    check(build_circuit(design_two_stage(ts, P), P, M));
    OpAmpSpec os;
    os.gain = {-100.0, Qualifier::Exact};
    check(build_circuit(design_opamp(os), P, M));
    DiffAmpSpec ds;
    ds.a_d = 5.0;
    check(build_circuit(design_diff_amp(ds), P, M));
    PowerAmpSpec ps;
    ps.v_cc = 12.0;
    ps.p_load = 0.5;
    ps.r_l = 8.0;
    check(build_circuit(design_power_amp(ps, P), P, M));
    std::mt19937_64 rng(100);
    for (int i = 0; i < kRandomCircuits; ++i) check(fixture::random_circuit(rng));
    report("netlist round-trip", stable == total, fmt("%d/%d byte-stable (5 topologies + %d random)", stable, total, kRandomCircuits));
}

void mna_validation() {
    std::mt19937_64 rng(1000);
    std::uniform_real_distribution<double> lf(0.0, 5.0);
    double worst = 0.0;
    for (int i = 0; i < kLadders; ++i) {
        const auto l = oracle::random_ladder(rng);
        const double f = std::pow(10.0, lf(rng));
        const auto r = solve_ac(small_signal_of(fixture::ladder_circuit(l), P), f);
        worst = std::max(worst, oracle::rel_err(r.gain, oracle::ladder_gain(l, f)));
    }
    Circuit rc;
    rc.title = "rc corner";
    rc.elements = {{ElementKind::VSource, "VIN", {"in", "0"}, 0.0, SourceSpec::ac(1.0), {}},
                   {ElementKind::Resistor, "R1", {"in", "out"}, 1e3, {}, {}},
                   {ElementKind::Capacitor, "C1", {"out", "0"}, 1e-6, {}, {}}};
    const auto corner = solve_ac(small_signal_of(rc, P), 1.0 / (2.0 * std::numbers::pi * 1e3 * 1e-6));
    const double cerr = std::abs(corner.magnitude - 1.0 / std::sqrt(2.0));
    report("MNA validation", worst <= kLadderTol && cerr <= kCornerTol,
           fmt("%d ladders worst rel err %.2e; corner |H|=%.9f", kLadders, worst, corner.magnitude));
}

}  // namespace

int main() {
    const std::pair<const char*, void (*)()> criteria[] = {
        {"single-stage gain", single_stage_gain}, {"two-stage gain", two_stage_gain},
        {"op-amp gains", opamp_gains},            {"difference amplifier", difference_amp},
        {"power amplifier identities", power_identities}, {"raw-design exactness", raw_exactness},
        {"quantizer oracle", quantizer_oracle},   {"netlist round-trip", netlist_round_trip},
        {"MNA validation", mna_validation},
    };
    for (const auto& [name, fn] : criteria) {
        try {
            fn();
        } catch (const std::exception& e) {
            report(name, false, std::string("exception: ") + e.what());
        }
    }
    std::printf("%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
