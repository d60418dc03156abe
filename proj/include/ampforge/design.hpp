#ifndef AMPFORGE_DESIGN_HPP
#define AMPFORGE_DESIGN_HPP

// Closed-form design procedures for the five supported amplifier
// topologies. Every engine keeps two value paths:
//   raw      - the exact analytic chain, unquantized, self-consistent;
//   nominal  - the value actually handed to the quantizer, which for bias
//              dividers and the first stage of the cascade is recomputed
//              from already-quantized neighbours (selected supply rail,
//              standard R_e, standard R_b2);
//   quantized- the standard part that ends up in the netlist.

#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ampforge/devices.hpp"
#include "ampforge/values.hpp"

namespace ampforge {

class DesignError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Topology { SingleStage, TwoStage, OpAmp, Diff, Power };
enum class OpAmpVariant { None, Follower, NonInverting, Inverting, TNetwork };
enum class Qualifier { AtLeast, AtMost, Exact };

inline const char* to_string(Topology t) {
    switch (t) {
    case Topology::SingleStage: return "single-stage";
    case Topology::TwoStage: return "two-stage";
    case Topology::OpAmp: return "opamp";
    case Topology::Diff: return "diff";
    case Topology::Power: return "power";
    }
    return "?";
}

inline const char* to_string(Qualifier q) {
    switch (q) {
    case Qualifier::AtLeast: return "at least";
    case Qualifier::AtMost: return "at most";
    case Qualifier::Exact: return "exact";
    }
    return "?";
}

/// AtLeast rounds the gain-setting resistor up, AtMost down.
inline Direction direction_for(Qualifier q) {
    switch (q) {
    case Qualifier::AtLeast: return Direction::Higher;
    case Qualifier::AtMost: return Direction::Lower;
    case Qualifier::Exact: return Direction::Nearest;
    }
    return Direction::Nearest;
}

struct GainTarget {
    double value = 0.0;
    Qualifier qualifier = Qualifier::Exact;
};

// Output swing assumed when none is given: 20 mV p-p in at a gain of 20.
inline constexpr double kDefaultOutputPeak = 0.2;
inline constexpr double kDefaultBaseResistance = 10e3;
inline constexpr double kMidbandHz = 1e3;

struct SingleStageSpec {
    GainTarget gain;
    std::optional<double> v0_peak;
    std::optional<double> v_cc;
    std::optional<double> r_l;
    std::optional<double> r_s;
    double f_l = 20.0;
    double stability = 8.0;
};

struct TwoStageSpec {
    GainTarget gain;
    std::optional<double> v0_peak;
    std::optional<double> v_cc;
    std::optional<double> r_l;
    std::optional<double> r_s;
    double f_l = 20.0;
    double stability = 8.0;
    double v_re2_fraction = 0.10;  // of V_CC, when V_CC is given
};

struct OpAmpSpec {
    GainTarget gain;
    double r_base = kDefaultBaseResistance;
};

struct DiffAmpSpec {
    double a_d = 1.0;
    double r_base = kDefaultBaseResistance;
};

struct PowerAmpSpec {
    double p_load = 0.0;
    double v_cc = 0.0;
    double r_l = 0.0;
    double f_l = 50.0;
    double stability = 10.0;
};

struct DesignOptions {
    SeriesName resistor_series = SeriesName::E24;
    SeriesName capacitor_series = SeriesName::E6;
};

enum class PartKind { Resistor, Capacitor, Supply, Ratio };

struct Component {
    std::string label;
    PartKind kind = PartKind::Resistor;
    double raw = 0.0;
    double nominal = 0.0;
    double quantized = 0.0;
    std::optional<Direction> direction;  // empty: taken as given, not quantized
    bool placed = true;                  // false: reported only, absent from the netlist
};

struct PowerBias {
    double v_ce_peak = 0.0;
    double i_c_peak = 0.0;
    double r_l_prime = 0.0;
    double p_re = 0.0;
};

struct BiasRecord {
    int stage = 1;
    double v_ceq = 0.0;
    double i_cq = 0.0;
    double v_re = 0.0;
    double v_cc = 0.0;       // raw supply of the analytic chain
    double v_cc_rail = 0.0;  // supply placed in the circuit
    double r_b = 0.0;        // raw Thevenin base resistance
    double stability_achieved = 0.0;
    std::optional<PowerBias> power;
};

struct ComponentSet {
    Topology topology = Topology::SingleStage;
    OpAmpVariant variant = OpAmpVariant::None;
    std::optional<GainTarget> target;
    double output_peak = kDefaultOutputPeak;
    std::vector<Component> parts;
    std::vector<BiasRecord> bias;
    std::vector<std::string> notes;

    bool has(const std::string& label) const {
        for (const auto& c : parts)
            if (c.label == label) return true;
        return false;
    }
    const Component& at(const std::string& label) const {
        for (const auto& c : parts)
            if (c.label == label) return c;
        throw DesignError("component set has no " + label);
    }
    double raw(const std::string& label) const { return at(label).raw; }
    double quantized(const std::string& label) const { return at(label).quantized; }

    std::map<std::string, double> raw_values() const {
        std::map<std::string, double> m;
        for (const auto& c : parts) m[c.label] = c.raw;
        return m;
    }
    std::map<std::string, double> quantized_values() const {
        std::map<std::string, double> m;
        for (const auto& c : parts) m[c.label] = c.quantized;
        return m;
    }
};

inline double parallel(double a, double b) { return a * b / (a + b); }

/// Stability factor of a divider-biased stage.
inline double stability_of(double h_fe_max, double r_b, double r_e) {
    return (1.0 + h_fe_max) / (1.0 + h_fe_max * r_e / (r_b + r_e));
}

struct BiasDivider {
    double r_b = 0.0;
    double r_1 = 0.0;  // upper, to the supply
    double r_2 = 0.0;  // lower, to ground
    double v_r1 = 0.0;
    double v_r2 = 0.0;
};

/// Inverts the stability equation for R_b, then splits R_b into the
/// divider whose lower leg drops v_be_on + v_re.
inline BiasDivider solve_bias_divider(double s_target, double h_fe_max, double r_e, double v_cc, double v_re,
                                      double v_be_on) {
    if (!(s_target > 1.0) || !(s_target < 1.0 + h_fe_max)) throw DesignError("stability factor out of range");
    if (!(r_e > 0.0) || !(v_cc > 0.0)) throw DesignError("bias divider needs positive R_e and V_CC");
    BiasDivider d;
    d.r_b = r_e * (h_fe_max * s_target / (1.0 + h_fe_max - s_target) - 1.0);
    if (!(d.r_b > 0.0) || !std::isfinite(d.r_b)) throw DesignError("stability factor out of range");
    d.v_r2 = v_be_on + v_re;
    d.v_r1 = v_cc - d.v_r2;
    if (!(d.v_r1 > 0.0)) throw DesignError("supply too low for bias string");
    const double k = d.v_r1 / d.v_r2;
    d.r_1 = d.r_b * (k + 1.0);
    d.r_2 = d.r_b * (k + 1.0) / k;
    return d;
}

namespace detail {

inline void require_bounded(const std::string& what, double v) {
    if (!std::isfinite(v) || !(v > 1e-15) || v > 1e12) throw DesignError(what + " out of component range");
}

inline double capacitor_for(double reactance, double f_l) {
    return 1.0 / (2.0 * std::numbers::pi * f_l * reactance);
}

inline std::string with_stage(int stage, const std::string& msg) {
    return stage > 0 ? "stage " + std::to_string(stage) + ": " + msg : msg;
}

class Builder {
public:
    explicit Builder(const DesignOptions& opt)
        : rs_(Series::by_name(opt.resistor_series)), cs_(Series::by_name(opt.capacitor_series)) {}

    void resistor(ComponentSet& set, const std::string& label, double raw, double nominal, Direction dir) {
        require_bounded(label, raw);
        require_bounded(label, nominal);
        set.parts.push_back({label, PartKind::Resistor, raw, nominal, quantize(nominal, dir, rs_), dir, true});
    }
    void capacitor(ComponentSet& set, const std::string& label, double raw, bool placed = true) {
        require_bounded(label, raw);
        set.parts.push_back(
            {label, PartKind::Capacitor, raw, raw, quantize(raw, Direction::Higher, cs_), Direction::Higher, placed});
    }
    static void given(ComponentSet& set, const std::string& label, PartKind kind, double v) {
        set.parts.push_back({label, kind, v, v, v, std::nullopt, true});
    }

    const Series& resistors() const { return rs_; }

private:
    const Series& rs_;
    const Series& cs_;
};

inline void check_common(double f_l, double stability, double h_fe_max) {
    if (!(f_l > 0.0)) throw DesignError("cutoff frequency must be positive");
    if (!(stability > 1.0) || !(stability < 1.0 + h_fe_max)) throw DesignError("stability factor out of range");
}

inline void check_optional_positive(const std::optional<double>& v, const char* what) {
    if (v && !(*v > 0.0)) throw DesignError(std::string(what) + " must be positive");
}

inline void add_supply(ComponentSet& set, double raw, double rail) {
    set.parts.push_back({"VCC", PartKind::Supply, raw, raw, rail, Direction::Higher, true});
}

/// R_C from A = h_fe*R_L'/(h_ie + h*R_C) with R_L' = R_C || R_L.
inline double solve_collector_resistor(double a, const BjtParams& p, std::optional<double> r_l) {
    const double h = h_composite(p);
    const double hfe = p.h_fe_typ;
    const double hie = p.h_ie;
    if (!r_l) {
        const double den = hfe - a * h;
        if (!(den > 0.0)) throw DesignError("gain exceeds device capability");
        return a * hie / den;
    }
    const double rl = *r_l;
    // a*h*R^2 + (a*hie + a*h*RL - hfe*RL)*R + a*hie*RL = 0
    const double qa = a * h;
    const double qb = a * hie + a * h * rl - hfe * rl;
    const double qc = a * hie * rl;
    double root = -1.0;
    if (std::abs(qa) < 1e-300) {
        if (qb < 0.0) root = -qc / qb;
    } else {
        const double disc = qb * qb - 4.0 * qa * qc;
        if (disc >= 0.0) {
            const double q = -0.5 * (qb + std::copysign(std::sqrt(disc), qb));
            const double r1 = q / qa;
            const double r2 = qc / q;
            for (double r : {r1, r2})
                if (r > 0.0 && std::isfinite(r) && (root < 0.0 || r < root)) root = r;
        }
    }
    if (!(root > 0.0)) throw DesignError("gain exceeds device capability");
    for (int i = 0; i < 2; ++i) {
        const double f = (qa * root + qb) * root + qc;
        const double df = 2.0 * qa * root + qb;
        if (df != 0.0) root -= f / df;
    }
    return root;
}

}  // namespace detail

/// Gain of a topology in its design convention: BJT stages report the
/// magnitude, op-amp gains are signed. `v` maps component labels to values.
inline double gain_formula(Topology t, OpAmpVariant variant, const std::map<std::string, double>& v,
                           const BjtParams& p) {
    auto get = [&](const std::string& k) {
        auto it = v.find(k);
        if (it == v.end()) throw DesignError("gain formula needs " + k);
        return it->second;
    };
    auto opt = [&](const std::string& k) -> std::optional<double> {
        auto it = v.find(k);
        if (it == v.end()) return std::nullopt;
        return it->second;
    };
    switch (t) {
    case Topology::SingleStage: {
        const double rc = get("RC");
        const auto rl = opt("RL");
        const double rlp = rl ? parallel(rc, *rl) : rc;
        return p.h_fe_typ * rlp / (p.h_ie + h_composite(p) * rc);
    }
    case Topology::TwoStage: {
        const double rb2 = parallel(get("R3"), get("R4"));
        const double rl1 = 1.0 / (1.0 / get("RC1") + 1.0 / rb2 + 1.0 / p.h_ie);
        const auto rl = opt("RL");
        const double rl2 = rl ? parallel(get("RC2"), *rl) : get("RC2");
        return (p.h_fe_typ * rl1 / p.h_ie) * (p.h_fe_typ * rl2 / p.h_ie);
    }
    case Topology::OpAmp:
        switch (variant) {
        case OpAmpVariant::Follower: return 1.0;
        case OpAmpVariant::NonInverting: return 1.0 + get("R2") / get("R1");
        case OpAmpVariant::Inverting: return -get("R2") / get("R1");
        case OpAmpVariant::TNetwork: {
            const double r2 = get("R2");
            const double r4 = get("R4");
            return -(r2 / get("R1")) * (1.0 + r4 / r2 + r4 / get("R3"));
        }
        case OpAmpVariant::None: break;
        }
        throw DesignError("op-amp variant not set");
    case Topology::Diff: return get("R2") / get("R1");
    case Topology::Power: {
        const double n = get("NRATIO");
        return p.h_fe_typ * n * get("RL") / (p.h_ie + (1.0 + p.h_fe_typ) * get("RE"));
    }
    }
    return 0.0;
}

inline ComponentSet design_single_stage(const SingleStageSpec& spec, const BjtParams& p,
                                        const DesignOptions& opt = {}) {
    using namespace detail;
    if (!(spec.gain.value > 0.0)) throw DesignError("gain must be positive");
    check_common(spec.f_l, spec.stability, p.h_fe_max);
    check_optional_positive(spec.v0_peak, "output peak");
    check_optional_positive(spec.v_cc, "V_CC");
    check_optional_positive(spec.r_l, "R_L");
    if (spec.r_s && *spec.r_s < 0.0) throw DesignError("R_S must not be negative");

    Builder b(opt);
    ComponentSet set;
    set.topology = Topology::SingleStage;
    set.target = spec.gain;
    const double v0 = spec.v0_peak.value_or(kDefaultOutputPeak);
    set.output_peak = v0;

    const double rc = solve_collector_resistor(spec.gain.value, p, spec.r_l);
    const double rlp = spec.r_l ? parallel(rc, *spec.r_l) : rc;

    BiasRecord bias;
    double v_re = 0.0;
    if (spec.v_cc) {
        bias.v_ceq = *spec.v_cc / 2.0;
        v_re = 0.10 * *spec.v_cc;
    } else {
        bias.v_ceq = 1.5 * (v0 + p.v_ce_sat);
        v_re = 1.0;
    }
    bias.i_cq = v0 / rlp + p.i_c_min;
    bias.v_re = v_re;
    const double re = v_re / bias.i_cq;
    if (spec.v_cc) {
        bias.v_cc = bias.v_cc_rail = *spec.v_cc;
    } else {
        bias.v_cc = bias.v_ceq + bias.i_cq * (rc + re);
        const auto rail = quantize_supply(bias.v_cc);
        bias.v_cc_rail = rail.volts;
        if (rail.non_standard) set.notes.push_back("derived supply above 18 V kept as a non-standard rail");
    }

    const auto div = solve_bias_divider(spec.stability, p.h_fe_max, re, bias.v_cc, v_re, p.v_be_on);
    bias.r_b = div.r_b;

    b.resistor(set, "RC", rc, rc, direction_for(spec.gain.qualifier));
    b.resistor(set, "RE", re, re, Direction::Lower);
    const double re_q = set.quantized("RE");
    const auto div_nom = solve_bias_divider(spec.stability, p.h_fe_max, re_q, bias.v_cc_rail, v_re, p.v_be_on);
    set.parts.push_back({"R1", PartKind::Resistor, div.r_1, div_nom.r_1,
                         quantize(div_nom.r_1, Direction::Higher, b.resistors()), Direction::Higher, true});
    set.parts.push_back({"R2", PartKind::Resistor, div.r_2, div_nom.r_2,
                         quantize(div_nom.r_2, Direction::Lower, b.resistors()), Direction::Lower, true});
    if (spec.r_s && *spec.r_s > 0.0) Builder::given(set, "RS", PartKind::Resistor, *spec.r_s);
    if (spec.r_l) Builder::given(set, "RL", PartKind::Resistor, *spec.r_l);

    const double rb_hie = parallel(div.r_b, p.h_ie);
    b.capacitor(set, "CB", capacitor_for(spec.r_s.value_or(0.0) + rb_hie, spec.f_l));
    b.capacitor(set, "CE", capacitor_for(re / 10.0, spec.f_l));
    b.capacitor(set, "CC", capacitor_for(rc + spec.r_l.value_or(rb_hie), spec.f_l));
    add_supply(set, bias.v_cc, bias.v_cc_rail);

    bias.stability_achieved =
        stability_of(p.h_fe_max, parallel(set.quantized("R1"), set.quantized("R2")), re_q);
    set.bias.push_back(bias);
    return set;
}

inline ComponentSet design_two_stage(const TwoStageSpec& spec, const BjtParams& p, const DesignOptions& opt = {}) {
    using namespace detail;
    if (!(spec.gain.value > 1.0)) throw DesignError("two-stage gain must exceed 1");
    check_common(spec.f_l, spec.stability, p.h_fe_max);
    check_optional_positive(spec.v0_peak, "output peak");
    check_optional_positive(spec.v_cc, "V_CC");
    check_optional_positive(spec.r_l, "R_L");
    if (!(spec.v_re2_fraction > 0.0) || !(spec.v_re2_fraction < 1.0))
        throw DesignError("emitter drop fraction must lie in (0, 1)");

    Builder b(opt);
    ComponentSet set;
    set.topology = Topology::TwoStage;
    set.target = spec.gain;
    set.output_peak = spec.v0_peak.value_or(kDefaultOutputPeak);
    const Direction gain_dir = direction_for(spec.gain.qualifier);

    // Equal split; each stage gain is proportional to its collector load.
    const double a_stage = std::sqrt(spec.gain.value);
    const double hfe = p.h_fe_typ;

    // Stage 2.
    const double rl2p = a_stage * p.h_ie / hfe;
    double rc2 = rl2p;
    if (spec.r_l) {
        const double den = 1.0 / rl2p - 1.0 / *spec.r_l;
        if (!(den > 0.0)) throw DesignError(with_stage(2, "gain exceeds device capability"));
        rc2 = 1.0 / den;
    }

    BiasRecord s2;
    s2.stage = 2;
    double v_rc = 0.0;
    if (spec.v_cc) {
        s2.v_ceq = spec.v0_peak ? 1.5 * (*spec.v0_peak + p.v_ce_sat) : *spec.v_cc / 2.0;
        s2.v_re = spec.v_re2_fraction * *spec.v_cc;
        v_rc = *spec.v_cc - s2.v_ceq - s2.v_re;
        if (!(v_rc > 0.0)) throw DesignError(with_stage(2, "supply too low for requested swing"));
        s2.i_cq = v_rc / rc2;
        s2.v_cc = s2.v_cc_rail = *spec.v_cc;
    } else {
        const double v0 = spec.v0_peak.value_or(kDefaultOutputPeak);
        s2.v_ceq = 1.5 * (v0 + p.v_ce_sat);
        s2.i_cq = v0 / rl2p + p.i_c_min;
        s2.v_re = 2.0;
        v_rc = s2.i_cq * rc2;
        s2.v_cc = s2.v_ceq + v_rc + s2.v_re;
        const auto rail = quantize_supply(s2.v_cc);
        s2.v_cc_rail = rail.volts;
        if (rail.non_standard) set.notes.push_back("derived supply above 18 V kept as a non-standard rail");
    }
    const double re2 = s2.v_re / s2.i_cq;

    auto divider = [&](int stage, double re, double vcc, double vre) {
        try {
            return solve_bias_divider(spec.stability, p.h_fe_max, re, vcc, vre, p.v_be_on);
        } catch (const DesignError& e) {
            throw DesignError(with_stage(stage, e.what()));
        }
    };

    const auto div2 = divider(2, re2, s2.v_cc, s2.v_re);
    s2.r_b = div2.r_b;
    b.resistor(set, "RC2", rc2, rc2, gain_dir);
    b.resistor(set, "RE2", re2, re2, Direction::Lower);
    const auto div2_nom = divider(2, set.quantized("RE2"), s2.v_cc_rail, s2.v_re);
    set.parts.push_back({"R3", PartKind::Resistor, div2.r_1, div2_nom.r_1,
                         quantize(div2_nom.r_1, Direction::Higher, b.resistors()), Direction::Higher, true});
    set.parts.push_back({"R4", PartKind::Resistor, div2.r_2, div2_nom.r_2,
                         quantize(div2_nom.r_2, Direction::Lower, b.resistors()), Direction::Lower, true});
    const double rb2_q = parallel(set.quantized("R3"), set.quantized("R4"));

    // Stage 1 drives R_b2 || h_ie of stage 2.
    const double rl1p = a_stage * p.h_ie / hfe;
    auto unwrap_rc1 = [&](double rb2) {
        const double g = 1.0 / rl1p - 1.0 / rb2 - 1.0 / p.h_ie;
        if (!(g > 0.0)) throw DesignError(with_stage(1, "gain exceeds device capability"));
        return 1.0 / g;
    };
    const double rc1 = unwrap_rc1(div2.r_b);
    b.resistor(set, "RC1", rc1, unwrap_rc1(rb2_q), gain_dir);

    BiasRecord s1;
    s1.stage = 1;
    s1.v_ceq = s2.v_ceq;
    s1.v_re = s2.v_re;
    s1.i_cq = v_rc / rc1;
    s1.v_cc = s2.v_cc;
    s1.v_cc_rail = s2.v_cc_rail;
    const double re1 = s1.v_re / s1.i_cq;
    const auto div1 = divider(1, re1, s1.v_cc, s1.v_re);
    s1.r_b = div1.r_b;
    b.resistor(set, "RE1", re1, re1, Direction::Lower);
    const auto div1_nom = divider(1, set.quantized("RE1"), s1.v_cc_rail, s1.v_re);
    set.parts.push_back({"R1", PartKind::Resistor, div1.r_1, div1_nom.r_1,
                         quantize(div1_nom.r_1, Direction::Higher, b.resistors()), Direction::Higher, true});
    set.parts.push_back({"R2", PartKind::Resistor, div1.r_2, div1_nom.r_2,
                         quantize(div1_nom.r_2, Direction::Lower, b.resistors()), Direction::Lower, true});
    if (spec.r_s && *spec.r_s > 0.0) Builder::given(set, "RS", PartKind::Resistor, *spec.r_s);
    if (spec.r_l) Builder::given(set, "RL", PartKind::Resistor, *spec.r_l);

    const double rb1_hie = parallel(div1.r_b, p.h_ie);
    b.capacitor(set, "CB1", capacitor_for(rb1_hie, spec.f_l));
    b.capacitor(set, "CE1", capacitor_for(re1 / 10.0, spec.f_l));
    b.capacitor(set, "CB2", capacitor_for(rc1 + parallel(div2.r_b, p.h_ie), spec.f_l));
    b.capacitor(set, "CE2", capacitor_for(re2 / 10.0, spec.f_l));
    b.capacitor(set, "C0", capacitor_for(rc2 + spec.r_l.value_or(rb1_hie), spec.f_l));
    add_supply(set, s2.v_cc, s2.v_cc_rail);

    s1.stability_achieved =
        stability_of(p.h_fe_max, parallel(set.quantized("R1"), set.quantized("R2")), set.quantized("RE1"));
    s2.stability_achieved = stability_of(p.h_fe_max, rb2_q, set.quantized("RE2"));
    set.bias.push_back(s1);
    set.bias.push_back(s2);
    return set;
}

inline ComponentSet design_opamp(const OpAmpSpec& spec, const DesignOptions& opt = {}) {
    using namespace detail;
    const double a = spec.gain.value;
    if (!std::isfinite(a) || a == 0.0) throw DesignError("gain must be non-zero");
    if (!(spec.r_base > 0.0)) throw DesignError("base resistance must be positive");
    if (std::abs(a) < 1.0) throw DesignError("attenuator not supported");

    Builder b(opt);
    ComponentSet set;
    set.topology = Topology::OpAmp;
    set.target = spec.gain;
    set.output_peak = 0.01 * std::abs(a);
    const double r = spec.r_base;

    if (a == 1.0) {
        set.variant = OpAmpVariant::Follower;
        set.notes.push_back("unity gain: voltage follower, no resistors");
    } else if (a > 0.0) {
        set.variant = OpAmpVariant::NonInverting;
        const double r1 = r / 10.0;
        b.resistor(set, "R1", r1, r1, Direction::Nearest);
        const double r2 = (a - 1.0) * r1;
        b.resistor(set, "R2", r2, r2, Direction::Nearest);
    } else if (-a > 2.0) {
        set.variant = OpAmpVariant::TNetwork;
        b.resistor(set, "R1", r, r, Direction::Nearest);
        b.resistor(set, "R2", r, r, Direction::Nearest);
        const double r3 = r / (-a - 2.0);
        b.resistor(set, "R3", r3, r3, Direction::Nearest);
        b.resistor(set, "R4", r, r, Direction::Nearest);
    } else {
        set.variant = OpAmpVariant::Inverting;
        set.notes.push_back("|gain| <= 2: plain inverting pair, no T-network");
        b.resistor(set, "R1", r, r, Direction::Nearest);
        b.resistor(set, "R2", -a * r, -a * r, Direction::Nearest);
    }
    return set;
}

inline ComponentSet design_diff_amp(const DiffAmpSpec& spec, const DesignOptions& opt = {}) {
    using namespace detail;
    if (!(spec.a_d > 0.0) || !std::isfinite(spec.a_d)) throw DesignError("differential gain must be positive");
    if (!(spec.r_base > 0.0)) throw DesignError("base resistance must be positive");
    Builder b(opt);
    ComponentSet set;
    set.topology = Topology::Diff;
    set.target = GainTarget{spec.a_d, Qualifier::Exact};
    set.output_peak = 0.01 * spec.a_d;
    const double r2 = spec.a_d * spec.r_base;
    // Matched pairs share one raw value, so they quantize identically.
    b.resistor(set, "R1", spec.r_base, spec.r_base, Direction::Nearest);
    b.resistor(set, "R2", r2, r2, Direction::Nearest);
    b.resistor(set, "R3", spec.r_base, spec.r_base, Direction::Nearest);
    b.resistor(set, "R4", r2, r2, Direction::Nearest);
    return set;
}

inline ComponentSet design_power_amp(const PowerAmpSpec& spec, const BjtParams& p, const DesignOptions& opt = {}) {
    using namespace detail;
    if (!(spec.p_load > 0.0) || !(spec.v_cc > 0.0) || !(spec.r_l > 0.0))
        throw DesignError("power, V_CC and R_L must be positive");
    check_common(spec.f_l, spec.stability, p.h_fe_max);

    Builder b(opt);
    ComponentSet set;
    set.topology = Topology::Power;
    set.output_peak = std::sqrt(2.0 * spec.p_load * spec.r_l);

    BiasRecord bias;
    PowerBias pw;
    bias.v_re = spec.v_cc / 10.0;
    bias.v_ceq = spec.v_cc - bias.v_re;
    pw.v_ce_peak = bias.v_ceq - p.v_ce_sat;
    if (!(pw.v_ce_peak > 0.0)) throw DesignError("supply too low for requested swing");
    pw.i_c_peak = 2.0 * spec.p_load / pw.v_ce_peak;
    bias.i_cq = pw.i_c_peak + p.i_c_min;
    const double re = bias.v_re / bias.i_cq;
    require_bounded("RE", re);
    pw.p_re = bias.v_re * bias.v_re / re;
    pw.r_l_prime = pw.v_ce_peak / pw.i_c_peak;
    bias.v_cc = bias.v_cc_rail = spec.v_cc;

    const auto div = solve_bias_divider(spec.stability, p.h_fe_max, re, spec.v_cc, bias.i_cq * re, p.v_be_on);
    bias.r_b = div.r_b;
    b.resistor(set, "RE", re, re, Direction::Lower);
    const double re_q = set.quantized("RE");
    const auto div_nom = solve_bias_divider(spec.stability, p.h_fe_max, re_q, spec.v_cc, bias.i_cq * re_q, p.v_be_on);
    set.parts.push_back({"R1", PartKind::Resistor, div.r_1, div_nom.r_1,
                         quantize(div_nom.r_1, Direction::Higher, b.resistors()), Direction::Higher, true});
    set.parts.push_back({"R2", PartKind::Resistor, div.r_2, div_nom.r_2,
                         quantize(div_nom.r_2, Direction::Lower, b.resistors()), Direction::Lower, true});
    Builder::given(set, "RL", PartKind::Resistor, spec.r_l);

    b.capacitor(set, "CB", capacitor_for(parallel(div.r_b, p.h_ie), spec.f_l));
    // Emitter bypass value is reported; the emitter stays unbypassed.
    b.capacitor(set, "CE", capacitor_for(spec.r_l, spec.f_l), false);
    Builder::given(set, "NRATIO", PartKind::Ratio, std::sqrt(pw.r_l_prime / spec.r_l));
    Builder::given(set, "VCC", PartKind::Supply, spec.v_cc);
    set.notes.push_back("emitter resistor left unbypassed; CE reported only");

    bias.stability_achieved = stability_of(p.h_fe_max, parallel(set.quantized("R1"), set.quantized("R2")), re_q);
    bias.power = pw;
    set.bias.push_back(bias);
    return set;
}

}  // namespace ampforge

#endif  // AMPFORGE_DESIGN_HPP
