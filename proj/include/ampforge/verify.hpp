#ifndef AMPFORGE_VERIFY_HPP
#define AMPFORGE_VERIFY_HPP

// Small-signal modified nodal analysis, the simplified DC bias check and
// design verification reports.

#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ampforge/design.hpp"
#include "ampforge/devices.hpp"
#include "ampforge/netlist.hpp"

namespace ampforge {

using cplx = std::complex<double>;

class ModelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SolveError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class BranchKind { Conductance, Capacitance, Inductance, Vccs, Vcvs, VoltageSource, CurrentSource };

/// Node 0 is ground. For two-terminal branches only `a`/`b` are used; the
/// controlled sources read their control voltage across `c`/`d`.
struct Branch {
    BranchKind kind = BranchKind::Conductance;
    int a = 0;
    int b = 0;
    int c = 0;
    int d = 0;
    double value = 0.0;
    std::string label;
};

struct SmallSignalCircuit {
    std::vector<std::string> node_names{"0"};
    std::vector<Branch> branches;
    int input_pos = 0;
    int input_neg = 0;
    int output = 0;

    int node(const std::string& name) {
        if (name == "0") return 0;
        for (std::size_t i = 1; i < node_names.size(); ++i)
            if (node_names[i] == name) return static_cast<int>(i);
        node_names.push_back(name);
        return static_cast<int>(node_names.size() - 1);
    }
    std::optional<int> find(const std::string& name) const {
        for (std::size_t i = 0; i < node_names.size(); ++i)
            if (node_names[i] == name) return static_cast<int>(i);
        return std::nullopt;
    }
    void add(BranchKind k, int a, int b, double v, std::string label = {}, int c = 0, int d = 0) {
        branches.push_back({k, a, b, c, d, v, std::move(label)});
    }
};

struct AcResult {
    double frequency = 0.0;
    cplx gain;
    double magnitude = 0.0;
    double phase_deg = 0.0;
};

enum class BiasState { Active, CutOff, Saturation };

inline const char* to_string(BiasState s) {
    switch (s) {
    case BiasState::Active: return "active";
    case BiasState::CutOff: return "transistor cut off";
    case BiasState::Saturation: return "saturation";
    }
    return "?";
}

struct DcOperatingPoint {
    std::string device;
    double v_b = 0.0;
    double v_e = 0.0;
    double v_ce = 0.0;
    double i_c = 0.0;
    BiasState state = BiasState::Active;
};

/// Replaces devices by their linear small-signal equivalents. DC sources
/// become shorts, the BJT becomes h_ie / gm = h_fe/h_ie / h_oe (h_re is not
/// stamped), op-amp instances are flattened to their VCVS.
inline SmallSignalCircuit small_signal_of(const Circuit& c, const BjtParams& p, const OpAmpModel& = {}) {
    SmallSignalCircuit s;
    auto stamp = [&](const Element& e, auto&& node) {
        switch (e.kind) {
        case ElementKind::Resistor:
            if (!(e.value > 0.0)) throw ModelError(e.label + ": resistance must be positive");
            s.add(BranchKind::Conductance, node(e.nodes[0]), node(e.nodes[1]), 1.0 / e.value, e.label);
            break;
        case ElementKind::Capacitor:
            s.add(BranchKind::Capacitance, node(e.nodes[0]), node(e.nodes[1]), e.value, e.label);
            break;
        case ElementKind::Inductor:
            if (!(e.value > 0.0)) throw ModelError(e.label + ": inductance must be positive");
            s.add(BranchKind::Inductance, node(e.nodes[0]), node(e.nodes[1]), e.value, e.label);
            break;
        case ElementKind::VSource: {
            double v = 0.0;
            if (e.source.kind == SourceKind::Sine) v = e.source.amplitude;
            if (e.source.kind == SourceKind::Ac) v = e.source.ac_magnitude;
            s.add(BranchKind::VoltageSource, node(e.nodes[0]), node(e.nodes[1]), v, e.label);
            break;
        }
        case ElementKind::Bjt: {
            const int col = node(e.nodes[0]);
            const int base = node(e.nodes[1]);
            const int emit = node(e.nodes[2]);
            s.add(BranchKind::Conductance, base, emit, 1.0 / p.h_ie, e.label + ".hie");
            s.add(BranchKind::Vccs, col, emit, p.h_fe_typ / p.h_ie, e.label + ".gm", base, emit);
            s.add(BranchKind::Conductance, col, emit, p.h_oe, e.label + ".hoe");
            break;
        }
        case ElementKind::Vcvs:
        case ElementKind::Vccs:
            s.add(e.kind == ElementKind::Vcvs ? BranchKind::Vcvs : BranchKind::Vccs, node(e.nodes[0]),
                  node(e.nodes[1]), e.value, e.label, node(e.nodes[2]), node(e.nodes[3]));
            break;
        case ElementKind::Subckt: break;
        }
    };
    auto top = [&](const std::string& n) { return s.node(n); };
    for (const auto& e : c.elements) {
        if (e.kind != ElementKind::Subckt) {
            stamp(e, top);
            continue;
        }
        const auto* def = c.subckt(e.reference);
        if (!def) throw ModelError(e.label + ": unknown subcircuit " + e.reference);
        if (def->pins.size() != e.nodes.size()) throw ModelError(e.label + ": terminal count mismatch");
        auto inner = [&](const std::string& n) {
            if (n == "0") return 0;
            for (std::size_t i = 0; i < def->pins.size(); ++i)
                if (def->pins[i] == n) return s.node(e.nodes[i]);
            return s.node(e.label + "." + n);
        };
        for (const auto& be : def->body) {
            if (be.kind == ElementKind::Subckt || be.kind == ElementKind::Bjt)
                throw ModelError(e.label + ": unsupported element inside subcircuit");
            Element copy = be;
            copy.label = e.label + "." + be.label;
            stamp(copy, inner);
        }
    }

    if (auto in2 = s.find("in2"), in1 = s.find("in1"); in2 && in1) {
        s.input_pos = *in2;
        s.input_neg = *in1;
    } else if (auto in = s.find("in")) {
        s.input_pos = *in;
    } else {
        for (const auto& b : s.branches)
            if (b.kind == BranchKind::VoltageSource && b.value != 0.0) {
                s.input_pos = b.a;
                s.input_neg = b.b;
                break;
            }
    }
    if (s.input_pos == s.input_neg) throw ModelError("no input node");
    const auto out = s.find("out");
    if (!out) throw ModelError("no output node 'out'");
    s.output = *out;
    return s;
}

namespace detail {

/// Dense LU with partial pivoting; solves in place.
inline std::vector<cplx> lu_solve(std::vector<std::vector<cplx>> a, std::vector<cplx> b) {
    const std::size_t n = a.size();
    double scale = 0.0;
    for (const auto& row : a)
        for (const auto& v : row) scale = std::max(scale, std::abs(v));
    if (scale == 0.0) throw SolveError("floating node or degenerate circuit");
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        double best = std::abs(a[k][k]);
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(a[i][k]) > best) {
                best = std::abs(a[i][k]);
                piv = i;
            }
        if (best <= scale * 1e-15) throw SolveError("floating node or degenerate circuit");
        if (piv != k) {
            std::swap(a[k], a[piv]);
            std::swap(b[k], b[piv]);
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            const cplx f = a[i][k] / a[k][k];
            if (f == cplx{}) continue;
            for (std::size_t j = k; j < n; ++j) a[i][j] -= f * a[k][j];
            b[i] -= f * b[k];
        }
    }
    std::vector<cplx> x(n);
    for (std::size_t i = n; i-- > 0;) {
        cplx sum = b[i];
        for (std::size_t j = i + 1; j < n; ++j) sum -= a[i][j] * x[j];
        x[i] = sum / a[i][i];
    }
    return x;
}

}  // namespace detail

struct NodeSolution {
    std::vector<cplx> voltages;  // indexed by node, ground included
    double residual = 0.0;       // ||Ax - b|| / (||A|| ||x|| + ||b||)
};

/// Node voltages of `ssc` at frequency `f`.
inline NodeSolution solve_nodes(const SmallSignalCircuit& ssc, double f) {
    if (!(f > 0.0)) throw SolveError("frequency must be positive");
    const std::size_t nv = ssc.node_names.size() - 1;
    std::size_t extra = 0;
    for (const auto& b : ssc.branches)
        if (b.kind == BranchKind::VoltageSource || b.kind == BranchKind::Vcvs) ++extra;
    const std::size_t n = nv + extra;
    std::vector<std::vector<cplx>> a(n, std::vector<cplx>(n));
    std::vector<cplx> rhs(n);
    const double w = 2.0 * std::numbers::pi * f;

    auto at = [&](int row, int col) -> cplx* {
        if (row == 0 || col == 0) return nullptr;
        return &a[static_cast<std::size_t>(row - 1)][static_cast<std::size_t>(col - 1)];
    };
    auto add = [&](int row, int col, cplx v) {
        if (auto* p = at(row, col)) *p += v;
    };
    auto admittance = [&](int x, int y, cplx v) {
        add(x, x, v);
        add(y, y, v);
        add(x, y, -v);
        add(y, x, -v);
    };
    std::size_t k = nv;
    for (const auto& b : ssc.branches) {
        switch (b.kind) {
        case BranchKind::Conductance: admittance(b.a, b.b, b.value); break;
        case BranchKind::Capacitance: admittance(b.a, b.b, cplx(0.0, w * b.value)); break;
        case BranchKind::Inductance: admittance(b.a, b.b, 1.0 / cplx(0.0, w * b.value)); break;
        case BranchKind::Vccs:
            add(b.a, b.c, b.value);
            add(b.a, b.d, -b.value);
            add(b.b, b.c, -b.value);
            add(b.b, b.d, b.value);
            break;
        case BranchKind::CurrentSource:
            if (b.a) rhs[static_cast<std::size_t>(b.a - 1)] -= b.value;
            if (b.b) rhs[static_cast<std::size_t>(b.b - 1)] += b.value;
            break;
        case BranchKind::VoltageSource:
        case BranchKind::Vcvs: {
            const auto kk = static_cast<std::size_t>(k);
            auto put = [&](int node, std::size_t row_col, cplx v) {
                if (node == 0) return;
                const auto i = static_cast<std::size_t>(node - 1);
                a[i][row_col] += v;
            };
            put(b.a, kk, 1.0);
            put(b.b, kk, -1.0);
            if (b.a) a[kk][static_cast<std::size_t>(b.a - 1)] += 1.0;
            if (b.b) a[kk][static_cast<std::size_t>(b.b - 1)] -= 1.0;
            if (b.kind == BranchKind::Vcvs) {
                if (b.c) a[kk][static_cast<std::size_t>(b.c - 1)] -= b.value;
                if (b.d) a[kk][static_cast<std::size_t>(b.d - 1)] += b.value;
            } else {
                rhs[kk] = b.value;
            }
            ++k;
            break;
        }
        }
    }

    auto residual = [&](const std::vector<cplx>& x) {
        std::vector<cplx> r(n);
        for (std::size_t i = 0; i < n; ++i) {
            r[i] = -rhs[i];
            for (std::size_t j = 0; j < n; ++j) r[i] += a[i][j] * x[j];
        }
        return r;
    };
    auto norm2 = [](const std::vector<cplx>& v) {
        double s = 0.0;
        for (const auto& e : v) s += std::norm(e);
        return std::sqrt(s);
    };
    auto x = detail::lu_solve(a, rhs);
    // One refinement step recovers accuracy lost to the large open-loop gain stamps.
    auto r = residual(x);
    const auto dx = detail::lu_solve(a, r);
    for (std::size_t i = 0; i < n; ++i) x[i] -= dx[i];
    r = residual(x);
    double anorm = 0.0;  // Frobenius
    for (const auto& row : a)
        for (const auto& v : row) anorm += std::norm(v);
    anorm = std::sqrt(anorm);
    NodeSolution sol;
    const double denom = anorm * norm2(x) + norm2(rhs);
    sol.residual = denom > 0.0 ? norm2(r) / denom : norm2(r);
    if (!(sol.residual <= 1e-9)) throw SolveError("linear solve residual too large");
    sol.voltages.assign(nv + 1, cplx{});
    for (std::size_t i = 0; i < nv; ++i) sol.voltages[i + 1] = x[i];
    return sol;
}

/// V(output) / (V(input_pos) - V(input_neg)) at `f`.
inline AcResult solve_ac(const SmallSignalCircuit& ssc, double f) {
    const auto sol = solve_nodes(ssc, f);
    const cplx vin = sol.voltages[static_cast<std::size_t>(ssc.input_pos)] -
                     sol.voltages[static_cast<std::size_t>(ssc.input_neg)];
    if (std::abs(vin) == 0.0) throw SolveError("input voltage is zero");
    AcResult r;
    r.frequency = f;
    r.gain = sol.voltages[static_cast<std::size_t>(ssc.output)] / vin;
    r.magnitude = std::abs(r.gain);
    r.phase_deg = std::arg(r.gain) * 180.0 / std::numbers::pi;
    return r;
}

/// Log-spaced frequencies, endpoints included.
inline std::vector<double> log_frequencies(double f_start, double f_stop, int points) {
    if (!(f_start > 0.0) || !(f_stop > f_start) || points < 2) throw SolveError("bad sweep range");
    const double l0 = std::log10(f_start);
    const double l1 = std::log10(f_stop);
    std::vector<double> out(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) out[static_cast<std::size_t>(i)] = std::pow(10.0, l0 + (l1 - l0) * i / (points - 1));
    out.front() = f_start;
    out.back() = f_stop;
    return out;
}

inline std::vector<AcResult> sweep(const SmallSignalCircuit& ssc, double f_start, double f_stop, int points) {
    std::vector<AcResult> out;
    for (double f : log_frequencies(f_start, f_stop, points)) out.push_back(solve_ac(ssc, f));
    return out;
}

inline void write_csv(std::ostream& os, const std::vector<AcResult>& rows) {
    os << "frequency_hz,magnitude,phase_deg\n";
    char buf[96];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", r.frequency, r.magnitude, r.phase_deg);
        os << buf;
    }
}

/// Bias check ignoring base current, one entry per BJT. The divider and
/// the emitter/collector resistors are found from the circuit structure.
inline std::vector<DcOperatingPoint> solve_dc(const Circuit& c, const BjtParams& p) {
    std::map<std::string, double> supply;
    for (const auto& e : c.elements)
        if (e.kind == ElementKind::VSource && e.source.kind == SourceKind::Dc && e.nodes[1] == "0")
            supply[e.nodes[0]] = e.source.dc;

    auto resistor_between = [&](const std::string& n, auto&& pred) -> const Element* {
        for (const auto& e : c.elements) {
            if (e.kind != ElementKind::Resistor) continue;
            if (e.nodes[0] == n && pred(e.nodes[1])) return &e;
            if (e.nodes[1] == n && pred(e.nodes[0])) return &e;
        }
        return nullptr;
    };
    auto inductor_between = [&](const std::string& x, const std::string& y) {
        for (const auto& e : c.elements)
            if (e.kind == ElementKind::Inductor &&
                ((e.nodes[0] == x && e.nodes[1] == y) || (e.nodes[0] == y && e.nodes[1] == x)))
                return true;
        return false;
    };

    std::vector<DcOperatingPoint> out;
    for (const auto& e : c.elements) {
        if (e.kind != ElementKind::Bjt) continue;
        const auto& col = e.nodes[0];
        const auto& base = e.nodes[1];
        const auto& emit = e.nodes[2];
        std::string rail;
        const Element* upper = resistor_between(base, [&](const std::string& n) {
            if (supply.count(n) && supply.at(n) > 0.0) {
                rail = n;
                return true;
            }
            return false;
        });
        const Element* lower = resistor_between(base, [](const std::string& n) { return n == "0"; });
        const Element* re = resistor_between(emit, [](const std::string& n) { return n == "0"; });
        if (!upper || !lower) throw ModelError(e.label + ": base divider not found");
        if (!re) throw ModelError(e.label + ": emitter resistor not found");
        double rc = 0.0;
        if (const Element* r = resistor_between(col, [&](const std::string& n) { return n == rail; }))
            rc = r->value;
        else if (!inductor_between(col, rail))
            throw ModelError(e.label + ": collector load not found");

        const double vcc = supply.at(rail);
        DcOperatingPoint op;
        op.device = e.label;
        op.v_b = vcc * lower->value / (upper->value + lower->value);
        op.v_e = op.v_b - p.v_be_on;
        if (op.v_e <= 0.0) {
            op.v_e = 0.0;
            op.i_c = 0.0;
            op.v_ce = vcc;
            op.state = BiasState::CutOff;
        } else {
            op.i_c = op.v_e / re->value;
            op.v_ce = vcc - op.i_c * (rc + re->value);
            if (op.v_ce <= p.v_ce_sat) op.state = BiasState::Saturation;
        }
        out.push_back(op);
    }
    return out;
}

struct VerificationReport {
    Topology topology = Topology::SingleStage;
    OpAmpVariant variant = OpAmpVariant::None;
    std::optional<double> target_gain;
    double tolerance = 0.15;
    double analytic_gain = 0.0;
    AcResult midband;
    std::optional<double> common_mode_gain;
    std::vector<DcOperatingPoint> dc;
    std::vector<double> stability;
    std::vector<std::string> failures;
    bool pass = true;
};

inline double default_tolerance(Topology t) { return t == Topology::TwoStage ? 0.25 : 0.15; }

inline constexpr double kCommonModeLimit = 1e-5;

namespace detail {

inline std::map<std::string, double> circuit_values(const Circuit& c) {
    std::map<std::string, double> v;
    for (const auto& e : c.elements) {
        switch (e.kind) {
        case ElementKind::Resistor:
        case ElementKind::Capacitor:
        case ElementKind::Inductor: v[e.label] = e.value; break;
        case ElementKind::Vcvs:
            if (e.label == "ET" && e.value != 0.0) v["NRATIO"] = 1.0 / e.value;
            break;
        default: break;
        }
    }
    return v;
}

}  // namespace detail

/// Analyses a built or parsed circuit of known topology.
inline VerificationReport verify_circuit(const Circuit& c, Topology topology, OpAmpVariant variant,
                                         const BjtParams& p, const OpAmpModel& m, std::optional<double> target,
                                         std::optional<double> tolerance = std::nullopt) {
    VerificationReport r;
    r.topology = topology;
    r.variant = variant;
    r.target_gain = target;
    r.tolerance = tolerance.value_or(default_tolerance(topology));
    const auto values = detail::circuit_values(c);

    r.analytic_gain = gain_formula(topology, variant, values, p);
    const auto ssc = small_signal_of(c, p, m);
    r.midband = solve_ac(ssc, kMidbandHz);

    if (topology == Topology::Diff) {
        auto cm = ssc;
        for (auto& b : cm.branches)
            if (b.kind == BranchKind::VoltageSource && (b.a == ssc.input_pos || b.a == ssc.input_neg)) b.value = 1.0;
        const auto sol = solve_nodes(cm, kMidbandHz);
        r.common_mode_gain = std::abs(sol.voltages[static_cast<std::size_t>(cm.output)]);
        if (*r.common_mode_gain > kCommonModeLimit) r.failures.push_back("common-mode gain above limit");
    }

    const bool bjt = topology == Topology::SingleStage || topology == Topology::TwoStage || topology == Topology::Power;
    if (bjt) {
        r.dc = solve_dc(c, p);
        for (const auto& op : r.dc)
            if (op.state != BiasState::Active) r.failures.push_back(op.device + ": " + to_string(op.state));
        auto s_of = [&](const char* r1, const char* r2, const char* re) {
            r.stability.push_back(stability_of(p.h_fe_max, parallel(values.at(r1), values.at(r2)), values.at(re)));
        };
        if (topology == Topology::SingleStage) s_of("R1", "R2", "RE");
        if (topology == Topology::TwoStage) {
            s_of("R1", "R2", "RE1");
            s_of("R3", "R4", "RE2");
        }
        if (topology == Topology::Power) s_of("R1", "R2", "RE");
        for (double s : r.stability)
            if (!(s > 1.0 && s < 1.0 + p.h_fe_max)) r.failures.push_back("stability factor out of range");
    }

    const double measured = r.midband.magnitude;
    if (target) {
        const double want = std::abs(*target);
        if (std::abs(measured - want) > r.tolerance * want)
            r.failures.push_back("midband gain outside tolerance of target");
        if (topology == Topology::OpAmp && (r.midband.gain.real() < 0.0) != (*target < 0.0))
            r.failures.push_back("gain polarity does not match target");
    } else {
        const double ref = std::abs(r.analytic_gain);
        if (std::abs(measured - ref) > r.tolerance * ref)
            r.failures.push_back("midband gain disagrees with the analytic gain");
    }
    r.pass = r.failures.empty();
    return r;
}

/// Verifies a designed set through its quantized netlist.
inline VerificationReport check_design(const ComponentSet& cs, const BjtParams& p, const OpAmpModel& m = {},
                                       std::optional<double> tolerance = std::nullopt) {
    const Circuit c = build_circuit(cs, p, m);
    std::optional<double> target;
    if (cs.target) target = cs.target->value;
    auto r = verify_circuit(c, cs.topology, cs.variant, p, m, target, tolerance);
    // Analytic gain from exact quantized values rather than emitted text.
    r.analytic_gain = gain_formula(cs.topology, cs.variant, cs.quantized_values(), p);
    return r;
}

/// Verifies a parsed netlist; the topology comes from its title line.
inline VerificationReport verify_netlist(const Circuit& c, const BjtParams& p, const OpAmpModel& m,
                                         std::optional<double> target,
                                         std::optional<double> tolerance = std::nullopt) {
    const auto topo = topology_from_title(c.title);
    if (!topo) throw ModelError("cannot tell the amplifier topology from title '" + c.title + "'");
    return verify_circuit(c, topo->first, topo->second, p, m, target, tolerance);
}

}  // namespace ampforge

#endif  // AMPFORGE_VERIFY_HPP
