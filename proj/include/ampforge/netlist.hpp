#ifndef AMPFORGE_NETLIST_HPP
#define AMPFORGE_NETLIST_HPP

// Circuit graph, SPICE netlist emission and a parser for the emitted
// dialect.

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ampforge/design.hpp"
#include "ampforge/devices.hpp"
#include "ampforge/values.hpp"

namespace ampforge {

class NetlistError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
public:
    ParseError(int line, const std::string& msg)
        : std::runtime_error("line " + std::to_string(line) + ": " + msg), line_(line) {}
    int line() const noexcept { return line_; }

private:
    int line_;
};

enum class ElementKind { Resistor, Capacitor, Inductor, VSource, Bjt, Subckt, Vcvs, Vccs };
enum class SourceKind { Dc, Sine, Ac };

struct SourceSpec {
    SourceKind kind = SourceKind::Dc;
    double dc = 0.0;
    double offset = 0.0;
    double amplitude = 0.0;
    double frequency = 0.0;
    double ac_magnitude = 0.0;

    bool operator==(const SourceSpec&) const = default;

    static SourceSpec make_dc(double v) { return {SourceKind::Dc, v, 0, 0, 0, 0}; }
    static SourceSpec sine(double offset, double amp, double f) { return {SourceKind::Sine, 0, offset, amp, f, 0}; }
    static SourceSpec ac(double mag) { return {SourceKind::Ac, 0, 0, 0, 0, mag}; }
};

struct Element {
    ElementKind kind = ElementKind::Resistor;
    std::string label;
    std::vector<std::string> nodes;
    double value = 0.0;      // R, C, L value; E gain; G transconductance
    SourceSpec source;       // V only
    std::string reference;   // model (Q) or subcircuit (X) name

    bool operator==(const Element&) const = default;
};

struct ModelCard {
    std::string name;
    std::string type;
    std::vector<std::pair<std::string, double>> params;
    bool operator==(const ModelCard&) const = default;
};

struct SubcktDef {
    std::string name;
    std::vector<std::string> pins;
    std::vector<Element> body;
    bool operator==(const SubcktDef&) const = default;
};

struct TranDirective {
    double step = 0.0;
    double stop = 0.0;
    bool operator==(const TranDirective&) const = default;
};

struct AcDirective {
    std::string sweep = "dec";
    int points = 50;
    double f_start = 1.0;
    double f_stop = 1e6;
    bool operator==(const AcDirective&) const = default;
};

using Directive = std::variant<ModelCard, SubcktDef, TranDirective, AcDirective>;

/// `.end` is implicit: emission always closes with it.
struct Circuit {
    std::string title;
    std::vector<Element> elements;
    std::vector<Directive> directives;

    bool operator==(const Circuit&) const = default;

    std::set<std::string> nodes() const {
        std::set<std::string> out{"0"};
        for (const auto& e : elements) out.insert(e.nodes.begin(), e.nodes.end());
        return out;
    }
    const Element* find(std::string_view label) const {
        for (const auto& e : elements)
            if (e.label == label) return &e;
        return nullptr;
    }
    const SubcktDef* subckt(std::string_view name) const {
        for (const auto& d : directives)
            if (auto s = std::get_if<SubcktDef>(&d); s && s->name == name) return s;
        return nullptr;
    }
};

inline char kind_letter(ElementKind k) {
    switch (k) {
    case ElementKind::Resistor: return 'R';
    case ElementKind::Capacitor: return 'C';
    case ElementKind::Inductor: return 'L';
    case ElementKind::VSource: return 'V';
    case ElementKind::Bjt: return 'Q';
    case ElementKind::Subckt: return 'X';
    case ElementKind::Vcvs: return 'E';
    case ElementKind::Vccs: return 'G';
    }
    return '?';
}

inline std::optional<ElementKind> kind_from_letter(char c) {
    switch (std::toupper(static_cast<unsigned char>(c))) {
    case 'R': return ElementKind::Resistor;
    case 'C': return ElementKind::Capacitor;
    case 'L': return ElementKind::Inductor;
    case 'V': return ElementKind::VSource;
    case 'Q': return ElementKind::Bjt;
    case 'X': return ElementKind::Subckt;
    case 'E': return ElementKind::Vcvs;
    case 'G': return ElementKind::Vccs;
    default: return std::nullopt;
    }
}

/// Terminal count, or 0 when it depends on the referenced subcircuit.
inline std::size_t arity(ElementKind k) {
    switch (k) {
    case ElementKind::Resistor:
    case ElementKind::Capacitor:
    case ElementKind::Inductor:
    case ElementKind::VSource: return 2;
    case ElementKind::Bjt: return 3;
    case ElementKind::Vcvs:
    case ElementKind::Vccs: return 4;
    case ElementKind::Subckt: return 0;
    }
    return 0;
}

/// Throws NetlistError on structural problems.
inline void validate(const Circuit& c) {
    std::set<std::string> labels;
    for (const auto& e : c.elements) {
        if (e.label.empty() || kind_from_letter(e.label.front()) != e.kind)
            throw NetlistError("label '" + e.label + "' does not match its element kind");
        std::string upper = e.label;
        std::transform(upper.begin(), upper.end(), upper.begin(), [](unsigned char ch) { return std::toupper(ch); });
        if (!labels.insert(upper).second) throw NetlistError("duplicate label " + e.label);
        if (const auto n = arity(e.kind); n != 0 && e.nodes.size() != n)
            throw NetlistError(e.label + ": expected " + std::to_string(n) + " terminals");
        if (e.kind == ElementKind::Subckt) {
            const auto* def = c.subckt(e.reference);
            if (!def) throw NetlistError(e.label + ": unknown subcircuit " + e.reference);
            if (def->pins.size() != e.nodes.size()) throw NetlistError(e.label + ": terminal count mismatch");
        }
        for (const auto& n : e.nodes)
            if (n.empty()) throw NetlistError(e.label + ": empty node name");
    }
}

// ---------------------------------------------------------------- emit

namespace detail {

inline int emit_rank(ElementKind k) {
    switch (k) {
    case ElementKind::VSource: return 0;
    case ElementKind::Resistor: return 1;
    case ElementKind::Capacitor: return 2;
    case ElementKind::Inductor: return 3;
    default: return 4;
    }
}

inline std::string card(const Element& e) {
    std::string s = e.label;
    for (const auto& n : e.nodes) s += " " + n;
    switch (e.kind) {
    case ElementKind::VSource:
        switch (e.source.kind) {
        case SourceKind::Dc: s += " DC " + format_magnitude(e.source.dc); break;
        case SourceKind::Sine:
            s += " SINE(" + format_magnitude(e.source.offset) + " " + format_magnitude(e.source.amplitude) + " " +
                 format_magnitude(e.source.frequency) + ")";
            break;
        case SourceKind::Ac: s += " AC " + format_magnitude(e.source.ac_magnitude); break;
        }
        break;
    case ElementKind::Bjt:
    case ElementKind::Subckt: s += " " + e.reference; break;
    default: s += " " + format_magnitude(e.value); break;
    }
    return s;
}

inline void emit_elements(std::ostringstream& out, const std::vector<Element>& elements) {
    std::vector<const Element*> order;
    for (const auto& e : elements) order.push_back(&e);
    std::stable_sort(order.begin(), order.end(),
                     [](const Element* a, const Element* b) { return emit_rank(a->kind) < emit_rank(b->kind); });
    for (const auto* e : order) out << card(*e) << '\n';
}

}  // namespace detail

inline std::string emit(const Circuit& c) {
    std::ostringstream out;
    out << "* " << c.title << '\n';
    detail::emit_elements(out, c.elements);
    for (const auto& d : c.directives) {
        if (const auto* m = std::get_if<ModelCard>(&d)) {
            out << ".model " << m->name << ' ' << m->type << '(';
            for (std::size_t i = 0; i < m->params.size(); ++i)
                out << (i ? " " : "") << m->params[i].first << '=' << format_magnitude(m->params[i].second);
            out << ")\n";
        } else if (const auto* s = std::get_if<SubcktDef>(&d)) {
            out << ".subckt " << s->name;
            for (const auto& p : s->pins) out << ' ' << p;
            out << '\n';
            detail::emit_elements(out, s->body);
            out << ".ends " << s->name << '\n';
        } else if (const auto* t = std::get_if<TranDirective>(&d)) {
            out << ".tran " << format_magnitude(t->step) << ' ' << format_magnitude(t->stop) << '\n';
        } else if (const auto* a = std::get_if<AcDirective>(&d)) {
            out << ".ac " << a->sweep << ' ' << a->points << ' ' << format_magnitude(a->f_start) << ' '
                << format_magnitude(a->f_stop) << '\n';
        }
    }
    out << ".end\n";
    return out.str();
}

// ---------------------------------------------------------------- parse

namespace detail {

struct LogicalLine {
    int number = 0;
    std::string text;
};

inline std::string lowered(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char ch) { return std::tolower(ch); });
    return out;
}

/// Whitespace-separated tokens; parentheses and '=' stand alone.
inline std::vector<std::string> tokenize(std::string_view line) {
    std::vector<std::string> out;
    std::string cur;
    auto flush = [&] {
        if (!cur.empty()) out.push_back(std::move(cur));
        cur.clear();
    };
    for (char ch : line) {
        if (std::isspace(static_cast<unsigned char>(ch)) || ch == ',') {
            flush();
        } else if (ch == '(' || ch == ')' || ch == '=') {
            flush();
            out.emplace_back(1, ch);
        } else {
            cur += ch;
        }
    }
    flush();
    return out;
}

inline double number_at(const std::vector<std::string>& t, std::size_t i, int line) {
    if (i >= t.size()) throw ParseError(line, "missing value");
    try {
        return parse_magnitude(t[i]);
    } catch (const MagnitudeParseError& e) {
        throw ParseError(line, e.what());
    }
}

inline Element parse_element(const std::vector<std::string>& t, int line) {
    const auto kind = kind_from_letter(t[0].front());
    if (!kind) throw ParseError(line, "unknown element letter '" + std::string(1, t[0].front()) + "'");
    Element e;
    e.kind = *kind;
    e.label = t[0];
    auto expect_count = [&](std::size_t n, const char* shape) {
        if (t.size() != n) throw ParseError(line, e.label + " expects " + shape);
    };
    switch (e.kind) {
    case ElementKind::Resistor:
    case ElementKind::Capacitor:
    case ElementKind::Inductor:
        expect_count(4, "2 nodes and a value");
        e.nodes = {t[1], t[2]};
        e.value = number_at(t, 3, line);
        break;
    case ElementKind::Vcvs:
    case ElementKind::Vccs:
        expect_count(6, "4 nodes and a value");
        e.nodes = {t[1], t[2], t[3], t[4]};
        e.value = number_at(t, 5, line);
        break;
    case ElementKind::Bjt:
        expect_count(5, "3 nodes and a model");
        e.nodes = {t[1], t[2], t[3]};
        e.reference = t[4];
        break;
    case ElementKind::Subckt:
        if (t.size() < 3) throw ParseError(line, e.label + " expects nodes and a subcircuit name");
        e.nodes.assign(t.begin() + 1, t.end() - 1);
        e.reference = t.back();
        break;
    case ElementKind::VSource: {
        if (t.size() < 4) throw ParseError(line, e.label + " expects 2 nodes and a value");
        e.nodes = {t[1], t[2]};
        const std::string key = lowered(t[3]);
        if (key == "dc") {
            expect_count(5, "DC <value>");
            e.source = SourceSpec::make_dc(number_at(t, 4, line));
        } else if (key == "ac") {
            expect_count(5, "AC <magnitude>");
            e.source = SourceSpec::ac(number_at(t, 4, line));
        } else if (key == "sine" || key == "sin") {
            if (t.size() != 9 || t[4] != "(" || t[8] != ")")
                throw ParseError(line, e.label + " expects SINE(offset amplitude frequency)");
            e.source = SourceSpec::sine(number_at(t, 5, line), number_at(t, 6, line), number_at(t, 7, line));
        } else {
            expect_count(4, "2 nodes and a value");
            e.source = SourceSpec::make_dc(number_at(t, 3, line));
        }
        break;
    }
    }
    return e;
}

inline ModelCard parse_model(const std::vector<std::string>& t, int line) {
    if (t.size() < 3) throw ParseError(line, ".model expects a name and a type");
    ModelCard m;
    m.name = t[1];
    m.type = t[2];
    std::size_t i = 3;
    if (i < t.size()) {
        if (t[i] != "(" || t.back() != ")") throw ParseError(line, ".model parameters must be parenthesized");
        for (++i; i + 1 < t.size();) {
            if (i + 2 >= t.size() || t[i + 1] != "=") throw ParseError(line, ".model parameter must be key=value");
            m.params.emplace_back(t[i], number_at(t, i + 2, line));
            i += 3;
        }
    }
    return m;
}

}  // namespace detail

inline Circuit parse(std::string_view text) {
    using namespace detail;
    std::vector<LogicalLine> lines;
    Circuit c;
    int number = 0;
    bool first = true;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string raw(text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos));
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++number;
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();
        const auto start = raw.find_first_not_of(" \t");
        if (start == std::string::npos) {
            first = false;
            continue;
        }
        std::string_view body = std::string_view(raw).substr(start);
        if (body.front() == '*') {
            if (first && number == 1) {
                std::string title(body.substr(1));
                const auto b = title.find_first_not_of(" \t");
                c.title = b == std::string::npos ? "" : title.substr(b);
                const auto e = c.title.find_last_not_of(" \t");
                c.title = e == std::string::npos ? "" : c.title.substr(0, e + 1);
            }
            first = false;
            continue;
        }
        first = false;
        if (body.front() == '+') {
            if (lines.empty()) throw ParseError(number, "continuation line with nothing to continue");
            lines.back().text += " ";
            lines.back().text += body.substr(1);
            continue;
        }
        lines.push_back({number, std::string(body)});
    }

    SubcktDef* open = nullptr;
    int open_line = 0;
    bool ended = false;
    std::vector<std::pair<std::size_t, int>> instances;  // element index, line
    for (const auto& ll : lines) {
        const auto t = tokenize(ll.text);
        if (t.empty()) continue;
        if (t[0].front() == '.') {
            const std::string word = lowered(t[0]);
            if (open && word != ".ends" && word != ".end")
                throw ParseError(ll.number, "directive " + t[0] + " inside .subckt");
            if (word == ".end") {
                if (open) throw ParseError(open_line, "unterminated .subckt " + open->name);
                ended = true;
                break;
            } else if (word == ".model") {
                c.directives.emplace_back(parse_model(t, ll.number));
            } else if (word == ".subckt") {
                if (open) throw ParseError(ll.number, "nested .subckt is not supported");
                if (t.size() < 3) throw ParseError(ll.number, ".subckt expects a name and pins");
                c.directives.emplace_back(SubcktDef{t[1], {t.begin() + 2, t.end()}, {}});
                open = &std::get<SubcktDef>(c.directives.back());
                open_line = ll.number;
            } else if (word == ".ends") {
                if (!open) throw ParseError(ll.number, ".ends without .subckt");
                open = nullptr;
            } else if (word == ".tran") {
                if (t.size() != 3) throw ParseError(ll.number, ".tran expects step and stop");
                c.directives.emplace_back(TranDirective{number_at(t, 1, ll.number), number_at(t, 2, ll.number)});
            } else if (word == ".ac") {
                if (t.size() != 5) throw ParseError(ll.number, ".ac expects sweep, points, start and stop");
                AcDirective a;
                a.sweep = lowered(t[1]);
                if (a.sweep != "dec" && a.sweep != "oct" && a.sweep != "lin")
                    throw ParseError(ll.number, "unknown .ac sweep " + t[1]);
                try {
                    a.points = std::stoi(t[2]);
                } catch (const std::exception&) {
                    throw ParseError(ll.number, "bad .ac point count");
                }
                a.f_start = number_at(t, 3, ll.number);
                a.f_stop = number_at(t, 4, ll.number);
                c.directives.emplace_back(a);
            } else {
                throw ParseError(ll.number, "unsupported directive " + t[0]);
            }
            continue;
        }
        Element e = parse_element(t, ll.number);
        if (open) {
            if (e.kind == ElementKind::Subckt) throw ParseError(ll.number, "nested subcircuit instance");
            open->body.push_back(std::move(e));
        } else {
            if (e.kind == ElementKind::Subckt) instances.emplace_back(c.elements.size(), ll.number);
            c.elements.push_back(std::move(e));
        }
    }
    if (open) throw ParseError(open_line, "unterminated .subckt " + open->name);
    if (!ended) throw ParseError(number, "missing .end");

    for (auto [index, line] : instances) {
        const auto& e = c.elements[index];
        const auto* def = c.subckt(e.reference);
        if (!def) throw ParseError(line, "unknown subcircuit " + e.reference);
        if (def->pins.size() != e.nodes.size())
            throw ParseError(line, e.label + " has " + std::to_string(e.nodes.size()) + " terminals, " +
                                       def->name + " expects " + std::to_string(def->pins.size()));
    }
    std::set<std::string> labels;
    for (const auto& e : c.elements)
        if (!labels.insert(lowered(e.label)).second) throw NetlistError("duplicate label " + e.label);
    return c;
}

// ---------------------------------------------------------------- build

inline constexpr const char* kNpnModel = "QNPN";
inline constexpr const char* kOpAmpSubckt = "opamp_ideal";
inline constexpr double kOpAmpRail = 15.0;
inline constexpr double kProbeResistance = 1e9;
inline constexpr double kMagnetizingInductance = 10.0;

enum class ValueSource { Quantized, Raw };

struct Stimulus {
    double amplitude = 0.0;  // 0: derived from the design
    double frequency = kMidbandHz;
};

inline std::string topology_title(Topology t, OpAmpVariant v) {
    switch (t) {
    case Topology::SingleStage: return "single-stage CE amplifier";
    case Topology::TwoStage: return "two-stage CE amplifier";
    case Topology::Diff: return "difference amplifier";
    case Topology::Power: return "class-A power amplifier";
    case Topology::OpAmp:
        switch (v) {
        case OpAmpVariant::Follower: return "op-amp amplifier (follower)";
        case OpAmpVariant::NonInverting: return "op-amp amplifier (non-inverting)";
        case OpAmpVariant::Inverting: return "op-amp amplifier (inverting)";
        case OpAmpVariant::TNetwork: return "op-amp amplifier (inverting T-network)";
        case OpAmpVariant::None: break;
        }
        break;
    }
    return "amplifier";
}

inline std::optional<std::pair<Topology, OpAmpVariant>> topology_from_title(std::string_view title) {
    for (auto t : {Topology::SingleStage, Topology::TwoStage, Topology::Diff, Topology::Power})
        if (title.starts_with(topology_title(t, OpAmpVariant::None))) return std::pair{t, OpAmpVariant::None};
    for (auto v : {OpAmpVariant::Follower, OpAmpVariant::NonInverting, OpAmpVariant::Inverting,
                   OpAmpVariant::TNetwork})
        if (title.starts_with(topology_title(Topology::OpAmp, v))) return std::pair{Topology::OpAmp, v};
    return std::nullopt;
}

inline SubcktDef ideal_opamp_subckt(const OpAmpModel& m) {
    SubcktDef s{kOpAmpSubckt, {"inp", "inn", "vdd", "vss", "out"}, {}};
    s.body.push_back({ElementKind::Vcvs, "E1", {"out", "0", "inp", "inn"}, m.open_loop_gain, {}, {}});
    return s;
}

/// Lays out the schematic for a designed component set.
inline Circuit build_circuit(const ComponentSet& cs, const BjtParams& p, const OpAmpModel& m = {},
                             ValueSource source = ValueSource::Quantized, Stimulus stim = {}) {
    auto val = [&](const std::string& label) {
        if (!cs.has(label)) throw NetlistError("component set is missing " + label);
        const auto& c = cs.at(label);
        return source == ValueSource::Raw ? c.raw : c.quantized;
    };
    const auto values = source == ValueSource::Raw ? cs.raw_values() : cs.quantized_values();
    if (stim.amplitude == 0.0) {
        const double g = std::abs(gain_formula(cs.topology, cs.variant, values, p));
        stim.amplitude = cs.output_peak / g;
    }
    if (!(stim.frequency > 0.0)) throw NetlistError("stimulus frequency must be positive");

    Circuit c;
    c.title = topology_title(cs.topology, cs.variant);
    auto add = [&](ElementKind k, std::string label, std::vector<std::string> nodes, double value = 0.0,
                   std::string ref = {}) {
        c.elements.push_back({k, std::move(label), std::move(nodes), value, {}, std::move(ref)});
    };
    auto vsrc = [&](std::string label, std::string pos, SourceSpec s) {
        c.elements.push_back({ElementKind::VSource, std::move(label), {std::move(pos), "0"}, 0.0, s, {}});
    };
    auto res = [&](const std::string& label, std::string a, std::string b) {
        add(ElementKind::Resistor, label, {std::move(a), std::move(b)}, val(label));
    };
    auto cap = [&](const std::string& label, std::string a, std::string b) {
        add(ElementKind::Capacitor, label, {std::move(a), std::move(b)}, val(label));
    };
    const auto sine = SourceSpec::sine(0.0, stim.amplitude, stim.frequency);
    auto input_stage = [&] {
        if (cs.has("RS")) {
            vsrc("VIN", "src", sine);
            res("RS", "src", "in");
        } else {
            vsrc("VIN", "in", sine);
        }
    };
    auto load = [&] {
        if (cs.has("RL"))
            res("RL", "out", "0");
        else
            add(ElementKind::Resistor, "RPROBE", {"out", "0"}, kProbeResistance);
    };
    auto npn_model = [&] {
        c.directives.emplace_back(ModelCard{kNpnModel, "NPN", {{"BF", p.h_fe_typ}}});
    };
    auto opamp_supplies = [&] {
        vsrc("VCC", "vcc", SourceSpec::make_dc(kOpAmpRail));
        vsrc("VEE", "vee", SourceSpec::make_dc(-kOpAmpRail));
    };

    switch (cs.topology) {
    case Topology::SingleStage:
        vsrc("VCC", "vcc", SourceSpec::make_dc(val("VCC")));
        input_stage();
        res("R1", "vcc", "b1");
        res("R2", "b1", "0");
        res("RC", "vcc", "c1");
        res("RE", "e1", "0");
        load();
        cap("CB", "in", "b1");
        cap("CE", "e1", "0");
        cap("CC", "c1", "out");
        add(ElementKind::Bjt, "Q1", {"c1", "b1", "e1"}, 0.0, kNpnModel);
        npn_model();
        break;
    case Topology::TwoStage:
        vsrc("VCC", "vcc", SourceSpec::make_dc(val("VCC")));
        input_stage();
        res("R1", "vcc", "b1");
        res("R2", "b1", "0");
        res("RC1", "vcc", "c1");
        res("RE1", "e1", "0");
        res("R3", "vcc", "b2");
        res("R4", "b2", "0");
        res("RC2", "vcc", "c2");
        res("RE2", "e2", "0");
        load();
        cap("CB1", "in", "b1");
        cap("CE1", "e1", "0");
        cap("CB2", "c1", "b2");
        cap("CE2", "e2", "0");
        cap("C0", "c2", "out");
        add(ElementKind::Bjt, "Q1", {"c1", "b1", "e1"}, 0.0, kNpnModel);
        add(ElementKind::Bjt, "Q2", {"c2", "b2", "e2"}, 0.0, kNpnModel);
        npn_model();
        break;
    case Topology::OpAmp:
        opamp_supplies();
        vsrc("VIN", "in", sine);
        switch (cs.variant) {
        case OpAmpVariant::Follower:
            add(ElementKind::Subckt, "XU1", {"in", "out", "vcc", "vee", "out"}, 0.0, kOpAmpSubckt);
            break;
        case OpAmpVariant::NonInverting:
            res("R1", "inn", "0");
            res("R2", "inn", "out");
            add(ElementKind::Subckt, "XU1", {"in", "inn", "vcc", "vee", "out"}, 0.0, kOpAmpSubckt);
            break;
        case OpAmpVariant::Inverting:
            res("R1", "in", "inn");
            res("R2", "inn", "out");
            add(ElementKind::Subckt, "XU1", {"0", "inn", "vcc", "vee", "out"}, 0.0, kOpAmpSubckt);
            break;
        case OpAmpVariant::TNetwork:
            res("R1", "in", "inn");
            res("R2", "inn", "x");
            res("R3", "x", "0");
            res("R4", "x", "out");
            add(ElementKind::Subckt, "XU1", {"0", "inn", "vcc", "vee", "out"}, 0.0, kOpAmpSubckt);
            break;
        case OpAmpVariant::None: throw NetlistError("op-amp variant not set");
        }
        c.directives.emplace_back(ideal_opamp_subckt(m));
        break;
    case Topology::Diff:
        opamp_supplies();
        vsrc("V1", "in1", SourceSpec::sine(0.0, -stim.amplitude / 2.0, stim.frequency));
        vsrc("V2", "in2", SourceSpec::sine(0.0, stim.amplitude / 2.0, stim.frequency));
        res("R1", "in1", "inn");
        res("R2", "inn", "out");
        res("R3", "in2", "inp");
        res("R4", "inp", "0");
        add(ElementKind::Subckt, "XU1", {"inp", "inn", "vcc", "vee", "out"}, 0.0, kOpAmpSubckt);
        c.directives.emplace_back(ideal_opamp_subckt(m));
        break;
    case Topology::Power: {
        const double n = val("NRATIO");
        const double rl = val("RL");
        vsrc("VCC", "vcc", SourceSpec::make_dc(val("VCC")));
        vsrc("VIN", "in", sine);
        res("R1", "vcc", "b1");
        res("R2", "b1", "0");
        res("RE", "e1", "0");
        res("RL", "out", "0");
        cap("CB", "in", "b1");
        add(ElementKind::Inductor, "LP", {"c1", "vcc"}, kMagnetizingInductance);
        add(ElementKind::Bjt, "Q1", {"c1", "b1", "e1"}, 0.0, kNpnModel);
        // Ideal transformer: v_out = v_primary / n, i_primary = i_out / n.
        add(ElementKind::Vcvs, "ET", {"out", "0", "c1", "vcc"}, 1.0 / n);
        add(ElementKind::Vccs, "GT", {"c1", "vcc", "out", "0"}, 1.0 / (n * rl));
        npn_model();
        break;
    }
    }
    const double period = 1.0 / stim.frequency;
    c.directives.emplace_back(TranDirective{5.0 * period / 1000.0, 5.0 * period});
    std::stable_sort(c.elements.begin(), c.elements.end(), [](const Element& a, const Element& b) {
        return detail::emit_rank(a.kind) < detail::emit_rank(b.kind);
    });
    validate(c);
    return c;
}

/// Number of element terminals landing on each node.
inline std::map<std::string, int> node_degrees(const Circuit& c) {
    std::map<std::string, int> deg;
    for (const auto& e : c.elements)
        for (const auto& n : e.nodes) ++deg[n];
    return deg;
}

}  // namespace ampforge

#endif  // AMPFORGE_NETLIST_HPP
