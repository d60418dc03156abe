#ifndef AMPFORGE_TESTS_FIXTURES_HPP
#define AMPFORGE_TESTS_FIXTURES_HPP

#include <cmath>
#include <random>
#include <string>

#include "ampforge/netlist.hpp"
#include "oracles.hpp"

namespace fixture {

/// Lays an oracle ladder out as a netlist driven by `VIN in 0 AC 1`.
inline ampforge::Circuit ladder_circuit(const oracle::Ladder& l) {
    using namespace ampforge;
    Circuit c;
    c.title = "rc ladder";
    c.elements.push_back({ElementKind::VSource, "VIN", {"in", "0"}, 0.0, SourceSpec::ac(1.0), {}});
    const std::size_t n = l.series.size();
    auto node = [&](std::size_t k) { return k == 0 ? std::string("in") : k == n ? std::string("out") : "n" + std::to_string(k); };
    int rc = 0, cc = 0;
    auto place = [&](const oracle::Imp& imp, const std::string& a, const std::string& b) {
        if (imp.r > 0.0) c.elements.push_back({ElementKind::Resistor, "R" + std::to_string(++rc), {a, b}, imp.r, {}, {}});
        if (imp.c > 0.0) c.elements.push_back({ElementKind::Capacitor, "C" + std::to_string(++cc), {a, b}, imp.c, {}, {}});
    };
    for (std::size_t k = 0; k < n; ++k) {
        place(l.series[k], node(k), node(k + 1));
        place(l.shunt[k], node(k + 1), "0");
    }
    return c;
}

/// Random but well-formed circuit touching every element kind and directive.
inline ampforge::Circuit random_circuit(std::mt19937_64& rng) {
    using namespace ampforge;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<int> count(1, 12);
    const std::vector<std::string> pool{"0", "in", "out", "n1", "n2", "n3", "vcc", "b1", "c1", "e1"};
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    auto node = [&] { return pool[pick(rng)]; };
    auto mag = [&](double lo, double hi) { return std::pow(10.0, lo + (hi - lo) * u(rng)); };

    Circuit c;
    c.title = "random circuit " + std::to_string(rng() % 100000);
    const bool with_sub = u(rng) < 0.5;
    if (with_sub) {
        SubcktDef s{"amp" + std::to_string(rng() % 100), {"p", "m", "o"}, {}};
        s.body.push_back({ElementKind::Vcvs, "E1", {"o", "0", "p", "m"}, mag(5, 8), {}, {}});
        s.body.push_back({ElementKind::Resistor, "R1", {"o", "0"}, mag(2, 6), {}, {}});
        c.directives.emplace_back(s);
    }
    const bool with_q = u(rng) < 0.5;
    if (with_q) c.directives.emplace_back(ModelCard{"QN", "NPN", {{"BF", mag(1, 3)}}});
    const int n = count(rng);
    for (int i = 0; i < n; ++i) {
        const std::string id = std::to_string(i + 1);
        switch (rng() % 9) {
        case 0: c.elements.push_back({ElementKind::Resistor, "R" + id, {node(), node()}, mag(-1, 9), {}, {}}); break;
        case 1: c.elements.push_back({ElementKind::Capacitor, "C" + id, {node(), node()}, mag(-14, -2), {}, {}}); break;
        case 2: c.elements.push_back({ElementKind::Inductor, "L" + id, {node(), node()}, mag(-9, 2), {}, {}}); break;
        case 3: {
            SourceSpec s;
            switch (rng() % 3) {
            case 0: s = SourceSpec::make_dc((u(rng) < 0.3 ? -1.0 : 1.0) * mag(-2, 1.5)); break;
            case 1: s = SourceSpec::sine(0.0, mag(-4, 0), mag(0, 6)); break;
            default: s = SourceSpec::ac(mag(-3, 0)); break;
            }
            c.elements.push_back({ElementKind::VSource, "V" + id, {node(), "0"}, 0.0, s, {}});
            break;
        }
        case 4:
            if (with_q) c.elements.push_back({ElementKind::Bjt, "Q" + id, {node(), node(), node()}, 0.0, {}, "QN"});
            break;
        case 5:
            if (with_sub)
                c.elements.push_back({ElementKind::Subckt, "X" + id, {node(), node(), node()}, 0.0, {},
                                      std::get<SubcktDef>(c.directives.front()).name});
            break;
        case 6:
            c.elements.push_back({ElementKind::Vcvs, "E" + id, {node(), node(), node(), node()}, mag(-2, 7), {}, {}});
            break;
        case 7:
            c.elements.push_back({ElementKind::Vccs, "G" + id, {node(), node(), node(), node()}, mag(-6, 1), {}, {}});
            break;
        default: c.elements.push_back({ElementKind::Resistor, "R" + id, {node(), node()}, mag(0, 4), {}, {}}); break;
        }
    }
    if (u(rng) < 0.5) c.directives.emplace_back(TranDirective{mag(-9, -5), mag(-4, -1)});
    if (u(rng) < 0.5) c.directives.emplace_back(AcDirective{"dec", 1 + static_cast<int>(rng() % 100), 1.0, 1e6});
    return c;
}

}  // namespace fixture

#endif
