#ifndef AMPFORGE_TESTS_ORACLES_HPP
#define AMPFORGE_TESTS_ORACLES_HPP

// Test-side reference implementations. These deliberately share no code with
// the library: values come straight from the data files and plain arithmetic.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <fstream>
#include <map>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#ifndef AMPFORGE_DATA_DIR
#define AMPFORGE_DATA_DIR "data"
#endif

namespace oracle {

inline std::string data_path(const std::string& name) { return std::string(AMPFORGE_DATA_DIR) + "/" + name; }

/// Decade mantissas as decimal strings, keyed by section name ("E6", ...).
inline std::map<std::string, std::vector<std::string>> series_mantissas() {
    std::ifstream in(data_path("eseries.txt"));
    if (!in) throw std::runtime_error("eseries.txt not found");
    std::map<std::string, std::vector<std::string>> out;
    std::string line, section;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (line[0] == '[') {
            section = line.substr(1, line.find(']') - 1);
            continue;
        }
        out[section].push_back(line);
    }
    return out;
}

/// Every member of the named series over decades 1e-15 .. 1e15, built by
/// decimal text conversion so each entry is the correctly rounded double.
inline std::vector<double> full_table(const std::string& name) {
    const auto all = series_mantissas();
    std::vector<double> t;
    for (const auto& m : all.at(name))
        for (int d = -15; d <= 15; ++d) t.push_back(std::strtod((m + "e" + std::to_string(d)).c_str(), nullptr));
    std::sort(t.begin(), t.end());
    return t;
}

enum class Dir { Higher, Lower, Nearest };

/// Exhaustive scan: no decade arithmetic, just every table entry.
inline double scan_quantize(const std::vector<double>& table, double x, Dir dir) {
    double best = 0.0;
    bool found = false;
    for (double v : table) {
        switch (dir) {
        case Dir::Higher:
            if (v >= x && (!found || v < best)) best = v, found = true;
            break;
        case Dir::Lower:
            if (v <= x && (!found || v > best)) best = v, found = true;
            break;
        case Dir::Nearest: {
            if (!found) {
                best = v, found = true;
                break;
            }
            const double dv = std::abs(v - x), db = std::abs(best - x);
            if (dv < db || (dv == db && v > best)) best = v;
            break;
        }
        }
    }
    if (!found) throw std::runtime_error("scan found nothing");
    return best;
}

using cplx = std::complex<double>;

/// One ladder element: a resistor, a capacitor, or the two in parallel.
struct Imp {
    double r = 0.0;  // 0: absent
    double c = 0.0;  // 0: absent
    cplx z(double f) const {
        const double w = 2.0 * std::numbers::pi * f;
        cplx y{0.0, 0.0};
        if (r > 0.0) y += 1.0 / r;
        if (c > 0.0) y += cplx{0.0, w * c};
        return 1.0 / y;
    }
};

/// Ladder: series[k] from node k to node k+1 (node 0 is the driven input),
/// shunt[k] from node k+1 to ground. Output is the last node.
struct Ladder {
    std::vector<Imp> series;
    std::vector<Imp> shunt;
};

/// Voltage transfer by series/parallel reduction from the far end.
inline cplx ladder_gain(const Ladder& l, double f) {
    const std::size_t n = l.series.size();
    std::vector<cplx> load(n);
    load[n - 1] = l.shunt[n - 1].z(f);
    for (std::size_t k = n - 1; k-- > 0;) {
        const cplx right = l.series[k + 1].z(f) + load[k + 1];
        const cplx sh = l.shunt[k].z(f);
        load[k] = sh * right / (sh + right);
    }
    cplx g{1.0, 0.0};
    for (std::size_t k = 0; k < n; ++k) g *= load[k] / (l.series[k].z(f) + load[k]);
    return g;
}

inline Imp random_imp(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> lr(1.0, 6.0), lc(-9.0, -5.0);
    std::uniform_int_distribution<int> pick(0, 2);
    Imp i;
    switch (pick(rng)) {
    case 0: i.r = std::pow(10.0, lr(rng)); break;
    case 1: i.c = std::pow(10.0, lc(rng)); break;
    default:
        i.r = std::pow(10.0, lr(rng));
        i.c = std::pow(10.0, lc(rng));
        break;
    }
    return i;
}

inline Ladder random_ladder(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> len(1, 8);
    Ladder l;
    const int n = len(rng);
    for (int k = 0; k < n; ++k) {
        l.series.push_back(random_imp(rng));
        l.shunt.push_back(random_imp(rng));
    }
    return l;
}

inline double rel_err(double got, double want) { return std::abs(got - want) / std::abs(want); }
inline double rel_err(cplx got, cplx want) { return std::abs(got - want) / std::abs(want); }

}  // namespace oracle

#endif
