#ifndef AMPFORGE_VALUES_HPP
#define AMPFORGE_VALUES_HPP

// Engineering values: E-series quantization, supply-rail selection and
// SPICE-style magnitude text.

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ampforge {

class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class MagnitudeParseError : public std::runtime_error {
public:
    MagnitudeParseError(const std::string& what, std::size_t offset)
        : std::runtime_error(what + " at offset " + std::to_string(offset)), offset_(offset) {}
    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

enum class Direction { Higher, Lower, Nearest };

inline const char* to_string(Direction d) {
    switch (d) {
    case Direction::Higher: return "higher";
    case Direction::Lower: return "lower";
    case Direction::Nearest: return "nearest";
    }
    return "?";
}

enum class SeriesName { E6, E12, E24 };

/// A preferred-value series. Members are stored as two-digit integers
/// (10 = 1.0, 47 = 4.7) so that scaled values are built from exact decimals.
class Series {
public:
    Series(SeriesName name, std::vector<int> members) : name_(name), members_(std::move(members)) {
        if (members_.empty() || members_.front() != 10 ||
            !std::is_sorted(members_.begin(), members_.end()) || members_.back() >= 100)
            throw DomainError("series members must be sorted, start at 1.0 and stay below 10.0");
    }

    SeriesName name() const noexcept { return name_; }
    std::span<const int> members() const noexcept { return members_; }

    /// Member `index` scaled so the result is `members[index] / 10 * 10^decade`.
    double scaled(std::size_t index, int decade) const {
        const int e = decade - 1;
        const double m = members_[index];
        return e >= 0 ? m * std::pow(10.0, e) : m / std::pow(10.0, -e);
    }

    static const Series& e6() {
        static const Series s{SeriesName::E6, {10, 15, 22, 33, 47, 68}};
        return s;
    }
    static const Series& e12() {
        static const Series s{SeriesName::E12, {10, 12, 15, 18, 22, 27, 33, 39, 47, 56, 68, 82}};
        return s;
    }
    static const Series& e24() {
        static const Series s{SeriesName::E24, {10, 11, 12, 13, 15, 16, 18, 20, 22, 24, 27, 30,
                                                33, 36, 39, 43, 47, 51, 56, 62, 68, 75, 82, 91}};
        return s;
    }

    static const Series& by_name(SeriesName n) {
        switch (n) {
        case SeriesName::E6: return e6();
        case SeriesName::E12: return e12();
        case SeriesName::E24: return e24();
        }
        return e24();
    }

private:
    SeriesName name_;
    std::vector<int> members_;
};

inline const char* to_string(SeriesName n) {
    switch (n) {
    case SeriesName::E6: return "E6";
    case SeriesName::E12: return "E12";
    case SeriesName::E24: return "E24";
    }
    return "?";
}

inline SeriesName series_from_string(std::string_view s) {
    std::string lower(s);
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    if (lower == "e6") return SeriesName::E6;
    if (lower == "e12") return SeriesName::E12;
    if (lower == "e24") return SeriesName::E24;
    throw DomainError("unknown series '" + std::string(s) + "'");
}

/// Reads a series table file: `[E24]` section headers followed by one
/// decade value per line (e.g. `4.7`). `#` starts a comment.
inline std::map<SeriesName, std::vector<int>> load_series_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open series file '" + path + "'");
    std::map<SeriesName, std::vector<int>> out;
    std::vector<int>* current = nullptr;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string tok;
        if (!(ls >> tok)) continue;
        if (tok.front() == '[' && tok.back() == ']') {
            current = &out[series_from_string(tok.substr(1, tok.size() - 2))];
            continue;
        }
        if (!current) throw DomainError("value outside a series section, line " + std::to_string(lineno));
        double v = 0;
        auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (ec != std::errc{} || p != tok.data() + tok.size() || v < 1.0 || v >= 10.0)
            throw DomainError("bad series value '" + tok + "', line " + std::to_string(lineno));
        current->push_back(static_cast<int>(std::lround(v * 10.0)));
    }
    return out;
}

/// Snaps a positive value onto `series` following `dir`. Ties under
/// Nearest resolve upward.
inline double quantize(double x, Direction dir, const Series& series) {
    if (!std::isfinite(x) || x <= 0.0) throw DomainError("quantize requires a finite positive value");
    constexpr double rel = 1e-12;
    const int decade = static_cast<int>(std::floor(std::log10(x)));
    double lower = 0.0;
    double higher = 0.0;
    bool have_lower = false;
    bool have_higher = false;
    const auto n = series.members().size();
    for (int d = decade - 1; d <= decade + 1; ++d) {
        for (std::size_t i = 0; i < n; ++i) {
            const double v = series.scaled(i, d);
            if (std::abs(v - x) <= rel * x) return v;
            if (v < x && (!have_lower || v > lower)) {
                lower = v;
                have_lower = true;
            }
            if (v > x && (!have_higher || v < higher)) {
                higher = v;
                have_higher = true;
            }
        }
    }
    switch (dir) {
    case Direction::Higher: return higher;
    case Direction::Lower: return lower;
    case Direction::Nearest: return (x - lower) < (higher - x) ? lower : higher;
    }
    return higher;
}

struct SupplyRail {
    double volts = 0.0;
    bool non_standard = false;
};

inline constexpr std::array<double, 4> kSupplyRails{9.0, 12.0, 15.0, 18.0};

/// Smallest standard rail at or above `v`; above the top rail the value
/// passes through flagged as non-standard.
inline SupplyRail quantize_supply(double v) {
    if (!std::isfinite(v) || v <= 0.0) throw DomainError("supply voltage must be positive");
    for (double rail : kSupplyRails)
        if (rail >= v) return {rail, false};
    return {v, true};
}

namespace detail {

inline char lower(char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); }

inline bool iequals_prefix(std::string_view text, std::size_t at, std::string_view word) {
    if (text.size() - at < word.size()) return false;
    for (std::size_t i = 0; i < word.size(); ++i)
        if (lower(text[at + i]) != word[i]) return false;
    return true;
}

}  // namespace detail

/// Parses `<number>[suffix][unit]`, e.g. "10k", "1MEG", "4.7uF", "220.3".
/// "m" is milli and "meg" is mega regardless of case.
inline double parse_magnitude(std::string_view text) {
    using detail::lower;
    if (text.empty()) throw MagnitudeParseError("empty magnitude", 0);
    double number = 0.0;
    auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), number);
    if (ec != std::errc{} || !std::isfinite(number))
        throw MagnitudeParseError("malformed number '" + std::string(text) + "'", 0);
    std::size_t pos = static_cast<std::size_t>(end - text.data());

    int exponent = 0;
    if (pos < text.size()) {
        if (detail::iequals_prefix(text, pos, "meg")) {
            exponent = 6;
            pos += 3;
        } else {
            switch (lower(text[pos])) {
            case 'f': exponent = -15; ++pos; break;
            case 'p': exponent = -12; ++pos; break;
            case 'n': exponent = -9; ++pos; break;
            case 'u': exponent = -6; ++pos; break;
            case 'm': exponent = -3; ++pos; break;
            case 'k': exponent = 3; ++pos; break;
            case 'g': exponent = 9; ++pos; break;
            default: break;
            }
        }
    }

    // Trailing unit letters are accepted only from a fixed vocabulary.
    if (pos < text.size()) {
        static constexpr std::array<std::string_view, 9> units{"ohms", "ohm", "hz", "f", "h", "v", "a", "s", "w"};
        bool matched = false;
        for (auto u : units) {
            if (text.size() - pos == u.size() && detail::iequals_prefix(text, pos, u)) {
                matched = true;
                break;
            }
        }
        if (!matched) throw MagnitudeParseError("unknown suffix '" + std::string(text.substr(pos)) + "'", pos);
    }

    if (exponent == 0) return number;
    // Re-read through the decimal form so "4.7u" yields exactly 4.7e-6.
    std::string digits(text.substr(0, static_cast<std::size_t>(end - text.data())));
    digits += 'e';
    digits += std::to_string(exponent);
    double scaled = 0.0;
    auto r = std::from_chars(digits.data(), digits.data() + digits.size(), scaled);
    if (r.ec != std::errc{} || r.ptr != digits.data() + digits.size()) return number * std::pow(10.0, exponent);
    return scaled;
}

/// Canonical text: 4 significant digits, largest suffix that keeps the
/// mantissa in [1, 1000), trailing zeros dropped.
inline std::string format_magnitude(double x) {
    if (!std::isfinite(x)) throw DomainError("cannot format a non-finite magnitude");
    if (x == 0.0) return "0";
    static constexpr std::array<std::string_view, 9> suffix{"f", "p", "n", "u", "m", "", "k", "Meg", "G"};
    const double ax = std::abs(x);
    if (ax < 1e-15 || ax >= 1e12) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.4g", x);
        return buf;
    }
    int group = static_cast<int>(std::floor(std::floor(std::log10(ax)) / 3.0));
    group = std::clamp(group, -5, 3);
    for (;;) {
        const int e = 3 * group;
        double mant = e >= 0 ? ax / std::pow(10.0, e) : ax * std::pow(10.0, -e);
        int mag = static_cast<int>(std::floor(std::log10(mant)));
        mag = std::clamp(mag, 0, 2);
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.*f", 3 - mag, mant);
        if (std::strtod(buf, nullptr) >= 1000.0 && group < 3) {
            ++group;
            continue;
        }
        std::string s(buf);
        if (s.find('.') != std::string::npos) {
            while (s.back() == '0') s.pop_back();
            if (s.back() == '.') s.pop_back();
        }
        return (x < 0 ? "-" : "") + s + std::string(suffix[static_cast<std::size_t>(group + 5)]);
    }
}

}  // namespace ampforge

#endif  // AMPFORGE_VALUES_HPP
