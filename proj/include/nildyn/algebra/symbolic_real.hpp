#pragma once

#include "nildyn/algebra/rational.hpp"
#include "nildyn/errors.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace nildyn {

/// Reserved symbol for the rational unit.
inline const std::string kOne = "1";

/// Exact element of the Q-span of a set of opaque basis symbols.
///
/// Stored as a map symbol -> rational coefficient with zero entries removed,
/// so structural equality is value equality. Arithmetic that stays inside
/// the Q-span (sums, rational scaling) needs no basis; products and float
/// rendering go through a `Basis`.
class SymbolicReal {
public:
    using Coeffs = std::map<std::string, Rational, std::less<>>;

    SymbolicReal() = default;
    SymbolicReal(const Rational& r) { add_term(kOne, r); } // NOLINT(google-explicit-constructor)
    SymbolicReal(long long v) : SymbolicReal(Rational(v)) {} // NOLINT(google-explicit-constructor)

    static SymbolicReal symbol(const std::string& name, const Rational& coeff = 1) {
        SymbolicReal s;
        s.add_term(name, coeff);
        return s;
    }

    /// Parses expressions such as "1", "3/2", "√2", "2*√2", "1 + √2", "2-√2",
    /// "1/2*√3". Plain numbers are multiples of the unit; any other token
    /// starting with a non-digit is a basis symbol.
    static SymbolicReal parse(std::string_view text);

    const Coeffs& coeffs() const noexcept { return coeffs_; }

    Rational coeff(std::string_view sym) const {
        auto it = coeffs_.find(sym);
        return it == coeffs_.end() ? Rational(0) : it->second;
    }

    bool is_zero() const noexcept { return coeffs_.empty(); }
    bool is_rational() const noexcept {
        return coeffs_.empty() || (coeffs_.size() == 1 && coeffs_.begin()->first == kOne);
    }
    std::optional<Rational> as_rational() const {
        if (!is_rational()) return std::nullopt;
        return coeff(kOne);
    }

    std::set<std::string> symbols() const {
        std::set<std::string> out;
        for (const auto& [s, c] : coeffs_) out.insert(s);
        return out;
    }

    SymbolicReal& operator+=(const SymbolicReal& o) {
        for (const auto& [s, c] : o.coeffs_) add_term(s, c);
        return *this;
    }
    SymbolicReal& operator-=(const SymbolicReal& o) {
        for (const auto& [s, c] : o.coeffs_) add_term(s, -c);
        return *this;
    }
    SymbolicReal& operator*=(const Rational& r) {
        if (r == 0) {
            coeffs_.clear();
            return *this;
        }
        for (auto& [s, c] : coeffs_) c *= r;
        return *this;
    }
    SymbolicReal& operator/=(const Rational& r) {
        if (r == 0) throw std::domain_error("division of SymbolicReal by zero");
        for (auto& [s, c] : coeffs_) c /= r;
        return *this;
    }

    friend SymbolicReal operator+(SymbolicReal a, const SymbolicReal& b) { return a += b; }
    friend SymbolicReal operator-(SymbolicReal a, const SymbolicReal& b) { return a -= b; }
    friend SymbolicReal operator-(SymbolicReal a) { return a *= Rational(-1); }
    friend SymbolicReal operator*(SymbolicReal a, const Rational& r) { return a *= r; }
    friend SymbolicReal operator*(const Rational& r, SymbolicReal a) { return a *= r; }
    friend SymbolicReal operator/(SymbolicReal a, const Rational& r) { return a /= r; }
    friend bool operator==(const SymbolicReal& a, const SymbolicReal& b) { return a.coeffs_ == b.coeffs_; }

    std::string str() const;

private:
    void add_term(std::string_view sym, const Rational& c) {
        if (c == 0) return;
        auto it = coeffs_.find(sym);
        if (it == coeffs_.end()) {
            coeffs_.emplace(std::string(sym), c);
            return;
        }
        it->second += c;
        if (it->second == 0) coeffs_.erase(it);
    }

    Coeffs coeffs_;
};

inline std::string SymbolicReal::str() const {
    if (coeffs_.empty()) return "0";
    std::string out;
    auto emit = [&](const std::string& sym, const Rational& c) {
        Rational mag = c < 0 ? Rational(-c) : c;
        if (out.empty()) out += c < 0 ? "-" : "";
        else out += c < 0 ? " - " : " + ";
        if (sym == kOne) {
            out += to_string(mag);
        } else {
            if (mag != 1) out += to_string(mag) + "*";
            out += sym;
        }
    };
    if (auto it = coeffs_.find(kOne); it != coeffs_.end()) emit(it->first, it->second);
    for (const auto& [s, c] : coeffs_)
        if (s != kOne) emit(s, c);
    return out;
}

inline SymbolicReal SymbolicReal::parse(std::string_view text) {
    SymbolicReal out;
    std::size_t pos = 0;
    auto skip_ws = [&] {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    };
    auto is_number_char = [](char c) { return std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == '/'; };
    auto fail = [&](const std::string& why) {
        throw std::invalid_argument("cannot parse symbolic real '" + std::string(text) + "': " + why);
    };

    skip_ws();
    if (pos == text.size()) fail("empty expression");
    bool first = true;
    while (pos < text.size()) {
        Rational sign = 1;
        skip_ws();
        if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
            if (text[pos] == '-') sign = -1;
            ++pos;
        } else if (!first) {
            fail("expected '+' or '-'");
        }
        skip_ws();
        first = false;

        Rational coeff = 1;
        std::size_t start = pos;
        while (pos < text.size() && is_number_char(text[pos])) ++pos;
        bool has_number = pos > start;
        if (has_number) coeff = parse_rational(text.substr(start, pos - start));
        skip_ws();
        if (pos < text.size() && text[pos] == '*') {
            if (!has_number) fail("'*' without a coefficient");
            ++pos;
            skip_ws();
        }
        std::size_t sym_start = pos;
        while (pos < text.size() && !std::isspace(static_cast<unsigned char>(text[pos])) && text[pos] != '+' &&
               text[pos] != '-' && text[pos] != '*')
            ++pos;
        std::string sym(text.substr(sym_start, pos - sym_start));
        if (sym.empty() && !has_number) fail("missing term");
        if (!sym.empty() && (std::isdigit(static_cast<unsigned char>(sym.front())) || sym.front() == '.'))
            fail("unexpected number '" + sym + "'");
        out.add_term(sym.empty() ? kOne : sym, sign * coeff);
        skip_ws();
    }
    return out;
}

/// Declared irrational constants: symbol -> decimal value, plus the product
/// table that closes the span under the multiplications an experiment needs.
///
/// Symbols are assumed Q-linearly independent together with the unit; the
/// library never tries to prove it.
class Basis {
public:
    struct Entry {
        std::string decimal;
        HighPrecision value;
        std::optional<unsigned long> radicand; // set for declare_sqrt symbols
    };

    void declare(const std::string& symbol, const std::string& decimal) {
        check_new(symbol);
        entries_[symbol] = Entry{decimal, HighPrecision(decimal), std::nullopt};
    }

    /// Declares `symbol` = √n for squarefree n > 1. Products among such
    /// symbols are derived automatically when the result stays in the basis.
    void declare_sqrt(const std::string& symbol, unsigned long n) {
        check_new(symbol);
        if (n < 2 || squarefree_split(n).first != 1)
            throw std::invalid_argument("declare_sqrt: radicand must be squarefree and > 1, got " + std::to_string(n));
        HighPrecision v = boost::multiprecision::sqrt(HighPrecision(n));
        entries_[symbol] = Entry{v.str(50), v, n};
    }

    void declare_product(const std::string& a, const std::string& b, const SymbolicReal& result) {
        require(a);
        require(b);
        check_declared(result);
        products_[key(a, b)] = result;
    }

    /// Convenience: √n symbols named "√n" for each listed n.
    static Basis square_roots(std::initializer_list<unsigned long> ns) {
        Basis b;
        for (auto n : ns) b.declare_sqrt("√" + std::to_string(n), n);
        return b;
    }

    bool contains(std::string_view symbol) const { return symbol == kOne || entries_.count(std::string(symbol)) > 0; }
    const std::map<std::string, Entry>& entries() const noexcept { return entries_; }
    const std::map<std::pair<std::string, std::string>, SymbolicReal>& explicit_products() const noexcept {
        return products_;
    }

    void check_declared(const SymbolicReal& v) const {
        for (const auto& [s, c] : v.coeffs())
            if (!contains(s)) throw MixedBasis("symbol '" + s + "' is not declared in the basis");
    }

    HighPrecision to_high_precision(const SymbolicReal& v) const {
        HighPrecision acc = 0;
        for (const auto& [s, c] : v.coeffs()) {
            if (!contains(s)) throw MixedBasis("symbol '" + s + "' is not declared in the basis");
            HighPrecision coeff = HighPrecision(numerator(c).str()) / HighPrecision(denominator(c).str());
            acc += s == kOne ? coeff : coeff * entries_.at(s).value;
        }
        return acc;
    }

    double to_double(const SymbolicReal& v) const { return to_high_precision(v).convert_to<double>(); }

    /// Product of two basis symbols, if the basis can express it.
    std::optional<SymbolicReal> symbol_product(const std::string& a, const std::string& b) const {
        if (a == kOne) return SymbolicReal::symbol(b);
        if (b == kOne) return SymbolicReal::symbol(a);
        if (auto it = products_.find(key(a, b)); it != products_.end()) return it->second;
        const auto& ea = entries_.at(a);
        const auto& eb = entries_.at(b);
        if (ea.radicand && eb.radicand) {
            auto [square, free] = squarefree_split(*ea.radicand * *eb.radicand);
            Rational c(static_cast<long long>(isqrt(square)));
            if (free == 1) return SymbolicReal(c);
            for (const auto& [sym, e] : entries_)
                if (e.radicand && *e.radicand == free) return SymbolicReal::symbol(sym, c);
        }
        return std::nullopt;
    }

    /// Names of symbol products needed by x*y that the basis cannot express.
    std::vector<std::string> missing_products(const SymbolicReal& x, const SymbolicReal& y) const {
        check_declared(x);
        check_declared(y);
        std::set<std::string> missing;
        for (const auto& [a, ca] : x.coeffs())
            for (const auto& [b, cb] : y.coeffs())
                if (!symbol_product(a, b)) missing.insert(a < b ? a + "·" + b : b + "·" + a);
        return {missing.begin(), missing.end()};
    }

    /// Exact product; throws UnsupportedBasis rather than approximating.
    SymbolicReal multiply(const SymbolicReal& x, const SymbolicReal& y) const {
        if (auto missing = missing_products(x, y); !missing.empty()) throw UnsupportedBasis(std::move(missing));
        SymbolicReal out;
        for (const auto& [a, ca] : x.coeffs())
            for (const auto& [b, cb] : y.coeffs()) out += *symbol_product(a, b) * (ca * cb);
        return out;
    }

private:
    static std::pair<std::string, std::string> key(const std::string& a, const std::string& b) {
        return a < b ? std::make_pair(a, b) : std::make_pair(b, a);
    }

    // n = square * free with free squarefree; returns {square, free}.
    static std::pair<unsigned long, unsigned long> squarefree_split(unsigned long n) {
        unsigned long square = 1;
        for (unsigned long p = 2; p * p <= n; ++p)
            while (n % (p * p) == 0) {
                n /= p * p;
                square *= p * p;
            }
        return {square, n};
    }

    static unsigned long isqrt(unsigned long n) {
        unsigned long r = 0;
        while ((r + 1) * (r + 1) <= n) ++r;
        return r;
    }

    void check_new(const std::string& symbol) const {
        if (symbol.empty() || symbol == kOne) throw std::invalid_argument("invalid basis symbol '" + symbol + "'");
        if (std::isdigit(static_cast<unsigned char>(symbol.front())))
            throw std::invalid_argument("basis symbol must not start with a digit: '" + symbol + "'");
        if (entries_.count(symbol)) throw std::invalid_argument("basis symbol declared twice: '" + symbol + "'");
    }

    void require(const std::string& symbol) const {
        if (!contains(symbol)) throw MixedBasis("symbol '" + symbol + "' is not declared in the basis");
    }

    std::map<std::string, Entry> entries_;
    std::map<std::pair<std::string, std::string>, SymbolicReal> products_;
};

} // namespace nildyn
