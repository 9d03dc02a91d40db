#pragma once

#include <boost/multiprecision/cpp_dec_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include <cctype>
#include <stdexcept>
#include <string>
#include <string_view>

namespace nildyn {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;
/// 50 significant decimal digits; used for rendering basis constants.
using HighPrecision = boost::multiprecision::cpp_dec_float_50;

/// Parses "7", "-3/2", "0.125" or "2.5e-3" into an exact rational.
inline Rational parse_rational(std::string_view text) {
    auto trim = [](std::string_view s) {
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
        return s;
    };
    text = trim(text);
    if (text.empty()) throw std::invalid_argument("empty rational literal");

    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        Rational num = parse_rational(text.substr(0, slash));
        Rational den = parse_rational(text.substr(slash + 1));
        if (den == 0) throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
        return num / den;
    }

    bool negative = false;
    std::size_t pos = 0;
    if (text[pos] == '+' || text[pos] == '-') {
        negative = text[pos] == '-';
        ++pos;
    }
    BigInt digits = 0;
    long exponent = 0;
    bool seen_digit = false;
    bool after_point = false;
    for (; pos < text.size(); ++pos) {
        char c = text[pos];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            digits = digits * 10 + (c - '0');
            if (after_point) --exponent;
            seen_digit = true;
        } else if (c == '.' && !after_point) {
            after_point = true;
        } else if (c == 'e' || c == 'E') {
            exponent += std::stol(std::string(text.substr(pos + 1)));
            pos = text.size();
            break;
        } else {
            throw std::invalid_argument("malformed rational literal '" + std::string(text) + "'");
        }
    }
    if (!seen_digit) throw std::invalid_argument("malformed rational literal '" + std::string(text) + "'");

    Rational value(digits);
    BigInt scale = boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(exponent < 0 ? -exponent : exponent));
    if (exponent < 0) value /= Rational(scale);
    else value *= Rational(scale);
    return negative ? Rational(-value) : value;
}

inline std::string to_string(const Rational& r) {
    if (denominator(r) == 1) return numerator(r).str();
    return numerator(r).str() + "/" + denominator(r).str();
}

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

} // namespace nildyn
