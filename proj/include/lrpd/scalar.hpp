#pragma once

#include <charconv>
#include <cmath>
#include <string>
#include <type_traits>

#include "lrpd/rational.hpp"

namespace lrpd {

template <class T>
struct scalar_traits;

template <>
struct scalar_traits<double> {
    static constexpr bool exact = false;
    static bool finite(double x) { return std::isfinite(x); }
    static double abs(double x) { return std::fabs(x); }
    static int sign(double x) { return x > 0 ? 1 : (x < 0 ? -1 : 0); }
    static double from_int(long n) { return static_cast<double>(n); }
    static double from_ratio(long p, long q) { return static_cast<double>(p) / static_cast<double>(q); }
    static double to_double(double x) { return x; }
    static std::string str(double x);
};

template <>
struct scalar_traits<Rational> {
    static constexpr bool exact = true;
    static bool finite(const Rational&) { return true; }
    static Rational abs(const Rational& x) { return x.abs(); }
    static int sign(const Rational& x) { return x.sign(); }
    static Rational from_int(long n) { return Rational(n); }
    static Rational from_ratio(long p, long q) { return Rational(p, q); }
    static double to_double(const Rational& x) { return x.to_double(); }
    static std::string str(const Rational& x) { return x.str(); }
};

// shortest round-trip decimal
inline std::string scalar_traits<double>::str(double x) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

template <class T>
inline constexpr bool is_exact_v = scalar_traits<T>::exact;

enum class ScalarMode { exact, floating };

}  // namespace lrpd
