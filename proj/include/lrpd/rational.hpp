#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace lrpd {

// Arbitrary-precision rational scalar. Thin wrapper over GMP's mpq_class so
// the rest of the library controls parsing, printing ("p/q") and conversion
// in one place.
class Rational {
public:
    Rational() : v_(0) {}
    Rational(int n) : v_(n) {}
    Rational(long n) : v_(static_cast<signed long>(n)) {}
    Rational(long long n) {
        mpz_class z;
        bool neg = n < 0;
        unsigned long long u = neg ? 0ULL - static_cast<unsigned long long>(n)
                                   : static_cast<unsigned long long>(n);
        mpz_import(z.get_mpz_t(), 1, 1, sizeof(u), 0, 0, &u);
        if (neg) z = -z;
        v_ = mpq_class(z);
    }
    Rational(long num, long den) : v_(num, den) {
        if (den == 0) throw std::invalid_argument("Rational: zero denominator");
        v_.canonicalize();
    }
    explicit Rational(const mpq_class& q) : v_(q) { v_.canonicalize(); }

    // Exact dyadic conversion of a finite double.
    static Rational from_double(double x) {
        Rational r;
        r.v_ = mpq_class(x);
        return r;
    }

    // Accepts "p", "p/q", decimal strings like "-1.25", and leading '+'.
    static Rational parse(std::string_view s);

    std::string str() const {
        return v_.get_str();
    }

    double to_double() const { return v_.get_d(); }

    int sign() const { return sgn(v_); }
    Rational abs() const {
        Rational r;
        r.v_ = ::abs(v_);
        return r;
    }
    bool is_zero() const { return sgn(v_) == 0; }
    bool is_integer() const { return v_.get_den() == 1; }

    const mpq_class& raw() const { return v_; }

    Rational& operator+=(const Rational& o) { v_ += o.v_; return *this; }
    Rational& operator-=(const Rational& o) { v_ -= o.v_; return *this; }
    Rational& operator*=(const Rational& o) { v_ *= o.v_; return *this; }
    Rational& operator/=(const Rational& o) {
        if (o.is_zero()) throw std::domain_error("Rational: division by zero");
        v_ /= o.v_;
        return *this;
    }

    friend Rational operator+(Rational a, const Rational& b) { a += b; return a; }
    friend Rational operator-(Rational a, const Rational& b) { a -= b; return a; }
    friend Rational operator*(Rational a, const Rational& b) { a *= b; return a; }
    friend Rational operator/(Rational a, const Rational& b) { a /= b; return a; }
    friend Rational operator-(const Rational& a) {
        Rational r;
        r.v_ = -a.v_;
        return r;
    }

    friend bool operator==(const Rational& a, const Rational& b) { return a.v_ == b.v_; }
    friend bool operator!=(const Rational& a, const Rational& b) { return a.v_ != b.v_; }
    friend bool operator<(const Rational& a, const Rational& b) { return a.v_ < b.v_; }
    friend bool operator<=(const Rational& a, const Rational& b) { return a.v_ <= b.v_; }
    friend bool operator>(const Rational& a, const Rational& b) { return a.v_ > b.v_; }
    friend bool operator>=(const Rational& a, const Rational& b) { return a.v_ >= b.v_; }

private:
    mpq_class v_;
};

inline Rational Rational::parse(std::string_view s) {
    if (s.empty()) throw std::invalid_argument("Rational::parse: empty string");
    std::string t(s);
    // strip a leading '+': mpq set_str rejects it
    if (t[0] == '+') t.erase(0, 1);
    auto dot = t.find('.');
    Rational r;
    if (dot != std::string::npos) {
        if (t.find('/') != std::string::npos)
            throw std::invalid_argument("Rational::parse: mixed '/' and '.'");
        std::string digits = t.substr(0, dot) + t.substr(dot + 1);
        std::size_t frac_len = t.size() - dot - 1;
        if (digits.empty() || digits == "-")
            throw std::invalid_argument("Rational::parse: bad decimal '" + t + "'");
        mpz_class num;
        if (mpz_set_str(num.get_mpz_t(), digits.c_str(), 10) != 0)
            throw std::invalid_argument("Rational::parse: bad decimal '" + t + "'");
        mpz_class den;
        mpz_ui_pow_ui(den.get_mpz_t(), 10, frac_len);
        r.v_ = mpq_class(num) / mpq_class(den);
    } else {
        if (mpq_set_str(r.v_.get_mpq_t(), t.c_str(), 10) != 0)
            throw std::invalid_argument("Rational::parse: bad rational '" + t + "'");
        if (r.v_.get_den() == 0)
            throw std::invalid_argument("Rational::parse: zero denominator in '" + t + "'");
        r.v_.canonicalize();
    }
    return r;
}

}  // namespace lrpd
