#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lrpd/scalar.hpp"

namespace lrpd {

// Multivariate polynomial with rational coefficients over a fixed variable
// slate x1..xk (dense exponent vectors). Zero-coefficient terms are never
// stored.
class Poly {
public:
    using Expo = std::vector<unsigned>;

    Poly() = default;
    explicit Poly(std::size_t nvars) : nvars_(nvars) {}

    static Poly constant(std::size_t nvars, const Rational& c) {
        Poly p(nvars);
        p.add_term(Expo(nvars, 0), c);
        return p;
    }
    static Poly variable(std::size_t nvars, std::size_t idx);

    std::size_t nvars() const { return nvars_; }
    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const {
        return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first == Expo(nvars_, 0));
    }
    Rational constant_value() const {
        if (terms_.empty()) return Rational(0);
        auto it = terms_.find(Expo(nvars_, 0));
        return it == terms_.end() ? Rational(0) : it->second;
    }
    std::size_t total_degree() const;
    std::size_t degree_in(std::size_t var) const;
    bool is_affine() const { return total_degree() <= 1; }
    bool uses_var(std::size_t var) const { return degree_in(var) > 0; }

    void add_term(const Expo& e, const Rational& c);
    const std::map<Expo, Rational>& terms() const { return terms_; }

    Poly operator+(const Poly& o) const;
    Poly operator-(const Poly& o) const;
    Poly operator*(const Poly& o) const;
    Poly operator-() const;
    Poly operator*(const Rational& c) const;
    Poly& operator+=(const Poly& o) { return *this = *this + o; }
    Poly& operator-=(const Poly& o) { return *this = *this - o; }
    Poly pow(unsigned e) const;

    friend bool operator==(const Poly& a, const Poly& b) {
        return a.nvars_ == b.nvars_ && a.terms_ == b.terms_;
    }
    bool operator<(const Poly& o) const { return terms_ < o.terms_; }

    Rational eval(const std::vector<Rational>& x) const;
    double eval_double(const std::vector<double>& x) const;

    Poly derivative(std::size_t var) const;
    // substitute variable -> polynomial (same variable slate)
    Poly substitute(std::size_t var, const Poly& repl) const;

    // affine view: p = c0 + sum c_i x_i (valid only when is_affine())
    void affine_parts(Rational& c0, std::vector<Rational>& coeffs) const;

    std::string str(const std::vector<std::string>& names) const;

private:
    std::size_t nvars_ = 0;
    std::map<Expo, Rational> terms_;
};

// ring-literal helpers used by the generic determinant/adjugate templates
inline Poly zero_like(const Poly& x) { return Poly(x.nvars()); }
inline Poly one_like(const Poly& x) { return Poly::constant(x.nvars(), Rational(1)); }

struct PolySystem {
    std::size_t nvars = 0;
    std::vector<std::string> var_names;  // x1..xk when empty at print time
    std::vector<Poly> equations;         // each p means p = 0
    // variables whose sign is a gauge freedom (the z/y auxiliaries of the
    // square encodings); the solver reports only their principal branch
    std::vector<std::size_t> sign_canonical_vars;

    std::vector<bool> linear_mask() const {
        std::vector<bool> m(equations.size());
        for (std::size_t i = 0; i < equations.size(); ++i) m[i] = equations[i].is_affine();
        return m;
    }
    std::string var_name(std::size_t i) const {
        if (i < var_names.size()) return var_names[i];
        return "x" + std::to_string(i + 1);
    }
    std::vector<std::string> all_names() const {
        std::vector<std::string> n(nvars);
        for (std::size_t i = 0; i < nvars; ++i) n[i] = var_name(i);
        return n;
    }
};

// Text format: one equation per line, variables x1..xk, rational coefficients,
// '^' exponents, optional "lhs = rhs". '#' starts a comment.
PolySystem parse_poly_system(std::istream& in);
PolySystem parse_poly_system_text(const std::string& text);
std::string format_poly_system(const PolySystem& sys);

// ---------------------------------------------------------------------------
// Univariate machinery (exact backend): dense rational polynomials.

struct UPoly {
    std::vector<Rational> c;  // ascending; normalized (no trailing zeros)

    UPoly() = default;
    explicit UPoly(std::vector<Rational> coeffs) : c(std::move(coeffs)) { normalize(); }
    static UPoly constant(const Rational& v) { return UPoly({v}); }

    void normalize() {
        while (!c.empty() && c.back().is_zero()) c.pop_back();
    }
    bool is_zero() const { return c.empty(); }
    int degree() const { return static_cast<int>(c.size()) - 1; }  // -1 for zero
    const Rational& leading() const { return c.back(); }

    Rational eval(const Rational& x) const;

    UPoly operator+(const UPoly& o) const;
    UPoly operator-(const UPoly& o) const;
    UPoly operator*(const UPoly& o) const;
    UPoly operator-() const;
    UPoly derivative() const;
    // exact division; throws std::logic_error if not divisible
    UPoly divide_exact(const UPoly& d) const;
};

// polynomial remainder (standard, not fraction-free; rationals keep it exact)
UPoly upoly_rem(const UPoly& a, const UPoly& b);
UPoly upoly_gcd(UPoly a, UPoly b);  // monic gcd
UPoly square_free_part(const UPoly& p);

struct RootEnclosure {
    Rational lo, hi;               // lo < root <= hi (or lo == hi == exact root)
    std::optional<Rational> exact; // set when the root is an exactly known rational
};

// All real roots of p, isolated and refined to width <= width_goal.
// Complete: the returned list has exactly one entry per distinct real root.
std::vector<RootEnclosure> isolate_real_roots(const UPoly& p, const Rational& width_goal);

// Res_y(f, g) as a univariate polynomial in x. f, g must involve no variables
// other than xvar and yvar.
UPoly resultant_wrt(const Poly& f, const Poly& g, std::size_t xvar, std::size_t yvar);

// view of a (x,y)-polynomial as univariate in `var` with UPoly-in-`other` coefficients
std::vector<UPoly> upoly_coeffs(const Poly& p, std::size_t var, std::size_t other);
// univariate extraction when p uses only `var`
UPoly to_upoly(const Poly& p, std::size_t var);

}  // namespace lrpd
