#include "lrpd/poly.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>
#include <stdexcept>

#include "lrpd/matrix.hpp"

namespace lrpd {

// ---------------------------------------------------------------------------
// Poly

Poly Poly::variable(std::size_t nvars, std::size_t idx) {
    if (idx >= nvars) throw std::invalid_argument("Poly::variable: index out of range");
    Poly p(nvars);
    Expo e(nvars, 0);
    e[idx] = 1;
    p.add_term(e, Rational(1));
    return p;
}

std::size_t Poly::total_degree() const {
    std::size_t d = 0;
    for (const auto& [e, c] : terms_) {
        std::size_t t = 0;
        for (unsigned u : e) t += u;
        d = std::max(d, t);
    }
    return d;
}

std::size_t Poly::degree_in(std::size_t var) const {
    std::size_t d = 0;
    for (const auto& [e, c] : terms_) d = std::max(d, static_cast<std::size_t>(e[var]));
    return d;
}

void Poly::add_term(const Expo& e, const Rational& c) {
    if (e.size() != nvars_) throw std::invalid_argument("Poly::add_term: exponent size mismatch");
    if (c.is_zero()) return;
    auto [it, inserted] = terms_.emplace(e, c);
    if (!inserted) {
        it->second += c;
        if (it->second.is_zero()) terms_.erase(it);
    }
}

Poly Poly::operator+(const Poly& o) const {
    if (nvars_ != o.nvars_) throw std::invalid_argument("Poly: variable slate mismatch");
    Poly r = *this;
    for (const auto& [e, c] : o.terms_) r.add_term(e, c);
    return r;
}

Poly Poly::operator-(const Poly& o) const {
    if (nvars_ != o.nvars_) throw std::invalid_argument("Poly: variable slate mismatch");
    Poly r = *this;
    for (const auto& [e, c] : o.terms_) r.add_term(e, -c);
    return r;
}

Poly Poly::operator-() const {
    Poly r(nvars_);
    for (const auto& [e, c] : terms_) r.terms_.emplace(e, -c);
    return r;
}

Poly Poly::operator*(const Rational& c) const {
    Poly r(nvars_);
    if (c.is_zero()) return r;
    for (const auto& [e, v] : terms_) r.terms_.emplace(e, v * c);
    return r;
}

Poly Poly::operator*(const Poly& o) const {
    if (nvars_ != o.nvars_) throw std::invalid_argument("Poly: variable slate mismatch");
    Poly r(nvars_);
    Expo e(nvars_);
    for (const auto& [ea, ca] : terms_)
        for (const auto& [eb, cb] : o.terms_) {
            for (std::size_t i = 0; i < nvars_; ++i) e[i] = ea[i] + eb[i];
            r.add_term(e, ca * cb);
        }
    return r;
}

Poly Poly::pow(unsigned e) const {
    Poly r = Poly::constant(nvars_, Rational(1));
    Poly base = *this;
    while (e) {
        if (e & 1) r = r * base;
        base = base * base;
        e >>= 1;
    }
    return r;
}

Rational Poly::eval(const std::vector<Rational>& x) const {
    if (x.size() != nvars_) throw std::invalid_argument("Poly::eval: size mismatch");
    Rational acc(0);
    for (const auto& [e, c] : terms_) {
        Rational t = c;
        for (std::size_t i = 0; i < nvars_; ++i)
            for (unsigned k = 0; k < e[i]; ++k) t *= x[i];
        acc += t;
    }
    return acc;
}

double Poly::eval_double(const std::vector<double>& x) const {
    if (x.size() != nvars_) throw std::invalid_argument("Poly::eval_double: size mismatch");
    double acc = 0;
    for (const auto& [e, c] : terms_) {
        double t = c.to_double();
        for (std::size_t i = 0; i < nvars_; ++i)
            for (unsigned k = 0; k < e[i]; ++k) t *= x[i];
        acc += t;
    }
    return acc;
}

Poly Poly::derivative(std::size_t var) const {
    Poly r(nvars_);
    for (const auto& [e, c] : terms_) {
        if (e[var] == 0) continue;
        Expo de = e;
        de[var] -= 1;
        r.add_term(de, c * Rational(static_cast<long>(e[var])));
    }
    return r;
}

Poly Poly::substitute(std::size_t var, const Poly& repl) const {
    if (repl.nvars_ != nvars_) throw std::invalid_argument("Poly::substitute: slate mismatch");
    Poly r(nvars_);
    for (const auto& [e, c] : terms_) {
        Expo base = e;
        unsigned k = base[var];
        base[var] = 0;
        Poly term(nvars_);
        term.add_term(base, c);
        if (k) term = term * repl.pow(k);
        r += term;
    }
    return r;
}

void Poly::affine_parts(Rational& c0, std::vector<Rational>& coeffs) const {
    c0 = Rational(0);
    coeffs.assign(nvars_, Rational(0));
    for (const auto& [e, c] : terms_) {
        std::size_t deg = 0, var = 0;
        for (std::size_t i = 0; i < nvars_; ++i) {
            deg += e[i];
            if (e[i]) var = i;
        }
        if (deg == 0)
            c0 = c;
        else if (deg == 1)
            coeffs[var] = c;
        else
            throw std::logic_error("affine_parts: polynomial is not affine");
    }
}

std::string Poly::str(const std::vector<std::string>& names) const {
    if (terms_.empty()) return "0";
    std::ostringstream out;
    bool first = true;
    // print highest total degree first for readability
    std::vector<std::pair<Expo, Rational>> items(terms_.begin(), terms_.end());
    std::stable_sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
        std::size_t da = 0, db = 0;
        for (unsigned u : a.first) da += u;
        for (unsigned u : b.first) db += u;
        if (da != db) return da > db;
        return a.first > b.first;
    });
    for (const auto& [e, c] : items) {
        Rational a = c;
        if (first) {
            if (a.sign() < 0) {
                out << "-";
                a = -a;
            }
            first = false;
        } else {
            out << (a.sign() < 0 ? " - " : " + ");
            if (a.sign() < 0) a = -a;
        }
        bool any_var = false;
        for (unsigned u : e)
            if (u) any_var = true;
        if (!any_var || a != Rational(1)) out << a.str();
        bool star = !any_var || a != Rational(1);
        for (std::size_t i = 0; i < nvars_; ++i) {
            if (!e[i]) continue;
            if (star) out << "*";
            out << (i < names.size() ? names[i] : "x" + std::to_string(i + 1));
            if (e[i] > 1) out << "^" << e[i];
            star = true;
        }
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

struct Parser {
    std::string_view s;
    std::size_t pos = 0;
    std::size_t max_var = 0;   // 1-based max seen
    // polynomials are built over a large temporary slate, shrunk at the end
    static constexpr std::size_t kSlate = 64;

    void skip_ws() {
        while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
    }
    bool eat(char c) {
        skip_ws();
        if (pos < s.size() && s[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }
    char peek() {
        skip_ws();
        return pos < s.size() ? s[pos] : '\0';
    }

    Poly parse_expr() {
        Poly acc = parse_term();
        while (true) {
            char c = peek();
            if (c == '+') {
                ++pos;
                acc += parse_term();
            } else if (c == '-') {
                ++pos;
                acc -= parse_term();
            } else {
                break;
            }
        }
        return acc;
    }

    Poly parse_term() {
        Poly acc = parse_factor();
        while (true) {
            char c = peek();
            if (c == '*') {
                ++pos;
                acc = acc * parse_factor();
            } else if (c == 'x' || c == '(' || std::isdigit(static_cast<unsigned char>(c))) {
                // juxtaposition: "3x1", "2(x1+1)"
                acc = acc * parse_factor();
            } else {
                break;
            }
        }
        return acc;
    }

    Poly parse_factor() {
        Poly base = parse_base();
        if (peek() == '^') {
            ++pos;
            skip_ws();
            std::size_t start = pos;
            while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
            if (start == pos) throw std::invalid_argument("poly parse: missing exponent");
            unsigned e = static_cast<unsigned>(std::stoul(std::string(s.substr(start, pos - start))));
            return base.pow(e);
        }
        return base;
    }

    Poly parse_base() {
        char c = peek();
        if (c == '-') {
            ++pos;
            return -parse_factor();
        }
        if (c == '+') {
            ++pos;
            return parse_factor();
        }
        if (c == '(') {
            ++pos;
            Poly p = parse_expr();
            if (!eat(')')) throw std::invalid_argument("poly parse: missing ')'");
            return p;
        }
        if (c == 'x') {
            ++pos;
            std::size_t start = pos;
            while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
            if (start == pos) throw std::invalid_argument("poly parse: variable needs an index");
            std::size_t idx = std::stoull(std::string(s.substr(start, pos - start)));
            if (idx == 0 || idx > kSlate)
                throw std::invalid_argument("poly parse: variable index out of range");
            max_var = std::max(max_var, idx);
            return Poly::variable(kSlate, idx - 1);
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t start = pos;
            while (pos < s.size() &&
                   (std::isdigit(static_cast<unsigned char>(s[pos])) || s[pos] == '/' ||
                    s[pos] == '.'))
                ++pos;
            Rational v = Rational::parse(s.substr(start, pos - start));
            return Poly::constant(kSlate, v);
        }
        throw std::invalid_argument(std::string("poly parse: unexpected character '") + c + "'");
    }
};

Poly shrink_slate(const Poly& p, std::size_t nvars) {
    Poly out(nvars);
    for (const auto& [e, c] : p.terms()) {
        Poly::Expo se(nvars, 0);
        for (std::size_t i = 0; i < e.size(); ++i) {
            if (e[i] == 0) continue;
            if (i >= nvars) throw std::logic_error("shrink_slate: variable beyond slate");
            se[i] = e[i];
        }
        out.add_term(se, c);
    }
    return out;
}

}  // namespace

PolySystem parse_poly_system(std::istream& in) {
    std::vector<Poly> wide;
    std::size_t max_var = 0;
    std::string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        bool blank = true;
        for (char ch : line)
            if (!std::isspace(static_cast<unsigned char>(ch))) blank = false;
        if (blank) continue;

        auto eq = line.find('=');
        Parser lhs_parser;
        Poly p(Parser::kSlate);
        if (eq == std::string::npos) {
            lhs_parser.s = line;
            p = lhs_parser.parse_expr();
            lhs_parser.skip_ws();
            if (lhs_parser.pos != line.size())
                throw std::invalid_argument("poly parse: trailing characters in '" + line + "'");
            max_var = std::max(max_var, lhs_parser.max_var);
        } else {
            std::string lhs = line.substr(0, eq), rhs = line.substr(eq + 1);
            lhs_parser.s = lhs;
            Poly pl = lhs_parser.parse_expr();
            lhs_parser.skip_ws();
            if (lhs_parser.pos != lhs.size())
                throw std::invalid_argument("poly parse: trailing characters in '" + lhs + "'");
            Parser rhs_parser;
            rhs_parser.s = rhs;
            Poly pr = rhs_parser.parse_expr();
            rhs_parser.skip_ws();
            if (rhs_parser.pos != rhs.size())
                throw std::invalid_argument("poly parse: trailing characters in '" + rhs + "'");
            p = pl - pr;
            max_var = std::max({max_var, lhs_parser.max_var, rhs_parser.max_var});
        }
        wide.push_back(p);
    }
    PolySystem sys;
    sys.nvars = max_var;
    for (const auto& p : wide) sys.equations.push_back(shrink_slate(p, max_var));
    return sys;
}

PolySystem parse_poly_system_text(const std::string& text) {
    std::istringstream in(text);
    return parse_poly_system(in);
}

std::string format_poly_system(const PolySystem& sys) {
    std::ostringstream out;
    auto names = sys.all_names();
    for (const auto& p : sys.equations) out << p.str(names) << " = 0\n";
    return out.str();
}

// ---------------------------------------------------------------------------
// UPoly

Rational UPoly::eval(const Rational& x) const {
    Rational acc(0);
    for (std::size_t i = c.size(); i-- > 0;) acc = acc * x + c[i];
    return acc;
}

UPoly UPoly::operator+(const UPoly& o) const {
    std::vector<Rational> r(std::max(c.size(), o.c.size()), Rational(0));
    for (std::size_t i = 0; i < c.size(); ++i) r[i] += c[i];
    for (std::size_t i = 0; i < o.c.size(); ++i) r[i] += o.c[i];
    return UPoly(std::move(r));
}

UPoly UPoly::operator-(const UPoly& o) const {
    std::vector<Rational> r(std::max(c.size(), o.c.size()), Rational(0));
    for (std::size_t i = 0; i < c.size(); ++i) r[i] += c[i];
    for (std::size_t i = 0; i < o.c.size(); ++i) r[i] -= o.c[i];
    return UPoly(std::move(r));
}

UPoly UPoly::operator*(const UPoly& o) const {
    if (is_zero() || o.is_zero()) return UPoly();
    std::vector<Rational> r(c.size() + o.c.size() - 1, Rational(0));
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (c[i].is_zero()) continue;
        for (std::size_t j = 0; j < o.c.size(); ++j) r[i + j] += c[i] * o.c[j];
    }
    return UPoly(std::move(r));
}

UPoly UPoly::operator-() const {
    UPoly r = *this;
    for (auto& v : r.c) v = -v;
    return r;
}

UPoly UPoly::derivative() const {
    if (c.size() <= 1) return UPoly();
    std::vector<Rational> r(c.size() - 1);
    for (std::size_t i = 1; i < c.size(); ++i) r[i - 1] = c[i] * Rational(static_cast<long>(i));
    return UPoly(std::move(r));
}

UPoly UPoly::divide_exact(const UPoly& d) const {
    if (d.is_zero()) throw std::logic_error("UPoly::divide_exact: division by zero poly");
    UPoly rem = *this;
    if (rem.is_zero()) return UPoly();
    if (rem.degree() < d.degree()) throw std::logic_error("UPoly::divide_exact: not divisible");
    std::vector<Rational> q(rem.degree() - d.degree() + 1, Rational(0));
    while (!rem.is_zero() && rem.degree() >= d.degree()) {
        std::size_t shift = rem.degree() - d.degree();
        Rational f = rem.leading() / d.leading();
        q[shift] = f;
        for (std::size_t i = 0; i < d.c.size(); ++i) rem.c[i + shift] -= f * d.c[i];
        rem.normalize();
    }
    if (!rem.is_zero()) throw std::logic_error("UPoly::divide_exact: nonzero remainder");
    return UPoly(std::move(q));
}

UPoly upoly_rem(const UPoly& a, const UPoly& b) {
    if (b.is_zero()) throw std::logic_error("upoly_rem: division by zero poly");
    UPoly rem = a;
    while (!rem.is_zero() && rem.degree() >= b.degree()) {
        std::size_t shift = rem.degree() - b.degree();
        Rational f = rem.leading() / b.leading();
        for (std::size_t i = 0; i < b.c.size(); ++i) rem.c[i + shift] -= f * b.c[i];
        rem.normalize();
    }
    return rem;
}

UPoly upoly_gcd(UPoly a, UPoly b) {
    while (!b.is_zero()) {
        UPoly r = upoly_rem(a, b);
        a = std::move(b);
        b = std::move(r);
    }
    if (!a.is_zero()) {
        Rational lead = a.leading();
        for (auto& v : a.c) v /= lead;
    }
    return a;
}

UPoly square_free_part(const UPoly& p) {
    if (p.degree() <= 1) return p;
    UPoly g = upoly_gcd(p, p.derivative());
    if (g.degree() <= 0) return p;
    return p.divide_exact(g);
}

namespace {

int sign_changes(const std::vector<UPoly>& chain, const Rational& x) {
    int changes = 0, last = 0;
    for (const auto& p : chain) {
        int s = p.eval(x).sign();
        if (s == 0) continue;
        if (last != 0 && s != last) ++changes;
        last = s;
    }
    return changes;
}

std::vector<UPoly> sturm_chain(const UPoly& p) {
    std::vector<UPoly> chain;
    chain.push_back(p);
    UPoly d = p.derivative();
    if (!d.is_zero()) chain.push_back(d);
    while (chain.size() >= 2) {
        UPoly r = upoly_rem(chain[chain.size() - 2], chain.back());
        if (r.is_zero()) break;
        chain.push_back(-r);
    }
    return chain;
}

}  // namespace

std::vector<RootEnclosure> isolate_real_roots(const UPoly& p_in, const Rational& width_goal) {
    std::vector<RootEnclosure> out;
    if (p_in.is_zero()) throw std::invalid_argument("isolate_real_roots: zero polynomial");
    UPoly p = square_free_part(p_in);
    if (p.degree() == 0) return out;

    // Cauchy bound rounded up to a power of two so dyadic roots land exactly
    // on bisection midpoints.
    Rational bound(1);
    for (const auto& coef : p.c) {
        Rational t = coef.abs() / p.leading().abs();
        if (t > bound) bound = t;
    }
    bound += Rational(1);
    Rational b2(2);
    while (b2 < bound) b2 *= Rational(2);

    auto chain = sturm_chain(p);
    auto count = [&](const Rational& a, const Rational& b) {
        return sign_changes(chain, a) - sign_changes(chain, b);
    };

    struct Box {
        Rational lo, hi;
        int roots;
    };
    std::vector<Box> work{{-b2, b2, count(-b2, b2)}};
    std::vector<Box> isolated;
    while (!work.empty()) {
        Box box = work.back();
        work.pop_back();
        if (box.roots == 0) continue;
        Rational mid = (box.lo + box.hi) / Rational(2);
        if (box.roots == 1) {
            isolated.push_back(box);
            continue;
        }
        if (p.eval(mid).is_zero()) {
            out.push_back({mid, mid, mid});
            // split strictly around the exact root
            int left = count(box.lo, mid) - 1;  // mid itself counted in (lo, mid]
            int right = count(mid, box.hi);
            if (left > 0) work.push_back({box.lo, mid, left});
            if (right > 0) work.push_back({mid, box.hi, right});
            continue;
        }
        int left = count(box.lo, mid);
        int right = box.roots - left;
        if (left > 0) work.push_back({box.lo, mid, left});
        if (right > 0) work.push_back({mid, box.hi, right});
    }

    for (auto& box : isolated) {
        // refine (lo, hi] with exactly one root to the width goal
        while (box.hi - box.lo > width_goal) {
            Rational mid = (box.lo + box.hi) / Rational(2);
            Rational v = p.eval(mid);
            if (v.is_zero()) {
                out.push_back({mid, mid, mid});
                box.roots = 0;
                break;
            }
            if (count(box.lo, mid) == 1)
                box.hi = mid;
            else
                box.lo = mid;
        }
        if (box.roots == 1) {
            if (p.eval(box.hi).is_zero())
                out.push_back({box.hi, box.hi, box.hi});
            else
                out.push_back({box.lo, box.hi, std::nullopt});
        }
    }

    std::sort(out.begin(), out.end(),
              [](const RootEnclosure& a, const RootEnclosure& b) { return a.hi < b.hi; });
    return out;
}

// ---------------------------------------------------------------------------
// Resultants

std::vector<UPoly> upoly_coeffs(const Poly& p, std::size_t var, std::size_t other) {
    std::size_t dv = p.degree_in(var);
    std::vector<std::vector<Rational>> acc(dv + 1);
    for (const auto& [e, c] : p.terms()) {
        for (std::size_t i = 0; i < e.size(); ++i)
            if (e[i] && i != var && i != other)
                throw std::invalid_argument("upoly_coeffs: extra variable present");
        unsigned kv = e[var];
        unsigned ko = e[other];
        auto& coeffs = acc[kv];
        if (coeffs.size() <= ko) coeffs.resize(ko + 1, Rational(0));
        coeffs[ko] += c;
    }
    std::vector<UPoly> out(dv + 1);
    for (std::size_t i = 0; i <= dv; ++i) out[i] = UPoly(std::move(acc[i]));
    return out;
}

UPoly to_upoly(const Poly& p, std::size_t var) {
    std::vector<Rational> coeffs(p.degree_in(var) + 1, Rational(0));
    for (const auto& [e, c] : p.terms()) {
        for (std::size_t i = 0; i < e.size(); ++i)
            if (e[i] && i != var) throw std::invalid_argument("to_upoly: extra variable present");
        coeffs[e[var]] += c;
    }
    return UPoly(std::move(coeffs));
}

namespace {

// Bareiss fraction-free determinant over the UPoly ring (exact divisions).
UPoly upoly_mat_det(std::vector<std::vector<UPoly>> m) {
    const std::size_t n = m.size();
    if (n == 0) return UPoly::constant(Rational(1));
    bool negate = false;
    UPoly prev = UPoly::constant(Rational(1));
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (m[k][k].is_zero()) {
            std::size_t swap_row = n;
            for (std::size_t i = k + 1; i < n; ++i)
                if (!m[i][k].is_zero()) {
                    swap_row = i;
                    break;
                }
            if (swap_row == n) return UPoly();  // singular column -> zero determinant
            std::swap(m[k], m[swap_row]);
            negate = !negate;
        }
        for (std::size_t i = k + 1; i < n; ++i)
            for (std::size_t j = k + 1; j < n; ++j) {
                UPoly num = m[k][k] * m[i][j] - m[i][k] * m[k][j];
                m[i][j] = num.is_zero() ? UPoly() : num.divide_exact(prev);
            }
        prev = m[k][k];
    }
    UPoly d = m[n - 1][n - 1];
    return negate ? -d : d;
}

}  // namespace

UPoly resultant_wrt(const Poly& f, const Poly& g, std::size_t xvar, std::size_t yvar) {
    auto fc = upoly_coeffs(f, yvar, xvar);  // f as poly in y, coeffs UPoly in x
    auto gc = upoly_coeffs(g, yvar, xvar);
    const std::size_t df = fc.size() - 1, dg = gc.size() - 1;
    if (df == 0 && dg == 0)
        throw std::invalid_argument("resultant_wrt: both polynomials constant in the variable");
    const std::size_t n = df + dg;
    std::vector<std::vector<UPoly>> syl(n, std::vector<UPoly>(n));
    for (std::size_t r = 0; r < dg; ++r)
        for (std::size_t k = 0; k <= df; ++k) syl[r][r + k] = fc[df - k];
    for (std::size_t r = 0; r < df; ++r)
        for (std::size_t k = 0; k <= dg; ++k) syl[dg + r][r + k] = gc[dg - k];
    return upoly_mat_det(std::move(syl));
}

}  // namespace lrpd
