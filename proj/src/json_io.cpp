#include "lrpd/json_io.hpp"

#include <fstream>
#include <sstream>

namespace lrpd {

using nlohmann::json;

namespace {

json pattern_to_json(const Pattern& p) {
    json arr = json::array();
    for (auto [i, j] : p) arr.push_back({i + 1, j + 1});
    return arr;
}

Pattern pattern_from_json(const json& arr) {
    Pattern p;
    for (const auto& e : arr) {
        if (!e.is_array() || e.size() != 2) throw ParseError("pattern: expected [i, j] pairs");
        std::size_t i = e[0].get<std::size_t>(), j = e[1].get<std::size_t>();
        if (i == 0 || j == 0) throw ParseError("pattern: pairs are 1-indexed");
        p.push_back({i - 1, j - 1});
    }
    return p;
}

const char* kind_str(ProblemKind k) { return kind_name(k); }

ProblemKind kind_from(const std::string& s) {
    if (s == "P1") return ProblemKind::P1;
    if (s == "P2") return ProblemKind::P2;
    if (s == "P3") return ProblemKind::P3;
    throw ParseError("unknown problem kind '" + s + "'");
}

template <class T>
json common_instance_json(const Instance<T>& inst, const char* mode) {
    json j;
    j["kind"] = kind_str(inst.kind);
    j["mode"] = mode;
    j["n"] = inst.a.n();
    json mat = json::array();
    for (const auto& v : inst.a.lower()) {
        if constexpr (is_exact_v<T>)
            mat.push_back(v.str());
        else
            mat.push_back(v);
    }
    j["matrix"] = mat;
    if (inst.kind == ProblemKind::P3) j["pattern"] = pattern_to_json(inst.pattern);
    j["r"] = inst.r;
    j["eps"] = inst.eps;
    j["sparsity_constrained"] = inst.sparsity_constrained;
    if (!inst.provenance.empty()) j["provenance"] = inst.provenance;
    if (inst.arrow_block) j["arrow_block"] = *inst.arrow_block;
    return j;
}

template <class T>
Instance<T> common_instance_from(const json& j) {
    Instance<T> inst;
    inst.kind = kind_from(j.at("kind").get<std::string>());
    std::size_t n = j.at("n").get<std::size_t>();
    const auto& mat = j.at("matrix");
    if (!mat.is_array() || mat.size() != n * (n + 1) / 2)
        throw ParseError("matrix: expected n(n+1)/2 lower-triangle entries");
    std::vector<T> lower;
    lower.reserve(mat.size());
    for (const auto& e : mat) {
        if constexpr (is_exact_v<T>) {
            if (e.is_string())
                lower.push_back(Rational::parse(e.get<std::string>()));
            else if (e.is_number_integer())
                lower.push_back(Rational(e.get<long long>()));
            else
                throw ParseError("exact matrix entries must be rational strings or integers");
        } else {
            lower.push_back(e.get<double>());
        }
    }
    inst.a = SymMat<T>(n, std::move(lower));
    if (j.contains("pattern")) inst.pattern = pattern_from_json(j.at("pattern"));
    inst.r = j.at("r").get<std::size_t>();
    inst.eps = j.value("eps", 0.0);
    inst.sparsity_constrained = j.value("sparsity_constrained", false);
    inst.provenance = j.value("provenance", std::string{});
    if (j.contains("arrow_block")) inst.arrow_block = j.at("arrow_block").get<std::size_t>();
    inst.validate();
    return inst;
}

}  // namespace

json instance_to_json(const Instance<Rational>& inst) {
    return common_instance_json(inst, "exact");
}
json instance_to_json(const Instance<double>& inst) {
    return common_instance_json(inst, "float");
}

AnyInstance instance_from_json(const json& j) {
    std::string mode = j.value("mode", "exact");
    if (mode == "exact") return common_instance_from<Rational>(j);
    if (mode == "float") return common_instance_from<double>(j);
    throw ParseError("unknown mode '" + mode + "'");
}

namespace {

template <class T>
json common_dec_json(const Decomposition<T>& dec, const std::string& hash, const char* mode) {
    json j;
    j["mode"] = mode;
    if (!hash.empty()) j["instance_hash"] = hash;
    auto scal = [](const T& v) -> json {
        if constexpr (is_exact_v<T>)
            return v.str();
        else
            return v;
    };
    if (!dec.d.empty()) {
        json d = json::array();
        for (const auto& v : dec.d) d.push_back(scal(v));
        j["d"] = d;
    }
    if (dec.l) {
        json l = json::array();
        for (const auto& v : dec.l->lower()) l.push_back(scal(v));
        j["l"] = l;
        j["l_n"] = dec.l->n();
    }
    if (dec.u) {
        json u = json::array();
        for (std::size_t i = 0; i < dec.u->rows(); ++i)
            for (std::size_t c = 0; c < dec.u->cols(); ++c) u.push_back(scal((*dec.u)(i, c)));
        j["u"] = u;
        j["u_rows"] = dec.u->rows();
        j["u_cols"] = dec.u->cols();
    }
    j["achieved_rank"] = dec.achieved_rank;
    j["residual"] = dec.residual;
    j["exact"] = dec.exact;
    return j;
}

template <class T>
Decomposition<T> common_dec_from(const json& j) {
    Decomposition<T> dec;
    auto scal = [](const json& e) -> T {
        if constexpr (is_exact_v<T>) {
            if (e.is_string()) return Rational::parse(e.get<std::string>());
            if (e.is_number_integer()) return Rational(e.get<long long>());
            throw ParseError("exact decomposition entries must be rational strings");
        } else {
            return e.get<double>();
        }
    };
    if (j.contains("d"))
        for (const auto& e : j.at("d")) dec.d.push_back(scal(e));
    if (j.contains("l")) {
        std::size_t n = j.at("l_n").get<std::size_t>();
        std::vector<T> lower;
        for (const auto& e : j.at("l")) lower.push_back(scal(e));
        dec.l = SymMat<T>(n, std::move(lower));
    }
    if (j.contains("u")) {
        std::size_t rows = j.at("u_rows").get<std::size_t>(), cols = j.at("u_cols").get<std::size_t>();
        Mat<T> u(rows, cols);
        const auto& arr = j.at("u");
        if (arr.size() != rows * cols) throw ParseError("u: size mismatch");
        std::size_t t = 0;
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t c = 0; c < cols; ++c) u(i, c) = scal(arr[t++]);
        dec.u = std::move(u);
    }
    dec.achieved_rank = j.value("achieved_rank", 0u);
    dec.residual = j.value("residual", 0.0);
    dec.exact = j.value("exact", is_exact_v<T>);
    return dec;
}

}  // namespace

json decomposition_to_json(const Decomposition<Rational>& dec, const std::string& hash) {
    return common_dec_json(dec, hash, "exact");
}
json decomposition_to_json(const Decomposition<double>& dec, const std::string& hash) {
    return common_dec_json(dec, hash, "float");
}

AnyDecomposition decomposition_from_json(const json& j) {
    std::string mode = j.value("mode", "exact");
    if (mode == "exact") return common_dec_from<Rational>(j);
    if (mode == "float") return common_dec_from<double>(j);
    throw ParseError("unknown mode '" + mode + "'");
}

json partial_matrix_to_json(const PartialMatrix& pm) {
    json j;
    j["n"] = pm.n;
    json sp = json::array();
    for (const auto& [pair, val] : pm.specified)
        sp.push_back({pair.first + 1, pair.second + 1, val.str()});
    j["specified"] = sp;
    return j;
}

PartialMatrix partial_matrix_from_json(const json& j) {
    PartialMatrix pm;
    pm.n = j.at("n").get<std::size_t>();
    for (const auto& e : j.at("specified")) {
        if (!e.is_array() || e.size() != 3) throw ParseError("specified: expected [i, j, value]");
        std::size_t i = e[0].get<std::size_t>(), jj = e[1].get<std::size_t>();
        if (i == 0 || jj == 0 || i > pm.n || jj > pm.n)
            throw ParseError("specified: indices out of range");
        Rational v = e[2].is_string() ? Rational::parse(e[2].get<std::string>())
                                      : Rational(e[2].get<long long>());
        auto key = std::make_pair(std::min(i, jj) - 1, std::max(i, jj) - 1);
        pm.specified[key] = v;
    }
    return pm;
}

std::string content_hash(const json& j) {
    std::string dump = j.dump();  // nlohmann objects iterate in sorted key order
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : dump) {
        h ^= c;
        h *= 1099511628211ull;
    }
    std::ostringstream os;
    os << "fnv1a64-" << std::hex << h;
    return os.str();
}

// ---------------------------------------------------------------------------
// matrix text format

AnyMatrix read_matrix_text(std::istream& in) {
    // JSON array-of-arrays is accepted as an alternative
    std::string all((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    std::istringstream ss(all);
    char first = 0;
    ss >> first;
    if (first == '[') {
        json j = json::parse(all);
        std::size_t n = j.size();
        bool exact = false;
        for (const auto& row : j)
            for (const auto& e : row)
                if (e.is_string()) exact = true;
        if (exact) {
            Mat<Rational> m(n, n);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t c = 0; c < n; ++c) {
                    const auto& e = j[i][c];
                    m(i, c) = e.is_string() ? Rational::parse(e.get<std::string>())
                                            : Rational(e.get<long long>());
                }
            return SymMat<Rational>::from_dense(m);
        }
        Mat<double> m(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t c = 0; c < n; ++c) m(i, c) = j[i][c].get<double>();
        return SymMat<double>::from_dense(m);
    }

    std::istringstream ls(all);
    std::size_t n = 0;
    std::string mode;
    if (!(ls >> n >> mode)) throw ParseError("matrix text: expected 'n mode' header");
    const std::size_t count = n * (n + 1) / 2;
    if (mode == "exact") {
        std::vector<Rational> lower;
        lower.reserve(count);
        std::string tok;
        while (lower.size() < count && (ls >> tok)) lower.push_back(Rational::parse(tok));
        if (lower.size() != count) throw ParseError("matrix text: not enough entries");
        return SymMat<Rational>(n, std::move(lower));
    }
    if (mode == "float") {
        std::vector<double> lower;
        lower.reserve(count);
        double v;
        while (lower.size() < count && (ls >> v)) lower.push_back(v);
        if (lower.size() != count) throw ParseError("matrix text: not enough entries");
        return SymMat<double>(n, std::move(lower));
    }
    throw ParseError("matrix text: mode must be 'exact' or 'float'");
}

std::string matrix_to_text(const SymMat<Rational>& m) {
    std::ostringstream os;
    os << m.n() << " exact\n";
    std::size_t t = 0;
    for (std::size_t i = 0; i < m.n(); ++i) {
        for (std::size_t j = 0; j <= i; ++j) os << m.lower()[t++].str() << (j == i ? "" : " ");
        os << "\n";
    }
    return os.str();
}

std::string matrix_to_text(const SymMat<double>& m) {
    std::ostringstream os;
    os << m.n() << " float\n";
    std::size_t t = 0;
    for (std::size_t i = 0; i < m.n(); ++i) {
        for (std::size_t j = 0; j <= i; ++j)
            os << scalar_traits<double>::str(m.lower()[t++]) << (j == i ? "" : " ");
        os << "\n";
    }
    return os.str();
}

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ParseError("json parse error in " + path + ": " + e.what());
    }
    return j;
}

void save_json_file(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << j.dump(2) << "\n";
}

std::string load_text_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open file: " + path);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

void save_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << text;
}

}  // namespace lrpd
