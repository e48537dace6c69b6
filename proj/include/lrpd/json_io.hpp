#pragma once

#include <iosfwd>
#include <string>
#include <variant>

#include <json.hpp>

#include "lrpd/instance.hpp"
#include "lrpd/poly.hpp"
#include "lrpd/reductions.hpp"

namespace lrpd {

using AnyInstance = std::variant<Instance<Rational>, Instance<double>>;
using AnyDecomposition = std::variant<Decomposition<Rational>, Decomposition<double>>;

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Instance files: one JSON document per instance. Exact mode stores entries
// as rational strings so round trips are lossless; float mode stores binary64
// values (shortest round-trip via the JSON writer). Pairs are 1-indexed, like
// the graph text formats.
nlohmann::json instance_to_json(const Instance<Rational>& inst);
nlohmann::json instance_to_json(const Instance<double>& inst);
AnyInstance instance_from_json(const nlohmann::json& j);

nlohmann::json decomposition_to_json(const Decomposition<Rational>& dec,
                                     const std::string& instance_hash);
nlohmann::json decomposition_to_json(const Decomposition<double>& dec,
                                     const std::string& instance_hash);
AnyDecomposition decomposition_from_json(const nlohmann::json& j);

nlohmann::json partial_matrix_to_json(const PartialMatrix& pm);
PartialMatrix partial_matrix_from_json(const nlohmann::json& j);

// FNV-1a 64 over the canonical (sorted-key, compact) dump
std::string content_hash(const nlohmann::json& j);

// Matrix text format: first line "n mode", then n(n+1)/2 lower-triangle
// entries row-major, rationals as p/q. A JSON array-of-arrays is accepted too.
using AnyMatrix = std::variant<SymMat<Rational>, SymMat<double>>;
AnyMatrix read_matrix_text(std::istream& in);
std::string matrix_to_text(const SymMat<Rational>& m);
std::string matrix_to_text(const SymMat<double>& m);

nlohmann::json load_json_file(const std::string& path);
void save_json_file(const std::string& path, const nlohmann::json& j);
std::string load_text_file(const std::string& path);
void save_text_file(const std::string& path, const std::string& text);

}  // namespace lrpd
