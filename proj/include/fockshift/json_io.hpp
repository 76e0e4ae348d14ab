#pragma once

#include <string>
#include <unordered_map>

#include <json.hpp>

#include "fockshift/freeword.hpp"
#include "fockshift/hardy.hpp"
#include "fockshift/model.hpp"
#include "fockshift/weights.hpp"

namespace fockshift {

// Insertion-ordered JSON so every report serialises with a fixed field order.
using ojson = nlohmann::ordered_json;

// Weight spec: {"n": int, "kind": "unit|besov|dirichlet|harmonic|harmonic_sq|
// inverse_square|constant|series|tabulated|levels|chain|indexed", "s": float?,
// "rho": float?, "table": {"1.2": mu}?, "series": {"coeffs": {...}, "s": f}?,
// "cap": int?, "mu": [..]?, "norms": [..]?, "values": [..]?,
// "zero_beyond": bool?, "allow_any_pattern": bool?}.
WeightSequence weights_from_json(const ojson& j);

// {"n": int, "d": int, "matrices": [[[re,im],...],...]}: n row-major d x d
// matrices; entries either [re,im] or a bare real number.
OperatorTuple tuple_from_json(const ojson& j);

// {"coeffs": {"1.2": [re,im], "e": c0, ...}}, word keys dot-separated.
Symbol symbol_from_json(int n, const ojson& j);

// {"coeffs": {"k1,k2": [re,im], ...}}, multi-index keys comma-separated.
std::unordered_map<MultiIndex, Complex, WordHash> multi_coeffs_from_json(int n, const ojson& j);

Complex parse_complex(const std::string& text);  // "0.6", "-0.5+0.25i", "2i"
Point parse_point(const std::string& text);      // comma-separated components

ojson complex_to_json(Complex z);  // [re, im]

// 17 significant digits, non-finite values as strings; "%.17g".
std::string format_float(double v);

// Deterministic dump: fixed field order (insertion), floats via format_float,
// no whitespace. nlohmann's own dump uses shortest-roundtrip floats, which
// the report contract pins down harder than that.
std::string dump_deterministic(const ojson& j);

ojson load_json_file(const std::string& path);  // errors: io, malformed-json

}  // namespace fockshift
