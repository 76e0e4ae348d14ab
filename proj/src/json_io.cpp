#include "fockshift/json_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <vector>

#include "fockshift/errors.hpp"

namespace fockshift {

namespace {

double to_double(const std::string& s) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    require(pos == s.size(), "bad-point", "trailing junk in number \"" + s + "\"");
    return v;
  } catch (const std::invalid_argument&) {
    fail("bad-point", "unparseable number \"" + s + "\"");
  } catch (const std::out_of_range&) {
    fail("bad-point", "number out of range \"" + s + "\"");
  }
}

std::string trimmed(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

double json_number(const ojson& j, const std::string& what) {
  require(j.is_number(), "malformed-json", what + " must be a number");
  return j.get<double>();
}

int json_int(const ojson& j, const std::string& what) {
  require(j.is_number_integer(), "malformed-json", what + " must be an integer");
  return j.get<int>();
}

std::vector<double> json_doubles(const ojson& j, const std::string& what) {
  require(j.is_array(), "malformed-json", what + " must be an array of numbers");
  std::vector<double> out;
  for (const auto& v : j) out.push_back(json_number(v, what + " entry"));
  return out;
}

Complex json_to_complex(const ojson& j, const std::string& what) {
  if (j.is_number()) return Complex(j.get<double>(), 0.0);
  require(j.is_array() && j.size() == 2, "malformed-json", what + " must be [re, im] or a number");
  return Complex(json_number(j[0], what), json_number(j[1], what));
}

void dump_rec(const ojson& j, std::string& out) {
  switch (j.type()) {
    case ojson::value_t::object: {
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        out += ojson(it.key()).dump();
        out += ':';
        dump_rec(it.value(), out);
      }
      out += '}';
      break;
    }
    case ojson::value_t::array: {
      out += '[';
      bool first = true;
      for (const auto& v : j) {
        if (!first) out += ',';
        first = false;
        dump_rec(v, out);
      }
      out += ']';
      break;
    }
    case ojson::value_t::string:
      out += j.dump();
      break;
    case ojson::value_t::boolean:
      out += j.get<bool>() ? "true" : "false";
      break;
    case ojson::value_t::number_integer:
      out += std::to_string(j.get<long long>());
      break;
    case ojson::value_t::number_unsigned:
      out += std::to_string(j.get<unsigned long long>());
      break;
    case ojson::value_t::number_float: {
      const double v = j.get<double>();
      if (!std::isfinite(v)) {
        out += '"';
        out += format_float(v);
        out += '"';
      } else {
        out += format_float(v);
      }
      break;
    }
    default:
      out += "null";
  }
}

}  // namespace

WeightSequence weights_from_json(const ojson& j) {
  require(j.is_object(), "malformed-json", "weight spec must be a JSON object");
  require(j.contains("n"), "malformed-json", "weight spec needs \"n\"");
  require(j.contains("kind"), "malformed-json", "weight spec needs \"kind\"");
  const int n = json_int(j["n"], "\"n\"");
  require(j["kind"].is_string(), "malformed-json", "\"kind\" must be a string");
  const std::string kind = j["kind"].get<std::string>();

  const auto param = [&](const char* field) {
    require(j.contains(field), "malformed-json",
            "kind \"" + kind + "\" needs \"" + field + "\"");
    return json_number(j[field], std::string("\"") + field + "\"");
  };

  if (kind == "unit") return WeightSequence::unit(n);
  if (kind == "besov") return WeightSequence::besov(n, param("s"));
  if (kind == "dirichlet") return WeightSequence::dirichlet_scale(n, param("s"));
  if (kind == "harmonic") return WeightSequence::harmonic(n);
  if (kind == "harmonic_sq") return WeightSequence::harmonic_squared(n);
  if (kind == "inverse_square") return WeightSequence::inverse_square(n);
  if (kind == "constant")
    return WeightSequence::constant(n, j.contains("rho") ? param("rho") : param("s"));
  if (kind == "tabulated") {
    require(j.contains("table") && j["table"].is_object(), "malformed-json",
            "tabulated weights need a \"table\" object");
    std::unordered_map<Word, double, WordHash> table;
    for (const auto& [key, val] : j["table"].items())
      table[parse_word(key, n)] = json_number(val, "table entry");
    const bool any = j.value("allow_any_pattern", false);
    const int cap = j.contains("cap") ? json_int(j["cap"], "\"cap\"") : -1;
    return WeightSequence::tabulated(n, std::move(table), any, cap);
  }
  if (kind == "series") {
    require(j.contains("series") && j["series"].is_object(), "malformed-json",
            "series weights need a \"series\" object");
    const ojson& s = j["series"];
    require(s.contains("coeffs") && s["coeffs"].is_object(), "malformed-json",
            "series needs \"coeffs\"");
    std::unordered_map<Word, double, WordHash> phi;
    for (const auto& [key, val] : s["coeffs"].items())
      phi[parse_word(key, n)] = json_number(val, "series coefficient");
    const double sv = s.contains("s") ? json_number(s["s"], "series \"s\"") : 1.0;
    const int cap = j.contains("cap") ? json_int(j["cap"], "\"cap\"") : default_limits().max_N;
    return WeightSequence::series(n, phi, sv, cap);
  }
  if (kind == "levels") {
    require(j.contains("mu"), "malformed-json", "levels weights need \"mu\"");
    return WeightSequence::from_levels(n, json_doubles(j["mu"], "\"mu\""),
                                       j.value("zero_beyond", false));
  }
  if (kind == "chain") {
    require(j.contains("norms"), "malformed-json", "chain weights need \"norms\"");
    return WeightSequence::from_chain_levels(n, json_doubles(j["norms"], "\"norms\""),
                                             j.value("zero_beyond", false));
  }
  if (kind == "indexed") {
    require(j.contains("cap") && j.contains("values"), "malformed-json",
            "indexed weights need \"cap\" and \"values\"");
    return WeightSequence::from_index_values(n, json_int(j["cap"], "\"cap\""),
                                             json_doubles(j["values"], "\"values\""));
  }
  fail("malformed-json", "unknown weight kind \"" + kind + "\"");
}

OperatorTuple tuple_from_json(const ojson& j) {
  require(j.is_object(), "malformed-json", "tuple spec must be a JSON object");
  require(j.contains("n") && j.contains("d") && j.contains("matrices"), "malformed-json",
          "tuple spec needs \"n\", \"d\", \"matrices\"");
  const int n = json_int(j["n"], "\"n\"");
  const int d = json_int(j["d"], "\"d\"");
  const ojson& mats = j["matrices"];
  require(mats.is_array() && static_cast<int>(mats.size()) == n, "malformed-json",
          "\"matrices\" must hold n matrices");
  std::vector<Eigen::MatrixXcd> out;
  for (const auto& mj : mats) {
    require(mj.is_array() && static_cast<int>(mj.size()) == d, "malformed-json",
            "each matrix must have d rows");
    Eigen::MatrixXcd m(d, d);
    for (int r = 0; r < d; ++r) {
      const ojson& row = mj[static_cast<std::size_t>(r)];
      require(row.is_array() && static_cast<int>(row.size()) == d, "malformed-json",
              "each matrix row must have d entries");
      for (int c = 0; c < d; ++c)
        m(r, c) = json_to_complex(row[static_cast<std::size_t>(c)], "matrix entry");
    }
    out.push_back(std::move(m));
  }
  return make_tuple(n, d, std::move(out));
}

Symbol symbol_from_json(int n, const ojson& j) {
  require(j.is_object() && j.contains("coeffs") && j["coeffs"].is_object(), "malformed-json",
          "symbol spec must be {\"coeffs\": {...}}");
  Symbol s = make_symbol(n);
  for (const auto& [key, val] : j["coeffs"].items())
    symbol_add_term(s, parse_word(key, n), json_to_complex(val, "coefficient"));
  return s;
}

std::unordered_map<MultiIndex, Complex, WordHash> multi_coeffs_from_json(int n, const ojson& j) {
  require(j.is_object() && j.contains("coeffs") && j["coeffs"].is_object(), "malformed-json",
          "coefficient spec must be {\"coeffs\": {...}}");
  std::unordered_map<MultiIndex, Complex, WordHash> out;
  for (const auto& [key, val] : j["coeffs"].items())
    out[parse_multi(key, n)] = json_to_complex(val, "coefficient");
  return out;
}

Complex parse_complex(const std::string& text) {
  std::string s = trimmed(text);
  require(!s.empty(), "bad-point", "empty number");
  if (s.back() != 'i' && s.back() != 'I') return Complex(to_double(s), 0.0);
  s.pop_back();
  std::size_t split = std::string::npos;
  for (std::size_t p = s.size(); p-- > 1;) {
    if ((s[p] == '+' || s[p] == '-') && s[p - 1] != 'e' && s[p - 1] != 'E') {
      split = p;
      break;
    }
  }
  if (split == std::string::npos) {
    if (s.empty() || s == "+") return Complex(0.0, 1.0);
    if (s == "-") return Complex(0.0, -1.0);
    return Complex(0.0, to_double(s));
  }
  const double re = to_double(s.substr(0, split));
  const std::string im = s.substr(split);
  if (im == "+") return Complex(re, 1.0);
  if (im == "-") return Complex(re, -1.0);
  return Complex(re, to_double(im));
}

Point parse_point(const std::string& text) {
  Point p;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = text.find(',', start);
    p.push_back(parse_complex(text.substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return p;
}

ojson complex_to_json(Complex z) { return ojson::array({z.real(), z.imag()}); }

std::string format_float(double v) {
  if (std::isnan(v)) return "nan";
  if (!std::isfinite(v)) return v > 0.0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string dump_deterministic(const ojson& j) {
  std::string out;
  dump_rec(j, out);
  return out;
}

ojson load_json_file(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), "io", "cannot open \"" + path + "\"");
  try {
    return ojson::parse(in);
  } catch (const nlohmann::json::exception& e) {
    fail("malformed-json", std::string("parse failure in \"") + path + "\": " + e.what());
  }
}

}  // namespace fockshift
