// Batch front end: weight specs and operator tuples in, JSON/CSV reports out.
// Every report embeds the resolved config; identical inputs give identical
// bytes (fixed field order, floats at 17 significant digits).

#include <CLI11.hpp>

#include <cstdlib>
#include <functional>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "fockshift/errors.hpp"
#include "fockshift/fock.hpp"
#include "fockshift/freeword.hpp"
#include "fockshift/hardy.hpp"
#include "fockshift/json_io.hpp"
#include "fockshift/limits.hpp"
#include "fockshift/model.hpp"
#include "fockshift/similarity.hpp"
#include "fockshift/symfock.hpp"
#include "fockshift/weights.hpp"

using namespace fockshift;

namespace {

struct Opts {
  int n = 2;
  int N = 6;
  int D = 3;
  int max_level = 24;
  int threads = 1;
  double s = 1.0;
  double s2 = 1.0;
  double M = 4.0;
  double tol = 1e-12;
  double delta = 0.05;
  std::string family, family2, weights, weights2;
  std::string tuple, symbol, symbol2, q;
  std::string a, lambda, zeta, mode;
  std::string out, format = "json";
};

struct Output {
  ojson json;
  std::string csv;  // set only when the command has a tabular form
};

ojson doubles_json(const std::vector<double>& v) {
  ojson a = ojson::array();
  for (double x : v) a.push_back(x);
  return a;
}

ojson complexes_json(const std::vector<Complex>& v) {
  ojson a = ojson::array();
  for (Complex z : v) a.push_back(complex_to_json(z));
  return a;
}

ojson matrix_json(const Eigen::MatrixXcd& m) {
  ojson rows = ojson::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    ojson row = ojson::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(complex_to_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string point_text(const Point& p) {
  std::string s;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) s += ',';
    s += format_float(p[i].real());
    if (p[i].imag() != 0.0) {
      if (p[i].imag() > 0.0) s += '+';
      s += format_float(p[i].imag());
      s += 'i';
    }
  }
  return s;
}

WeightSequence family_weights(int n, const std::string& family, double s) {
  if (family == "unit") return WeightSequence::unit(n);
  if (family == "besov") return WeightSequence::besov(n, s);
  if (family == "dirichlet") return WeightSequence::dirichlet_scale(n, s);
  if (family == "harmonic") return WeightSequence::harmonic(n);
  if (family == "harmonic_sq") return WeightSequence::harmonic_squared(n);
  if (family == "inverse_square") return WeightSequence::inverse_square(n);
  if (family == "constant") return WeightSequence::constant(n, s);
  fail("bad-flags", "unknown family \"" + family + "\"");
}

WeightSequence resolve_weights(const Opts& o, const std::string& file, const std::string& family,
                               double s) {
  if (!file.empty()) return weights_from_json(load_json_file(file));
  require(!family.empty(), "bad-flags", "need --family or --weights");
  return family_weights(o.n, family, s);
}

// Resolved-config echo: one fixed insertion order shared by every command so
// reruns compare byte-for-byte.
ojson base_config(const Opts& o, std::initializer_list<const char*> fields) {
  ojson c = ojson::object();
  for (const char* f : fields) {
    const std::string k = f;
    if (k == "n") c["n"] = o.n;
    if (k == "N") c["N"] = o.N;
    if (k == "D") c["D"] = o.D;
    if (k == "max_level") c["max_level"] = o.max_level;
    if (k == "family") c["family"] = o.family;
    if (k == "s") c["s"] = o.s;
    if (k == "family2") c["family2"] = o.family2;
    if (k == "s2") c["s2"] = o.s2;
    if (k == "weights") c["weights"] = o.weights;
    if (k == "weights2") c["weights2"] = o.weights2;
    if (k == "tuple") c["tuple"] = o.tuple;
    if (k == "symbol") c["symbol"] = o.symbol;
    if (k == "symbol2") c["symbol2"] = o.symbol2;
    if (k == "q") c["q"] = o.q;
    if (k == "a") c["a"] = o.a;
    if (k == "mode") c["mode"] = o.mode;
    if (k == "lambda") c["lambda"] = o.lambda;
    if (k == "zeta") c["zeta"] = o.zeta;
    if (k == "M") c["M"] = o.M;
    if (k == "tol") c["tol"] = o.tol;
    if (k == "delta") c["delta"] = o.delta;
    if (k == "threads") c["threads"] = o.threads;
    if (k == "format") c["format"] = o.format;
  }
  c["max_dim"] = static_cast<long long>(default_limits().max_dim);
  return c;
}

std::vector<double> parse_doubles(const std::string& text, const char* what) {
  std::vector<double> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = text.find(',', start);
    const std::string piece = text.substr(start, comma - start);
    try {
      std::size_t pos = 0;
      out.push_back(std::stod(piece, &pos));
      require(pos == piece.size(), "bad-flags", std::string(what) + ": junk in \"" + piece + "\"");
    } catch (const std::logic_error&) {
      fail("bad-flags", std::string(what) + ": unparseable \"" + piece + "\"");
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

Eigen::MatrixXcd matrix_from_json(const ojson& j) {
  const ojson& rows = j.is_object() && j.contains("matrix") ? j["matrix"] : j;
  require(rows.is_array() && !rows.empty(), "malformed-json", "matrix must be an array of rows");
  const int d = static_cast<int>(rows.size());
  Eigen::MatrixXcd m(d, d);
  for (int r = 0; r < d; ++r) {
    const ojson& row = rows[static_cast<std::size_t>(r)];
    require(row.is_array() && static_cast<int>(row.size()) == d, "malformed-json",
            "matrix must be square");
    for (int c = 0; c < d; ++c) {
      const ojson& e = row[static_cast<std::size_t>(c)];
      if (e.is_number()) {
        m(r, c) = Complex(e.get<double>(), 0.0);
      } else {
        require(e.is_array() && e.size() == 2, "malformed-json",
                "matrix entry must be [re, im] or a number");
        m(r, c) = Complex(e[0].get<double>(), e[1].get<double>());
      }
    }
  }
  return m;
}

std::string csv_field(const std::string& s) { return "\"" + s + "\""; }

Output run_radius(const Opts& o) {
  const WeightSequence w = resolve_weights(o, o.weights, o.family, o.s);
  const RadiusReport r = joint_radius_estimate(w, o.N, o.threads);
  ojson j;
  j["levels"] = doubles_json(r.level_values);
  j["roots"] = doubles_json(r.roots);
  j["r_lower"] = r.estimate;
  j["exact"] = r.exact ? ojson(*r.exact) : ojson(nullptr);
  j["note"] = r.note;
  j["paper_anchor"] = "radius";
  j["config"] = base_config(o, {"n", "N", "family", "s", "weights", "threads", "format"});
  Output out{std::move(j), ""};
  out.csv = "k,level_value,root\n";
  for (std::size_t k = 0; k < r.level_values.size(); ++k)
    out.csv += std::to_string(k + 1) + "," + format_float(r.level_values[k]) + "," +
               format_float(r.roots[k]) + "\n";
  return out;
}

Output run_classify(const Opts& o, bool has_M) {
  const WeightSequence w = resolve_weights(o, o.weights, o.family, o.s);
  const ClassifyReport r =
      classify(w, o.N, has_M ? std::optional<double>(o.M) : std::nullopt);
  ojson j;
  j["injective"] = r.injective;
  j["row_contraction"] = r.row_contraction;
  j["scan_sup_chain"] = r.scan_sup_chain;
  j["bound_M"] = r.bound_M ? ojson(*r.bound_M) : ojson(nullptr);
  j["power_bounded_within_scan"] =
      r.power_bounded_within_scan ? ojson(*r.power_bounded_within_scan) : ojson(nullptr);
  ojson gens = ojson::array();
  for (const GeneratorEvidence& g : r.generators) {
    ojson gj;
    gj["gen"] = g.gen;
    gj["sup_mu"] = g.sup_mu;
    gj["compact_verdict"] = g.compact_verdict;
    gj["l2_verdict"] = g.l2_verdict;
    gj["l1_partial"] = g.l1_partial;
    gj["l2_partial"] = g.l2_partial;
    gj["level_max"] = doubles_json(g.level_max);
    gj["defect_min"] = doubles_json(g.defect_min);
    gj["defect_max"] = doubles_json(g.defect_max);
    gens.push_back(std::move(gj));
  }
  j["generators"] = std::move(gens);
  j["paper_anchor"] = "proprieties";
  j["config"] = base_config(o, {"n", "N", "family", "s", "weights", "M", "format"});
  return {std::move(j), ""};
}

Output run_decompose(const Opts& o) {
  const WeightSequence w = resolve_weights(o, o.weights, o.family, o.s);
  const DecomposeReport r = reduce_decompose(w, o.N);
  ojson comps = ojson::array();
  for (const Component& c : r.components) {
    ojson cj;
    ojson idx = ojson::array();
    for (std::size_t i : c.indices) idx.push_back(static_cast<long long>(i));
    cj["indices"] = std::move(idx);
    cj["truncated_type"] = c.truncated_type;
    comps.push_back(std::move(cj));
  }
  ojson j;
  j["pattern_valid"] = r.pattern_valid;
  j["component_count"] = static_cast<long long>(r.components.size());
  j["components"] = std::move(comps);
  j["paper_anchor"] = "decompo";
  j["config"] = base_config(o, {"n", "N", "family", "s", "weights", "format"});
  return {std::move(j), ""};
}

Output run_similar(const Opts& o) {
  const WeightSequence w = resolve_weights(o, o.weights, o.family, o.s);
  const WeightSequence w2 = resolve_weights(o, o.weights2, o.family2, o.s2);
  const DiagonalIntertwiner d = similarity_diagonal(w, w2, o.N);
  ojson j;
  j["C1"] = d.C1;
  j["C2"] = d.C2;
  j["cond"] = d.cond;
  j["residual"] = verify_intertwining(d, w, w2, o.N);
  j["paper_anchor"] = "similarity";
  j["config"] = base_config(
      o, {"n", "N", "family", "s", "family2", "s2", "weights", "weights2", "format"});
  return {std::move(j), ""};
}

Output run_contract(const Opts& o) {
  const WeightSequence w = resolve_weights(o, o.weights, o.family, o.s);
  const ContractionResult r = contraction_weights(w, o.M, o.N);
  const LevelNorm row = level_row_norm(r.v, 1, o.N, o.threads);
  ojson j;
  j["gamma_min"] = r.gamma_min;
  j["gamma_max"] = r.gamma_max;
  j["gamma"] = doubles_json(r.gamma);
  j["row_norm"] = row.value;
  j["paper_anchor"] = "power bounded";
  j["config"] = base_config(o, {"n", "N", "family", "s", "weights", "M", "threads", "format"});
  return {std::move(j), ""};
}

Output run_model(const Opts& o) {
  const OperatorTuple t = tuple_from_json(load_json_file(o.tuple));
  std::optional<Eigen::MatrixXcd> q;
  if (!o.q.empty()) q = matrix_from_json(load_json_file(o.q));
  ModelMode mode = ModelMode::main1;
  if (o.mode == "rota") mode = ModelMode::rota;
  else if (o.mode == "nilpotent") mode = ModelMode::nilpotent;
  else require(o.mode == "main1" || o.mode.empty(), "bad-flags",
               "mode must be rota|main1|nilpotent");

  const double bound = model_bound(t, mode, o.N, q ? &*q : nullptr);
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(t.d, t.d);
  ModelCertificate cert;
  if (mode == ModelMode::rota) {
    cert = build_K_embedding(t, from_tuple_norms(t, o.N), *q, o.N);
  } else if (mode == ModelMode::main1) {
    cert = build_K_embedding(t, from_tuple_norms(t, o.N), id, o.N);
  } else {
    const TupleStats stats = tuple_stats(t, o.N);
    const int m = *stats.nilpotent_index;  // model_bound already certified it
    cert = build_K_embedding(t, from_tuple_norms(t, m), id, std::max(1, m - 1));
  }
  ojson j;
  j["cb_bound"] = bound;
  j["measured_cb"] = cert.cb_bound;
  j["residuals"] = doubles_json(cert.residuals);
  j["lambda_min"] = cert.lambda_min;
  j["lambda_max"] = cert.lambda_max;
  j["level_term_norms"] = doubles_json(cert.level_term_norms);
  j["convergence"] = cert.convergence;
  j["paper_anchor"] = mode == ModelMode::rota ? "Rota" : "main1";
  j["config"] = base_config(o, {"N", "tuple", "q", "mode", "format"});
  return {std::move(j), ""};
}

Output run_fp(const Opts& o) {
  std::optional<OperatorTuple> t;
  if (!o.tuple.empty()) t = tuple_from_json(load_json_file(o.tuple));
  FpWeights fp = [&] {
    if (!o.a.empty()) return foias_pearcy_weights(o.n, parse_doubles(o.a, "--a"));
    require(t.has_value(), "bad-flags", "need --a or --tuple");
    return foias_pearcy_weights(*t, o.N);
  }();
  const int cap = static_cast<int>(fp.a.size()) - 1;
  const FpCertificate cert = foias_pearcy_certify(fp, std::min(o.N, cap), t ? &*t : nullptr);
  ojson j;
  j["a"] = doubles_json(fp.a);
  j["kappa"] = doubles_json(fp.kappa);
  j["sigma"] = doubles_json(fp.sigma);
  j["y_norm"] = cert.y_norm;
  j["min_sigma"] = cert.min_sigma;
  j["max_residual"] = cert.max_residual;
  j["kappa_nonincreasing"] = cert.kappa_nonincreasing;
  j["kappa_dominates_roots"] = cert.kappa_dominates_roots;
  j["quasi_nilpotent_evidence"] = fp.quasi_nilpotent_evidence;
  j["battery_min_ratio"] = cert.battery_min_ratio;
  j["battery_pairing_err"] = cert.battery_pairing_err;
  j["paper_anchor"] = "Foias-Pearcy";
  j["config"] = base_config(o, {"n", "N", "a", "tuple", "format"});
  return {std::move(j), ""};
}

Output run_membership(const Opts& o) {
  const WeightSequence w = resolve_weights(o, o.weights, o.family, o.s);
  const PointEvalResult r = point_membership(w, parse_point(o.lambda), o.max_level, o.delta);
  ojson j;
  j["verdict"] = r.verdict;
  j["method"] = r.method;
  j["level_sums"] = doubles_json(r.level_sums);
  j["partial_sums"] = doubles_json(r.partial_sums);
  j["paper_anchor"] = "joint";
  j["config"] =
      base_config(o, {"n", "family", "s", "weights", "lambda", "max_level", "delta", "format"});
  return {std::move(j), ""};
}

Output run_eval(const Opts& o) {
  const WeightSequence w = resolve_weights(o, o.weights, o.family, o.s);
  const Symbol phi = symbol_from_json(w.n(), load_json_file(o.symbol));
  const Point lam = parse_point(o.lambda);
  const WordTable table = WordTable::build(w.n(), o.N);
  const CVec f = symbol_to_fock(phi, w, table);
  const Complex direct = evaluate_symbol(phi, lam);
  const Complex via = evaluate_fock(f, w, lam);
  ojson j;
  j["value"] = complex_to_json(direct);
  j["via_kernel"] = complex_to_json(via);
  j["difference"] = std::abs(direct - via);
  j["paper_anchor"] = "evaluation";
  j["config"] = base_config(o, {"n", "N", "family", "s", "weights", "symbol", "lambda", "format"});
  return {std::move(j), ""};
}

Output run_calculus(const Opts& o) {
  const OperatorTuple t = tuple_from_json(load_json_file(o.tuple));
  const Symbol phi = symbol_from_json(t.n, load_json_file(o.symbol));
  CesaroMode mode = CesaroMode::fejer;
  if (o.mode == "exact" || o.mode == "exact_poly") mode = CesaroMode::exact_poly;
  else if (o.mode == "series" || o.mode == "hol0_series") mode = CesaroMode::hol0_series;
  else require(o.mode == "fejer" || o.mode.empty(), "bad-flags",
               "mode must be fejer|exact|series");
  const Eigen::MatrixXcd m = cesaro_evaluate(phi, t, o.N, mode, o.tol);
  ojson j;
  j["matrix"] = matrix_json(m);
  j["operator_norm"] = operator_norm(m);
  j["spectral_radius"] = spectral_radius(m);
  if (!o.symbol2.empty()) {
    const Symbol psi = symbol_from_json(t.n, load_json_file(o.symbol2));
    const WeightSequence w = o.weights.empty() && o.family.empty()
                                 ? WeightSequence::unit(t.n)
                                 : resolve_weights(o, o.weights, o.family, o.s);
    const CalculusReport c = calculus_certificates(phi, psi, t, w, o.N);
    j["hom_residual"] = c.hom_residual;
    j["r_phi_T"] = c.r_phi_T;
    j["r_phi_W_truncated"] = c.r_phi_W_truncated;
  }
  j["paper_anchor"] = "calculus";
  j["config"] = base_config(
      o, {"n", "N", "tuple", "symbol", "symbol2", "family", "s", "weights", "mode", "tol", "format"});
  return {std::move(j), ""};
}

Output run_symmetric(const Opts& o) {
  const WeightSequence w = resolve_weights(o, o.weights, o.family, o.s);
  const SymmetricBasis b = build_symmetric_basis(w, o.D);
  ojson omega = ojson::object();
  for (std::size_t i = 0; i < b.indices.size(); ++i)
    omega[multi_to_string(b.indices[i])] = b.omega[i];
  ojson level_begin = ojson::array();
  for (std::size_t v : b.level_begin) level_begin.push_back(static_cast<long long>(v));
  ojson residuals = ojson::array();
  for (int gen = 1; gen <= w.n(); ++gen)
    residuals.push_back(compression_check(w, gen, o.D, o.D + 1));
  ojson j;
  j["dimension"] = static_cast<long long>(b.indices.size());
  j["level_begin"] = std::move(level_begin);
  j["omega"] = std::move(omega);
  j["compression_residuals"] = std::move(residuals);
  j["paper_anchor"] = "symmetric";
  j["config"] = base_config(o, {"n", "D", "family", "s", "weights", "format"});
  return {std::move(j), ""};
}

Output run_kernel(const Opts& o) {
  const WeightSequence w = resolve_weights(o, o.weights, o.family, o.s);
  const Point zeta = parse_point(o.zeta);
  const Point lam = parse_point(o.lambda);
  const H2Kernel k = h2_kernel(w, zeta, lam, o.N);
  ojson j;
  j["value"] = complex_to_json(k.value);
  j["level_terms"] = complexes_json(k.level_terms);
  j["paper_anchor"] = "symmetric";
  j["config"] = base_config(o, {"n", "N", "family", "s", "weights", "zeta", "lambda", "format"});
  Output out{std::move(j), ""};
  out.csv = "zeta,lambda,re,im\n" + csv_field(point_text(zeta)) + "," +
            csv_field(point_text(lam)) + "," + format_float(k.value.real()) + "," +
            format_float(k.value.imag()) + "\n";
  return out;
}

int emit(const Output& result, const Opts& o) {
  std::string text;
  if (o.format == "csv") {
    require(!result.csv.empty(), "bad-flags", "this command has no CSV form");
    text = result.csv;
  } else {
    require(o.format == "json", "bad-flags", "format must be json or csv");
    text = dump_deterministic(result.json) + "\n";
  }
  if (o.out.empty()) {
    std::cout << text;
  } else {
    std::ofstream f(o.out, std::ios::binary);
    require(f.good(), "io", "cannot open \"" + o.out + "\" for writing");
    f << text;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weighted-shift constructions and certificates on the truncated Fock space"};
  app.require_subcommand(1);
  Opts o;

  const auto add_weight_flags = [&](CLI::App* sub) {
    sub->add_option("--family", o.family, "closed-form family name");
    sub->add_option("--s", o.s, "family parameter (rho for constant)");
    sub->add_option("--weights", o.weights, "weight spec JSON file");
    sub->add_option("--n", o.n, "alphabet size");
  };
  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", o.out, "write the report here instead of stdout");
    sub->add_option("--format", o.format, "json|csv");
    sub->add_option("--threads", o.threads, "row-scan parallelism");
  };

  CLI::App* radius = app.add_subcommand("radius", "level norms and the joint radius estimate");
  add_weight_flags(radius);
  add_common(radius);
  radius->add_option("--N", o.N, "truncation level");

  CLI::App* cls = app.add_subcommand("classify", "boundedness and generator evidence");
  add_weight_flags(cls);
  add_common(cls);
  cls->add_option("--N", o.N, "truncation level");
  CLI::Option* cls_M = cls->add_option("--M", o.M, "claimed power bound to test");

  CLI::App* dec = app.add_subcommand("decompose", "reducing components of the truncation");
  add_weight_flags(dec);
  add_common(dec);
  dec->add_option("--N", o.N, "truncation level");

  CLI::App* sim = app.add_subcommand("similar", "diagonal similarity certificate");
  add_weight_flags(sim);
  add_common(sim);
  sim->add_option("--N", o.N, "truncation level");
  sim->add_option("--family2", o.family2, "second family");
  sim->add_option("--s2", o.s2, "second family parameter");
  sim->add_option("--weights2", o.weights2, "second weight spec JSON file");

  CLI::App* con = app.add_subcommand("contract", "rescale to a similar row contraction");
  add_weight_flags(con);
  add_common(con);
  con->add_option("--N", o.N, "truncation level");
  con->add_option("--M", o.M, "power bound for the rescaling");

  CLI::App* mod = app.add_subcommand("model", "row-contraction model certificate for a tuple");
  add_common(mod);
  mod->add_option("--tuple", o.tuple, "operator tuple JSON file")->required();
  mod->add_option("--mode", o.mode, "rota|main1|nilpotent");
  mod->add_option("--N", o.N, "scan depth");
  mod->add_option("--q", o.q, "positive definite Q (JSON matrix, rota mode)");

  CLI::App* fp = app.add_subcommand("fp", "quasinilpotent weight certificates");
  add_common(fp);
  fp->add_option("--n", o.n, "alphabet size");
  fp->add_option("--a", o.a, "norm sequence, comma separated, a_0 = 1");
  fp->add_option("--tuple", o.tuple, "measure the sequence from this tuple");
  fp->add_option("--N", o.N, "certificate level");

  CLI::App* mem = app.add_subcommand("membership", "point domain verdict");
  add_weight_flags(mem);
  add_common(mem);
  mem->add_option("--lambda", o.lambda, "point, comma separated components")->required();
  mem->add_option("--max-level", o.max_level, "scan depth");
  mem->add_option("--delta", o.delta, "ratio-window margin");

  CLI::App* ev = app.add_subcommand("eval", "evaluate a symbol against the kernel vector");
  add_weight_flags(ev);
  add_common(ev);
  ev->add_option("--symbol", o.symbol, "symbol JSON file")->required();
  ev->add_option("--lambda", o.lambda, "point")->required();
  ev->add_option("--N", o.N, "truncation level");

  CLI::App* cal = app.add_subcommand("calculus", "polynomial calculus on a tuple");
  add_weight_flags(cal);
  add_common(cal);
  cal->add_option("--tuple", o.tuple, "operator tuple JSON file")->required();
  cal->add_option("--symbol", o.symbol, "symbol JSON file")->required();
  cal->add_option("--symbol2", o.symbol2, "second symbol: adds homomorphism certificates");
  cal->add_option("--mode", o.mode, "fejer|exact|series");
  cal->add_option("--N", o.N, "taper level");
  cal->add_option("--tol", o.tol, "series stopping tolerance");

  CLI::App* sym = app.add_subcommand("symmetric", "symmetric-subspace lattice data");
  add_weight_flags(sym);
  add_common(sym);
  sym->add_option("--D", o.D, "total degree cap");

  CLI::App* ker = app.add_subcommand("kernel", "symmetric kernel value at a point pair");
  add_weight_flags(ker);
  add_common(ker);
  ker->add_option("--zeta", o.zeta, "first point")->required();
  ker->add_option("--lambda", o.lambda, "second point")->required();
  ker->add_option("--N", o.N, "expansion degree");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    ojson err;
    err["error"] = ojson{{"kind", "bad-flags"}, {"message", e.what()}};
    std::cout << dump_deterministic(err) << "\n";
    return 2;
  }

  try {
    Output result;
    if (app.got_subcommand(radius)) result = run_radius(o);
    else if (app.got_subcommand(cls)) result = run_classify(o, cls_M->count() > 0);
    else if (app.got_subcommand(dec)) result = run_decompose(o);
    else if (app.got_subcommand(sim)) result = run_similar(o);
    else if (app.got_subcommand(con)) result = run_contract(o);
    else if (app.got_subcommand(mod)) result = run_model(o);
    else if (app.got_subcommand(fp)) result = run_fp(o);
    else if (app.got_subcommand(mem)) result = run_membership(o);
    else if (app.got_subcommand(ev)) result = run_eval(o);
    else if (app.got_subcommand(cal)) result = run_calculus(o);
    else if (app.got_subcommand(sym)) result = run_symmetric(o);
    else result = run_kernel(o);
    return emit(result, o);
  } catch (const error& e) {
    ojson err;
    err["error"] = ojson{{"kind", e.kind()}, {"message", e.what()}};
    std::cout << dump_deterministic(err) << "\n";
    return 2;
  } catch (const std::exception& e) {
    ojson err;
    err["error"] = ojson{{"kind", "internal"}, {"message", e.what()}};
    std::cout << dump_deterministic(err) << "\n";
    return 2;
  }
}
