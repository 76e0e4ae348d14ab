// Python facade over the weighted-shift library. Weights come in as the same
// JSON spec strings the CLI accepts, so the two front ends share one format.

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "fockshift/errors.hpp"
#include "fockshift/fock.hpp"
#include "fockshift/freeword.hpp"
#include "fockshift/hardy.hpp"
#include "fockshift/json_io.hpp"
#include "fockshift/symfock.hpp"
#include "fockshift/weights.hpp"

namespace py = pybind11;
using namespace fockshift;

namespace {

WeightSequence weights_from_spec(const std::string& spec) {
  ojson j;
  try {
    j = ojson::parse(spec);
  } catch (const nlohmann::json::exception& e) {
    fail("malformed-json", e.what());
  }
  return weights_from_json(j);
}

Point to_point(const std::vector<Complex>& v) { return v; }

}  // namespace

PYBIND11_MODULE(_fockshift, m) {
  m.doc() = "n-tuples of weighted shifts on the full Fock space: norms, "
            "similarity, domains, and the symmetric (commutative) picture";
  m.attr("__version__") = "0.1.0";

  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const error& e) {
      PyErr_SetString(PyExc_ValueError, (e.kind() + ": " + std::string(e.what())).c_str());
    }
  });

  m.def("graded_dim", &graded_dim, py::arg("n"), py::arg("max_len"),
        "Number of words of length <= max_len over n letters.");
  m.def("parse_word", &parse_word, py::arg("text"), py::arg("n"),
        "Dot-separated letters ('1.2.1') to a word; '' is the unit.");
  m.def("word_to_string", &word_to_string, py::arg("word"));
  m.def("words_in_class", &words_in_class, py::arg("k"),
        "All words whose letter counts match the multi-index.");
  m.def("multinomial", &multinomial, py::arg("k"));

  py::class_<WeightSequence>(m, "Weights")
      .def_static("from_spec", &weights_from_spec, py::arg("spec"),
                  "Build from a JSON weight spec (same format as the CLI).")
      .def_property_readonly("n", &WeightSequence::n)
      .def("mu", [](const WeightSequence& w, const std::string& word) {
            return mu_norm(w, parse_word(word, w.n()));
          },
          py::arg("word"), "mu(word, unit): the chain value down to the vacuum.")
      .def("chain", &WeightSequence::norm_level, py::arg("k"),
          "mu(alpha, unit) for any word of length k (length-only families).")
      .def("level_norm", [](const WeightSequence& w, int k, int N, int threads) {
            const LevelNorm ln = level_row_norm(w, k, N, threads);
            py::dict d;
            d["value"] = ln.value;
            d["boundary_value"] = ln.boundary_value;
            d["beta"] = word_to_string(ln.beta);
            d["alpha"] = word_to_string(ln.alpha);
            return d;
          },
          py::arg("k"), py::arg("N"), py::arg("threads") = 1,
          "sup mu(beta, alpha) over |beta| = k within the depth-N truncation.")
      .def("radius", [](const WeightSequence& w, int N, int threads) {
            const RadiusReport r = joint_radius_estimate(w, N, threads);
            py::dict d;
            d["levels"] = r.level_values;
            d["roots"] = r.roots;
            d["estimate"] = r.estimate;
            if (r.exact) d["exact"] = *r.exact;
            return d;
          },
          py::arg("N"), py::arg("threads") = 1,
          "Level-norm roots and the windowed joint-radius estimate.")
      .def("membership", [](const WeightSequence& w, const std::vector<Complex>& lam,
                            int max_level) {
            const PointEvalResult r = point_membership(w, to_point(lam), max_level);
            py::dict d;
            d["verdict"] = r.verdict;
            d["method"] = r.method;
            return d;
          },
          py::arg("lam"), py::arg("max_level") = 24,
          "Whether the point lies in the reproducing-kernel domain.")
      .def("omega", [](const WeightSequence& w, const MultiIndex& k) {
            return omega_value(w, k);
          },
          py::arg("k"), "sum of 1/mu(word)^2 over the abelian class of k.")
      .def("kernel", [](const WeightSequence& w, const std::vector<Complex>& zeta,
                        const std::vector<Complex>& lam, int max_degree) {
            return h2_kernel(w, to_point(zeta), to_point(lam), max_degree).value;
          },
          py::arg("zeta"), py::arg("lam"), py::arg("max_degree") = 40,
          "Symmetric-space kernel sum_k omega_k zeta^k conj(lambda)^k.");
}
