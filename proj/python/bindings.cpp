#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cusplab/cli.hpp"
#include "cusplab/cuspfn.hpp"
#include "cusplab/energyseries.hpp"
#include "cusplab/errors.hpp"
#include "cusplab/radial.hpp"
#include "cusplab/rigidity.hpp"
#include "cusplab/separability.hpp"
#include "cusplab/specialfn.hpp"

namespace py = pybind11;
using namespace cusplab;

namespace {

PotentialModel make_model(const std::vector<std::pair<double, double>>& terms,
                          std::optional<std::pair<double, double>> yukawa,
                          std::optional<std::pair<std::vector<double>, std::vector<double>>> table) {
  PotentialModel m;
  for (const auto& [s, a] : terms) m.terms.push_back({s, a});
  if (yukawa) m.yukawa = YukawaTerm{yukawa->first, yukawa->second};
  if (table) m.table = Table(table->first, table->second);
  m.validate();
  return m;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Cusp functions, regular radial solutions, rigidity and separability (scaled units).";

  static py::exception<Error> base(m, "CuspError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(base, (e.name() + ": " + e.what()).c_str());
    }
  });

  m.def("gamma", &specialfn::gamma);
  m.def("bessel_j", &specialfn::bessel_j);
  m.def("bessel_y", &specialfn::bessel_y);
  m.def("bessel_i", &specialfn::bessel_i);
  m.def("bessel_k", &specialfn::bessel_k);
  m.def("bessel_i_sym", &specialfn::bessel_i_sym);
  m.def("analytic_i", &specialfn::analytic_i);
  m.def("legendre", &specialfn::legendre);

  py::class_<PotentialModel>(m, "PotentialModel")
      .def(py::init(&make_model), py::arg("terms") = std::vector<std::pair<double, double>>{},
           py::arg("yukawa") = py::none(), py::arg("table") = py::none(),
           "terms: [(strength, exponent)], v = sum strength / r^exponent; yukawa: (strength, range)")
      .def("evaluate", &PotentialModel::evaluate);

  m.def("classify", [](const PotentialModel& model) {
    const ShortRangeClass c = classify(model);
    py::dict d;
    d["tag"] = to_string(c.tag);
    d["dominant_alpha"] = c.dominant_alpha;
    d["dominant_strength"] = c.dominant_strength;
    d["gamma2"] = c.gamma2;
    d["beta_alpha"] = c.beta_alpha;
    d["physical"] = c.physical();
    return d;
  });

  m.def("cusp_f", [](const PotentialModel& model, int l, double r) {
    const CuspValue v = cusp_f(make_cusp_spec(classify(model), l), r);
    return std::make_pair(v.value(), v.derivative());
  });
  m.def("irregular_g", [](const PotentialModel& model, int l, double r) {
    const CuspValue v = irregular_g(make_cusp_spec(classify(model), l), r);
    return std::make_pair(v.value(), v.derivative());
  });
  m.def("wronskian", [](const PotentialModel& model, int l, double r_s) {
    const CuspSpec spec = make_cusp_spec(classify(model), l);
    return wronskian_check(spec, r_s * cusp_length(spec));
  }, "Wronskian of (f, g) in the reduced variable r_s");

  m.def("solve", [](const PotentialModel& model, int l, double energy, double r_max, int points) {
    const RadialSolution s = solve_regular(model, l, energy, default_grid(model, l, r_max, points));
    py::dict d;
    d["r"] = s.grid.points;
    d["u"] = s.u;
    d["du"] = s.du;
    d["L"] = s.logderiv;
    d["R"] = s.rmatrix;
    d["P"] = s.prob;
    d["scale_offsets"] = s.scale_offsets;
    return d;
  }, py::arg("model"), py::arg("l"), py::arg("energy"), py::arg("r_max"), py::arg("points") = 400);

  m.def("fundamental_residual", [](const PotentialModel& model, int l, double energy, const std::vector<double>& r) {
    return verify_fundamental(model, l, energy, r).max_residual();
  });

  m.def("series_profiles", [](const PotentialModel& model, int l, double r_max, int j_max,
                              const std::vector<double>& r) {
    const EnergySeries s = build_series(model, l, default_grid(model, l, r_max, 400, r), j_max);
    std::vector<std::vector<double>> out;
    for (int j = 0; j <= j_max; ++j) {
      std::vector<double> col;
      for (double x : r) col.push_back(s.profile(j, x));
      out.push_back(std::move(col));
    }
    return out;
  }, "Rows j = 0..j_max of x_j at the radii (x_0 = f).");

  m.def("expansion_terms", [](const PotentialModel& vik, const PotentialModel& vjk, double mi, double mj,
                              double R, double r, double gamma) {
    const ExpansionTerms t = expansion_terms(vik, vjk, mi, mj, R, r, gamma);
    return py::make_tuple(t.zeroth, t.first, t.second);
  });
  m.def("small_parameter", &small_parameter);

  m.def("run_config", [](const std::string& text, const std::string& base_dir, const std::string& output,
                         int threads) {
    const cli::RunResult r = cli::run_text(text, base_dir, output, std::nullopt, cli::RunOptions{threads});
    py::dict d;
    d["exit_code"] = r.exit_code;
    d["summary"] = r.summary;
    d["error"] = r.error;
    d["files"] = r.files;
    return d;
  }, py::arg("text"), py::arg("base_dir") = ".", py::arg("output") = "", py::arg("threads") = 1);
}
