// Python bindings for the core operations: grids and transforms, measurable
// sets with thinness certificates, radius pairs, the splitting operators with
// their Schur/leakage reports, covers, the necessity ladder, and the symbol
// contraction estimate. Heavy sweeps stay in the CLI; this module is for
// interactive use and the smoke tests.

#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <complex>
#include <cstring>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "thinlab/contraction.hpp"
#include "thinlab/corpus.hpp"
#include "thinlab/counterexamples.hpp"
#include "thinlab/covering.hpp"
#include "thinlab/experiments.hpp"
#include "thinlab/mollifier.hpp"
#include "thinlab/operators.hpp"
#include "thinlab/radius.hpp"
#include "thinlab/sets.hpp"
#include "thinlab/spectral.hpp"
#include "thinlab/util.hpp"

namespace py = pybind11;
using namespace thinlab;

namespace {

using cplx = std::complex<double>;

GridFunction function_from_array(const GridSpec& spec, const py::array& a) {
  auto arr = py::array_t<cplx, py::array::c_style | py::array::forcecast>::ensure(a);
  if (!arr) throw std::invalid_argument("expected a numeric array");
  GridFunction f(spec);
  if (static_cast<std::size_t>(arr.size()) != f.size())
    throw std::invalid_argument("array size does not match the grid (" +
                                std::to_string(f.size()) + " samples expected)");
  std::memcpy(f.data().data(), arr.data(), f.size() * sizeof(cplx));
  return f;
}

py::array function_to_array(const GridFunction& f) {
  const int n = f.samples();
  py::array_t<cplx> out(f.dim() == 2 ? std::vector<py::ssize_t>{n, n}
                                     : std::vector<py::ssize_t>{n});
  std::memcpy(out.mutable_data(), f.data().data(), f.size() * sizeof(cplx));
  return out;
}

// flat spec -> OperatorPair, mirroring what the experiment drivers build
OperatorPair make_operator_pair(const std::string& pair_spec, const GridSpec& grid,
                                int j_max, int phi_resolution) {
  CompatiblePair pair = parse_pair(pair_spec);
  MollifierSystem::Options opt;
  opt.dim = grid.dim;
  opt.c1 = pair.c1;
  opt.rho1 = pair.rho1;
  opt.domain_extent = grid.extent;
  opt.j_max = j_max;
  opt.build_samples = phi_resolution;
  return OperatorPair(MollifierSystem::build(opt), pair, grid);
}

py::dict result_to_dict(const ExperimentResult& r) {
  py::dict d;
  d["ok"] = r.ok;
  d["message"] = r.message;
  d["columns"] = r.table.columns;
  d["rows"] = r.table.rows;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "thin-set uncertainty laboratory (core bindings)";

  py::enum_<BallNorm>(m, "BallNorm")
      .value("euclidean", BallNorm::Euclidean)
      .value("sup", BallNorm::Sup);

  py::class_<GridSpec>(m, "GridSpec")
      .def(py::init([](int dim, double extent, int samples) {
             return GridSpec{dim, extent, samples};
           }),
           py::arg("dim") = 1, py::arg("extent") = 64.0, py::arg("samples") = 4096)
      .def_readwrite("dim", &GridSpec::dim)
      .def_readwrite("extent", &GridSpec::extent)
      .def_readwrite("samples", &GridSpec::samples)
      .def("spacing", &GridSpec::spacing)
      .def("dual_extent", &GridSpec::dual_extent)
      .def("dual", &GridSpec::dual)
      .def("__eq__", [](const GridSpec& a, const GridSpec& b) { return a == b; })
      .def("__repr__", [](const GridSpec& s) {
        std::ostringstream os;
        os << "GridSpec(dim=" << s.dim << ", extent=" << s.extent
           << ", samples=" << s.samples << ")";
        return os.str();
      });

  py::class_<GridFunction>(m, "GridFunction")
      .def(py::init(&function_from_array), py::arg("spec"), py::arg("values"))
      .def_property_readonly("spec", &GridFunction::spec)
      .def("values", &function_to_array)
      .def("coords", [](const GridFunction& f) {
        py::array_t<double> out(f.samples());
        auto* p = out.mutable_data();
        for (int i = 0; i < f.samples(); ++i) p[i] = f.coord(i);
        return out;
      })
      .def("__len__", &GridFunction::size);

  m.def("sample", [](const GridSpec& spec, const py::function& fn) {
    return GridFunction::sample(spec, [&fn](Point x) {
      return fn(x[0], x[1]).cast<cplx>();
    });
  }, py::arg("spec"), py::arg("fn"), "Sample fn(x, y) on the grid (y = 0 in d=1)");

  m.def("forward_transform", &forward_transform);
  m.def("inverse_transform", &inverse_transform);
  m.def("energy", &energy);
  m.def("energy_split", [](const GridFunction& f, const MeasurableSet& A) {
    EnergyReport r = energy_split(f, A);
    py::dict d;
    d["total"] = r.total;
    d["on_set"] = r.on_set;
    d["off_set"] = r.off_set;
    return d;
  });
  m.def("uncertainty_defect", &uncertainty_defect, py::arg("f"), py::arg("E"),
        py::arg("Sigma"));

  py::class_<MeasurableSet>(m, "MeasurableSet")
      .def_static("empty", &MeasurableSet::empty, py::arg("dim") = 1)
      .def_static("intervals",
                  [](const std::vector<std::pair<double, double>>& iv) {
                    std::vector<Interval> v;
                    v.reserve(iv.size());
                    for (auto [lo, hi] : iv) v.push_back({lo, hi});
                    return MeasurableSet::intervals(std::move(v));
                  })
      .def_static("read_csv", &MeasurableSet::read_csv)
      .def_property_readonly("dim", &MeasurableSet::dim)
      .def("measure", &MeasurableSet::measure)
      .def("contains", [](const MeasurableSet& s, double x, double y) {
        return s.contains({x, y});
      }, py::arg("x"), py::arg("y") = 0.0)
      .def("interval_list", [](const MeasurableSet& s) {
        std::vector<std::pair<double, double>> out;
        for (const auto& iv : s.interval_list()) out.emplace_back(iv.lo, iv.hi);
        return out;
      })
      .def("__repr__", [](const MeasurableSet& s) {
        std::ostringstream os;
        os << "MeasurableSet(dim=" << s.dim() << ", measure=" << s.measure() << ")";
        return os.str();
      });

  m.def("periodic_thin_set", &periodic_thin_set, py::arg("dim"), py::arg("count"),
        py::arg("half_width"), py::arg("spacing") = 1.0);
  m.def("thin_profile_set", &thin_profile_set, py::arg("rho"), py::arg("eps"),
        py::arg("lo"), py::arg("hi"), py::arg("seed"));
  m.def("parse_set", &parse_set, py::arg("text"), py::arg("dim") = 1);
  m.def("intersect_ball_measure", &intersect_ball_measure, py::arg("set"),
        py::arg("x"), py::arg("r"), py::arg("norm") = BallNorm::Euclidean);

  py::class_<RadiusFunction>(m, "RadiusFunction")
      .def_static("parse", &RadiusFunction::parse)
      .def_static("power_law", &RadiusFunction::power_law)
      .def_static("constant", &RadiusFunction::constant)
      .def("__call__", &RadiusFunction::operator())
      .def("scaled", &RadiusFunction::scaled, py::arg("value_scale"),
           py::arg("arg_scale"))
      .def("describe", &RadiusFunction::describe)
      .def("__repr__", [](const RadiusFunction& r) {
        return "RadiusFunction(" + r.describe() + ")";
      });

  py::class_<CompatiblePair>(m, "CompatiblePair")
      .def_readonly("rho1", &CompatiblePair::rho1)
      .def_readonly("rho2", &CompatiblePair::rho2)
      .def_readonly("c1", &CompatiblePair::c1)
      .def_readonly("c2", &CompatiblePair::c2)
      .def("describe", &CompatiblePair::describe);

  py::class_<CompatibilityReport>(m, "CompatibilityReport")
      .def_readonly("holds", &CompatibilityReport::holds)
      .def_readonly("worst_margin", &CompatibilityReport::worst_margin)
      .def_readonly("worst_t", &CompatibilityReport::worst_t)
      .def_readonly("t_max", &CompatibilityReport::t_max)
      .def_readonly("probes", &CompatibilityReport::probes);

  m.def("parse_pair", &parse_pair);
  m.def("check_compatibility", &check_compatibility, py::arg("pair"),
        py::arg("t_max") = 1e8, py::arg("probes") = 10000);

  py::class_<ThinnessCertificate>(m, "ThinnessCertificate")
      .def_readonly("epsilon_measured", &ThinnessCertificate::epsilon_measured)
      .def_readonly("worst_center", &ThinnessCertificate::worst_center)
      .def_readonly("worst_radius", &ThinnessCertificate::worst_radius)
      .def_readonly("center_count", &ThinnessCertificate::center_count)
      .def_readonly("rho", &ThinnessCertificate::rho)
      .def_readonly("note", &ThinnessCertificate::note);

  m.def("certify_thinness",
        [](const MeasurableSet& set, const RadiusFunction& rho, const Point& lo,
           const Point& hi, double spacing, BallNorm norm) {
          CenterSpec centers;
          centers.lo = lo;
          centers.hi = hi;
          centers.spacing = spacing;
          return certify_thinness(set, rho, centers, norm);
        },
        py::arg("set"), py::arg("rho"), py::arg("lo"), py::arg("hi"),
        py::arg("spacing") = 0.0, py::arg("norm") = BallNorm::Euclidean);

  m.def("greedy_cover",
        [](int dim, const Point& x, double r, const RadiusFunction& rho1,
           BallNorm norm) {
          CoverResult c = greedy_cover(dim, x, r, rho1, norm);
          py::dict d;
          d["selected_count"] = c.selected_count();
          d["candidates"] = c.candidates.size();
          d["constant"] = c.constant;
          d["covered"] = c.covered;
          d["uncovered"] = c.uncovered;
          return d;
        },
        py::arg("dim"), py::arg("x"), py::arg("r"), py::arg("rho1"),
        py::arg("norm") = BallNorm::Euclidean);
  m.def("thin_ball_bound", &thin_ball_bound, py::arg("set"), py::arg("x"),
        py::arg("r"), py::arg("rho1"), py::arg("eps"),
        py::arg("norm") = BallNorm::Euclidean);

  py::class_<SchurReport>(m, "SchurReport")
      .def_readonly("sup_row", &SchurReport::sup_row)
      .def_readonly("sup_col", &SchurReport::sup_col)
      .def_readonly("thin_row_sup", &SchurReport::thin_row_sup)
      .def_readonly("thin_col_sup", &SchurReport::thin_col_sup)
      .def_readonly("epsilon", &SchurReport::epsilon)
      .def_readonly("leakage_alpha", &SchurReport::leakage_alpha)
      .def_readonly("leakage_beta", &SchurReport::leakage_beta);

  py::class_<KernelSups>(m, "KernelSups")
      .def_readonly("k_row", &KernelSups::k_row)
      .def_readonly("k_col", &KernelSups::k_col)
      .def_readonly("l_row", &KernelSups::l_row)
      .def_readonly("l_col", &KernelSups::l_col);

  py::class_<UpReport>(m, "UpReport")
      .def_readonly("c_emp", &UpReport::c_emp)
      .def_readonly("worst_function", &UpReport::worst_function)
      .def_readonly("alpha", &UpReport::alpha)
      .def_readonly("beta", &UpReport::beta)
      .def_readonly("smallness", &UpReport::smallness)
      .def_readonly("compatible", &UpReport::compatible)
      .def_readonly("warning", &UpReport::warning);

  py::class_<OperatorPair>(m, "OperatorPair")
      .def(py::init(&make_operator_pair), py::arg("pair_spec"), py::arg("grid"),
           py::arg("j_max") = -1, py::arg("phi_resolution") = 1 << 17)
      .def_property_readonly("grid", &OperatorPair::grid)
      .def_property_readonly("j_max", &OperatorPair::j_max)
      .def("apply_S", &OperatorPair::apply_S)
      .def("apply_T", &OperatorPair::apply_T)
      .def("kernel_K", py::overload_cast<double, double>(&OperatorPair::kernel_K,
                                                         py::const_))
      .def("kernel_L", py::overload_cast<double, double>(&OperatorPair::kernel_L,
                                                         py::const_))
      .def("kernel_sups", &OperatorPair::kernel_sups, py::arg("probes") = 256)
      .def("schur_bounds", &OperatorPair::schur_bounds, py::arg("E"),
           py::arg("Sigma"), py::arg("epsilon"), py::arg("corpus"),
           py::arg("probes") = 256)
      .def("verify_up_inequality", &OperatorPair::verify_up_inequality,
           py::arg("E"), py::arg("Sigma"), py::arg("corpus"));

  m.def("make_corpus", &make_corpus, py::arg("spec"), py::arg("count"),
        py::arg("seed"));
  m.def("chain_constant", &chain_constant, py::arg("sup_row"), py::arg("sup_col"),
        py::arg("alpha"), py::arg("beta"));

  py::class_<CounterexampleInstance>(m, "CounterexampleInstance")
      .def_readonly("dim", &CounterexampleInstance::dim)
      .def_readonly("k", &CounterexampleInstance::k)
      .def_readonly("eps", &CounterexampleInstance::eps)
      .def_readonly("t_k", &CounterexampleInstance::t_k)
      .def_readonly("n", &CounterexampleInstance::n)
      .def_readonly("a_n", &CounterexampleInstance::a_n)
      .def_readonly("spike_halfwidth", &CounterexampleInstance::spike_halfwidth)
      .def_readonly("sigma_halfwidth", &CounterexampleInstance::sigma_halfwidth)
      .def_readonly("norm_sq", &CounterexampleInstance::norm_sq)
      .def_readonly("ratio", &CounterexampleInstance::ratio)
      .def_readonly("defect", &CounterexampleInstance::defect)
      .def_readonly("thinness_E", &CounterexampleInstance::thinness_E)
      .def_readonly("thinness_Sigma", &CounterexampleInstance::thinness_Sigma)
      .def_readonly("req_spread", &CounterexampleInstance::req_spread)
      .def_readonly("req_dual", &CounterexampleInstance::req_dual)
      .def_readonly("req_balance", &CounterexampleInstance::req_balance)
      .def_readonly("note", &CounterexampleInstance::note)
      .def_readonly("sets_materialized", &CounterexampleInstance::sets_materialized)
      .def_readonly("grid_checked", &CounterexampleInstance::grid_checked)
      .def_readonly("grid_ratio", &CounterexampleInstance::grid_ratio);

  m.def("find_violation", &find_violation, py::arg("pair"), py::arg("k"),
        py::arg("dim") = 1, py::arg("t_max") = 1e18, py::arg("probes") = 20000);
  m.def("counterexample_ladder", &counterexample_ladder, py::arg("pair"),
        py::arg("eps"), py::arg("ks"), py::arg("dim") = 1);
  m.def("dirichlet_window_fraction", &dirichlet_window_fraction, py::arg("modes"),
        py::arg("halfwidth"));
  m.def("bump_spectral_tail", &bump_spectral_tail);
  m.def("bump_norm_sq", &bump_norm_sq);

  py::class_<AtomicMeasure>(m, "AtomicMeasure")
      .def_static("parse", &AtomicMeasure::parse)
      .def_static("bernoulli", &AtomicMeasure::bernoulli)
      .def("describe", &AtomicMeasure::describe)
      .def("__repr__", [](const AtomicMeasure& mu) {
        return "AtomicMeasure(" + mu.describe() + ")";
      });

  m.def("char_function", &char_function, py::arg("mu"), py::arg("xi"));
  m.def("level_set_density", &level_set_density, py::arg("mu"), py::arg("delta"),
        py::arg("window_count") = 64, py::arg("samples_per_window") = 4096);

  py::class_<SymbolPair>(m, "SymbolPair")
      .def(py::init<AtomicMeasure, AtomicMeasure, double, double, int,
                    std::vector<double>, std::vector<double>>(),
           py::arg("mu1"), py::arg("mu2"), py::arg("p"), py::arg("delta"),
           py::arg("dim") = 1, py::arg("a") = std::vector<double>{},
           py::arg("b") = std::vector<double>{})
      .def_readonly("p", &SymbolPair::p)
      .def_readonly("p_conj", &SymbolPair::p_conj)
      .def_readonly("delta", &SymbolPair::delta)
      .def("G", &SymbolPair::G1)
      .def("H", &SymbolPair::H1);

  py::class_<ContractionReport>(m, "ContractionReport")
      .def_readonly("beta", &ContractionReport::beta)
      .def_readonly("beta_lo", &ContractionReport::beta_lo)
      .def_readonly("beta_hi", &ContractionReport::beta_hi)
      .def_readonly("converged", &ContractionReport::converged)
      .def_readonly("iterations", &ContractionReport::iterations)
      .def_readonly("eps_E", &ContractionReport::eps_E)
      .def_readonly("eps_Sigma", &ContractionReport::eps_Sigma)
      .def_readonly("c_emp", &ContractionReport::c_emp)
      .def_readonly("bound_chain_value", &ContractionReport::bound_chain_value)
      .def_readonly("note", &ContractionReport::note);

  m.def("composition_norm", &composition_norm, py::arg("sym"), py::arg("grid"),
        py::arg("max_iter") = 600, py::arg("tol") = 1e-6, py::arg("seed") = 7);

  m.def("parse_grid", &parse_grid, py::arg("text"), py::arg("dim") = 1);
  m.def("run_verify_condition", [](const std::string& spec, double t_max, int probes) {
    return result_to_dict(run_verify_condition(spec, t_max, probes));
  }, py::arg("pair_spec"), py::arg("t_max") = 1e8, py::arg("probes") = 10000);
  m.def("run_thinness", [](const std::string& set_spec, const std::string& rho_spec,
                           double eps, int dim) {
    return result_to_dict(run_thinness(set_spec, rho_spec, eps, dim));
  }, py::arg("set_spec"), py::arg("rho_spec"), py::arg("eps"), py::arg("dim") = 1);
  m.def("run_cover", [](int dim, int count, std::uint64_t seed) {
    return result_to_dict(run_cover(dim, count, seed));
  }, py::arg("dim"), py::arg("count"), py::arg("seed"));
  m.def("run_counterexample", [](const std::string& spec, double eps,
                                 const std::vector<double>& ks, int dim) {
    return result_to_dict(run_counterexample(spec, eps, ks, dim));
  }, py::arg("pair_spec"), py::arg("eps"), py::arg("ks"), py::arg("dim") = 1);
}
