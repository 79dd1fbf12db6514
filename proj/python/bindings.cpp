#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/operators.h>
#include <pybind11/stl.h>

#include "mpbo/acquisition.hpp"
#include "mpbo/batch_opt.hpp"
#include "mpbo/bo.hpp"
#include "mpbo/design_io.hpp"
#include "mpbo/errors.hpp"
#include "mpbo/sa.hpp"
#include "mpbo/svg_render.hpp"

namespace py = pybind11;
using namespace mpbo;

PYBIND11_MODULE(_core, m) {
  m.doc() = "sequence-pair macro placement: batch BO and SA over an LP "
            "wirelength objective";

  py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
  py::register_exception<NumericalFailure>(m, "NumericalFailure",
                                           PyExc_RuntimeError);

  py::class_<RngStream>(m, "RngStream")
      .def(py::init<std::uint64_t>(), py::arg("seed"))
      .def("below", &RngStream::below, py::arg("bound"))
      .def("uniform", &RngStream::uniform);

  py::class_<Permutation>(m, "Permutation")
      .def(py::init<std::vector<int>>(), py::arg("order"))
      .def_static("identity", &Permutation::identity, py::arg("n"))
      .def("__len__", &Permutation::size)
      .def("position_of", &Permutation::position_of, py::arg("macro"))
      .def_property_readonly("order", &Permutation::order)
      .def(py::self == py::self)
      .def("__repr__", [](const Permutation& p) {
        std::string s = "Permutation([";
        for (int i = 0; i < p.size(); ++i)
          s += (i ? "," : "") + std::to_string(p.at(i));
        return s + "])";
      });

  py::class_<SequencePair>(m, "SequencePair")
      .def(py::init([](std::vector<int> pi, std::vector<int> pp) {
             return SequencePair{Permutation(std::move(pi)),
                                 Permutation(std::move(pp))};
           }),
           py::arg("pi"), py::arg("pi_prime"))
      .def_readonly("pi", &SequencePair::pi)
      .def_readonly("pi_prime", &SequencePair::pi_prime)
      .def("__len__", &SequencePair::size)
      .def(py::self == py::self);

  py::enum_<Relation>(m, "Relation")
      .value("LEFT_OF", Relation::kLeftOf)
      .value("RIGHT_OF", Relation::kRightOf)
      .value("BELOW", Relation::kBelow)
      .value("ABOVE", Relation::kAbove);

  m.def("relation", &relation, py::arg("sp"), py::arg("i"), py::arg("j"));
  m.def("neighbors", &neighbors, py::arg("sp"));
  m.def("random_sequence_pair", &random_sequence_pair, py::arg("n"),
        py::arg("rng"));
  m.def("canonical_key", [](const SequencePair& sp) {
    return py::bytes(canonical_key(sp));
  });

  py::class_<MacroShape>(m, "MacroShape")
      .def(py::init<double, double>(), py::arg("width"), py::arg("height"))
      .def_readwrite("width", &MacroShape::width)
      .def_readwrite("height", &MacroShape::height);

  py::class_<Outline>(m, "Outline")
      .def(py::init<double, double>(), py::arg("width"), py::arg("height"))
      .def_readwrite("width", &Outline::width)
      .def_readwrite("height", &Outline::height);

  py::class_<Point>(m, "Point")
      .def_readonly("x", &Point::x)
      .def_readonly("y", &Point::y)
      .def("__repr__", [](const Point& p) {
        return "Point(" + std::to_string(p.x) + ", " + std::to_string(p.y) + ")";
      });

  py::class_<PackResult>(m, "PackResult")
      .def_readonly("positions", &PackResult::positions)
      .def_readonly("packed_width", &PackResult::packed_width)
      .def_readonly("packed_height", &PackResult::packed_height);

  m.def(
      "pack",
      [](const SequencePair& sp, const std::vector<MacroShape>& shapes) {
        return pack(sp, shapes);
      },
      py::arg("sp"), py::arg("shapes"));
  m.def(
      "is_feasible",
      [](const SequencePair& sp, const std::vector<MacroShape>& shapes,
         const Outline& outline) { return is_feasible(sp, shapes, outline); },
      py::arg("sp"), py::arg("shapes"), py::arg("outline"));

  py::class_<Pin>(m, "Pin")
      .def(py::init<int, double, double>(), py::arg("macro_id"), py::arg("dx"),
           py::arg("dy"))
      .def_readwrite("macro_id", &Pin::macro_id)
      .def_readwrite("dx", &Pin::dx)
      .def_readwrite("dy", &Pin::dy);

  py::class_<IoPad>(m, "IoPad")
      .def(py::init<std::string, double, double>(), py::arg("name"),
           py::arg("x"), py::arg("y"))
      .def_readwrite("name", &IoPad::name)
      .def_readwrite("x", &IoPad::x)
      .def_readwrite("y", &IoPad::y);

  py::class_<Net>(m, "Net")
      .def(py::init<>())
      .def_readwrite("name", &Net::name)
      .def_readwrite("pins", &Net::pins)
      .def_readwrite("pad_ids", &Net::pad_ids);

  py::class_<Design>(m, "Design")
      .def(py::init<>())
      .def_readwrite("macro_names", &Design::macro_names)
      .def_readwrite("macros", &Design::macros)
      .def_readwrite("pads", &Design::pads)
      .def_readwrite("nets", &Design::nets)
      .def_readwrite("outline", &Design::outline)
      .def_property_readonly("num_macros", &Design::num_macros);

  m.def(
      "validate",
      [](const Design& d) {
        std::vector<std::string> out;
        for (const Violation& v : validate(d)) out.push_back(v.message);
        return out;
      },
      py::arg("design"));
  m.def(
      "load_design",
      [](const std::string& path, const std::string& format, bool project_pads,
         std::optional<std::pair<double, double>> outline, double whitespace) {
        LoadOptions options;
        options.project_pads = project_pads;
        options.whitespace = whitespace;
        if (outline) options.outline = Outline{outline->first, outline->second};
        return load_design(path, parse_format(format), options);
      },
      py::arg("path"), py::arg("format") = "native",
      py::arg("project_pads") = false, py::arg("outline") = py::none(),
      py::arg("whitespace") = 0.15);
  m.def("save_design", &save_design, py::arg("design"), py::arg("path"));

  py::class_<Placement>(m, "Placement")
      .def_readonly("positions", &Placement::positions);

  py::class_<ObjectiveValue>(m, "ObjectiveValue")
      .def_readonly("hpwl", &ObjectiveValue::hpwl)
      .def_readonly("placement", &ObjectiveValue::placement);

  m.def("hpwl_of", &hpwl_of, py::arg("design"), py::arg("placement"));
  m.def("evaluate_sp", &evaluate_sp, py::arg("design"), py::arg("sp"),
        py::call_guard<py::gil_scoped_release>());
  m.def("render_svg", &render_svg, py::arg("design"), py::arg("placement"));

  // --- surrogate model ---
  py::class_<KernelParams>(m, "KernelParams")
      .def(py::init<>())
      .def_readwrite("log_w", &KernelParams::log_w)
      .def_readwrite("log_w_prime", &KernelParams::log_w_prime);

  py::class_<GpHyper>(m, "GpHyper")
      .def(py::init<>())
      .def_readwrite("kernel", &GpHyper::kernel)
      .def_readwrite("noise_var", &GpHyper::noise_var)
      .def_readwrite("mean_const", &GpHyper::mean_const);

  py::class_<Dataset>(m, "Dataset")
      .def(py::init<>())
      .def("add", &Dataset::add, py::arg("sp"), py::arg("y"))
      .def("__len__", &Dataset::size)
      .def("x", &Dataset::x, py::arg("i"))
      .def("y", &Dataset::y, py::arg("i"));

  m.def("k_perm", &k_perm, py::arg("p1"), py::arg("p2"), py::arg("w"));
  m.def("k_sp", &k_sp, py::arg("a"), py::arg("b"), py::arg("params"));
  m.def(
      "gram",
      [](const std::vector<SequencePair>& xs, const KernelParams& params) {
        return gram(xs, params);
      },
      py::arg("xs"), py::arg("params"));
  m.def("mll", &mll, py::arg("hyper"), py::arg("data"));
  m.def("default_init", &default_init, py::arg("data"));
  m.def(
      "fit",
      [](const Dataset& data, const GpHyper& init, int max_iters) {
        FitOptions opts;
        opts.max_iters = max_iters;
        return fit(data, init, opts);
      },
      py::arg("data"), py::arg("init"), py::arg("max_iters") = 100);

  py::class_<YTransform>(m, "YTransform")
      .def_readonly("mean", &YTransform::mean)
      .def_readonly("scale", &YTransform::scale);
  m.def("standardized", &standardized, py::arg("data"));

  py::class_<GpPosterior>(m, "GpPosterior")
      .def(py::init<GpHyper, Dataset, YTransform>(), py::arg("hyper"),
           py::arg("data"), py::arg("transform") = YTransform{})
      .def("predict", &GpPosterior::predict, py::arg("x"))
      .def("predict_raw", &GpPosterior::predict_raw, py::arg("x"))
      .def("cross_cov", &GpPosterior::cross_cov, py::arg("a"), py::arg("b"));

  // --- acquisition and batch proposal ---
  py::enum_<AcqKind>(m, "AcqKind")
      .value("EI", AcqKind::kEi)
      .value("UCB", AcqKind::kUcb);

  py::class_<AcqConfig>(m, "AcqConfig")
      .def(py::init<>())
      .def_readwrite("kind", &AcqConfig::kind)
      .def_readwrite("ucb_beta", &AcqConfig::ucb_beta)
      .def_readwrite("incumbent", &AcqConfig::incumbent);

  py::class_<RhoContext>(m, "RhoContext")
      .def(py::init<>())
      .def_readwrite("shift", &RhoContext::shift)
      .def_readwrite("scale", &RhoContext::scale);

  py::class_<BatchAcqConfig>(m, "BatchAcqConfig")
      .def(py::init<>())
      .def_readwrite("batch_size", &BatchAcqConfig::batch_size)
      .def_readwrite("rho_scale", &BatchAcqConfig::rho_scale);

  m.def("expected_improvement", &expected_improvement, py::arg("mu"),
        py::arg("var"), py::arg("incumbent"));
  m.def("upper_confidence_bound", &upper_confidence_bound, py::arg("mu"),
        py::arg("var"), py::arg("beta"));
  m.def("acq_single", &acq_single, py::arg("post"), py::arg("x"),
        py::arg("cfg"));
  m.def(
      "acq_batch",
      [](const GpPosterior& post, const std::vector<SequencePair>& xs,
         const AcqConfig& cfg, const RhoContext& rho) {
        return acq_batch(post, xs, cfg, rho);
      },
      py::arg("post"), py::arg("xs"), py::arg("cfg"), py::arg("rho"));

  py::class_<FeasibleSet>(m, "FeasibleSet")
      .def(py::init<>())
      .def("insert", &FeasibleSet::insert, py::arg("sp"))
      .def("__len__", &FeasibleSet::size)
      .def("at", &FeasibleSet::at, py::arg("i"));

  m.def(
      "optimize_batch",
      [](const GpPosterior& post, const AcqConfig& acq,
         const BatchAcqConfig& batch, FeasibleSet& feasible, RngStream& rng,
         const std::vector<MacroShape>& shapes, const Outline& outline,
         int s_max) {
        BatchOptOptions opts;
        opts.s_max = s_max;
        const FeasibleFn gate = [&shapes, &outline](const SequencePair& sp) {
          return is_feasible(sp, shapes, outline);
        };
        return optimize_batch(post, acq, batch, feasible, rng, gate, opts)
            .points;
      },
      py::arg("post"), py::arg("acq"), py::arg("batch"), py::arg("feasible"),
      py::arg("rng"), py::arg("shapes"), py::arg("outline"),
      py::arg("s_max") = 20);

  // --- engines ---
  py::class_<EvalRow>(m, "EvalRow")
      .def_readonly("index", &EvalRow::index)
      .def_readonly("round", &EvalRow::round)
      .def_readonly("sp", &EvalRow::sp)
      .def_readonly("hpwl", &EvalRow::hpwl)
      .def_readonly("best_so_far", &EvalRow::best_so_far);

  py::class_<RunRecord>(m, "RunRecord")
      .def_readonly("rows", &RunRecord::rows)
      .def_readonly("best_hpwl", &RunRecord::best_hpwl)
      .def_readonly("best_sp", &RunRecord::best_sp)
      .def_readonly("best_placement", &RunRecord::best_placement)
      .def_readonly("complete", &RunRecord::complete)
      .def_readonly("note", &RunRecord::note)
      .def_property_readonly("config", [](const RunRecord& r) {
        return r.config.dump();
      });

  m.def("write_run_record", &write_run_record, py::arg("record"),
        py::arg("path"));
  m.def("read_run_record", &read_run_record, py::arg("path"));

  py::class_<BoConfig>(m, "BoConfig")
      .def(py::init<>())
      .def_readwrite("n_init", &BoConfig::n_init)
      .def_readwrite("rounds", &BoConfig::rounds)
      .def_readwrite("batch", &BoConfig::batch)
      .def_readwrite("acq_kind", &BoConfig::acq_kind)
      .def_readwrite("ucb_beta", &BoConfig::ucb_beta)
      .def_readwrite("threads", &BoConfig::threads);

  py::enum_<Schedule>(m, "Schedule")
      .value("LINEAR", Schedule::kLinear)
      .value("EXPONENTIAL", Schedule::kExponential)
      .value("STEPDOWN", Schedule::kStepdown);

  py::class_<SaConfig>(m, "SaConfig")
      .def(py::init<>())
      .def_readwrite("t0", &SaConfig::t0)
      .def_readwrite("schedule", &SaConfig::schedule)
      .def_readwrite("budget", &SaConfig::budget)
      .def_readwrite("t_final", &SaConfig::t_final)
      .def_readwrite("steps_per_stage", &SaConfig::steps_per_stage);

  m.def("temperature", &temperature, py::arg("cfg"), py::arg("step"));
  m.def("run_bo", &run_bo, py::arg("design"), py::arg("cfg"), py::arg("seed"),
        py::call_guard<py::gil_scoped_release>());
  m.def("run_sa", &run_sa, py::arg("design"), py::arg("cfg"), py::arg("seed"),
        py::call_guard<py::gil_scoped_release>());
}
