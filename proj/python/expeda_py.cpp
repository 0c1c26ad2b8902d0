// Python bindings for the main operations. Matrices cross the boundary as
// NumPy arrays (float64, copied).

#include "expeda/analysis.hpp"
#include "expeda/eda.hpp"
#include "expeda/error.hpp"
#include "expeda/experiment.hpp"
#include "expeda/io.hpp"
#include "expeda/krylov.hpp"
#include "expeda/recognize.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace expeda;

namespace {

using Factors = std::shared_ptr<ScatterFactorization>;

Factors factorize(const LabeledDataset& ds) {
  return std::make_shared<ScatterFactorization>(preprocess(build_scatter(ds)));
}

FitOptions fit_options(std::size_t t, double tol, std::uint64_t seed, std::size_t max_basis,
                       std::size_t max_restarts, std::size_t oracle_cap, double pca_energy) {
  FitOptions o;
  o.t = t;
  o.tol = tol;
  o.seed = seed;
  o.max_basis = max_basis;
  o.max_restarts = max_restarts;
  o.oracle_cap = oracle_cap;
  o.pca_energy = pca_energy;
  return o;
}

#define FIT_ARGS                                                                              \
  py::arg("t") = 0, py::arg("tol") = 1e-4, py::arg("seed") = 0, py::arg("max_basis") = 0,     \
      py::arg("max_restarts") = 300, py::arg("oracle_cap") = kDefaultOracleCap,               \
      py::arg("pca_energy") = 0.99

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Exponential discriminant analysis with inexact Krylov solvers";

  auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<DimensionError>(m, "DimensionError", error.ptr());
  py::register_exception<OracleScaleError>(m, "OracleScaleError", error.ptr());
  py::register_exception<SymmetryError>(m, "SymmetryError", error.ptr());
  py::register_exception<DataError>(m, "DataError", error.ptr());
  py::register_exception<SmallSampleSizeError>(m, "SmallSampleSizeError", error.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", error.ptr());
  py::register_exception<IoError>(m, "IoError", error.ptr());
  py::register_exception<ConvergenceError>(m, "ConvergenceError", error.ptr());

  m.attr("DEFAULT_ORACLE_CAP") = kDefaultOracleCap;

  py::class_<LabeledDataset>(m, "LabeledDataset")
      .def_static("from_raw", &LabeledDataset::from_raw, py::arg("data"), py::arg("labels"),
                  py::arg("normalize") = true, "Columns are samples; labels are strings.")
      .def_static("from_indices", &LabeledDataset::from_indices, py::arg("data"), py::arg("labels"),
                  py::arg("names") = std::vector<std::string>{}, py::arg("normalize") = true,
                  "Columns are samples; labels are 0-based class indices.")
      .def_property_readonly("data", &LabeledDataset::data)
      .def_property_readonly("labels", &LabeledDataset::labels)
      .def_property_readonly("class_names", &LabeledDataset::class_names)
      .def_property_readonly("dim", &LabeledDataset::dim)
      .def_property_readonly("size", &LabeledDataset::size)
      .def_property_readonly("num_classes", &LabeledDataset::num_classes)
      .def("class_counts", &LabeledDataset::class_counts)
      .def("select", &LabeledDataset::select, py::arg("columns"));

  m.def(
      "make_synthetic",
      [](std::size_t d, std::size_t k, std::size_t per_class, double noise, double scale, std::uint64_t seed) {
        return make_synthetic(SyntheticSpec{d, k, per_class, noise, scale, seed});
      },
      py::arg("d") = SyntheticSpec{}.d, py::arg("k") = SyntheticSpec{}.k,
      py::arg("per_class") = SyntheticSpec{}.per_class, py::arg("noise") = SyntheticSpec{}.noise,
      py::arg("scale") = SyntheticSpec{}.scale, py::arg("seed") = 0);
  m.def(
      "synthetic_from_spec", [](const std::string& spec) { return make_synthetic(parse_synthetic_spec(spec)); },
      py::arg("spec"));
  m.def("ingest_csv", &ingest_csv, py::arg("path"));
  m.def("export_csv", &export_csv, py::arg("dataset"), py::arg("path"));
  m.def("ingest_image_dir", &ingest_image_dir, py::arg("root"));

  py::class_<ScatterFactorization, Factors>(m, "ScatterFactorization")
      .def_property_readonly("q_b", [](const ScatterFactorization& f) { return f.q_b; })
      .def_property_readonly("d_b", [](const ScatterFactorization& f) { return f.d_b; })
      .def_property_readonly("q_w", [](const ScatterFactorization& f) { return f.q_w; })
      .def_property_readonly("d_w", [](const ScatterFactorization& f) { return f.d_w; })
      .def_property_readonly("dim", &ScatterFactorization::dim);
  m.def("preprocess", &factorize, py::arg("dataset"), "Thin spectral factors of S_B and S_W.");

  auto product = [&m](const char* name, Vector (*fn)(const ScatterFactorization&, const Vector&),
                      const char* doc) {
    m.def(
        name, [fn](const Factors& f, const Vector& v) { return fn(*f, v); }, py::arg("factors"), py::arg("v"),
        doc);
  };
  product("apply_nonsym", &apply_nonsym, "exp(-S_W) exp(S_B) v");
  product("apply_sym", &apply_sym, "exp(-S_W/2) exp(S_B) exp(-S_W/2) v");
  product("apply_sqrt_inv_w", &apply_sqrt_inv_w, "exp(-S_W/2) v");
  product("apply_exp_b", &apply_exp_b, "exp(S_B) v");
  product("apply_exp_neg_w", &apply_exp_neg_w, "exp(-S_W) v");

  py::enum_<DenseKind>(m, "DenseKind")
      .value("exp_b", DenseKind::exp_b)
      .value("exp_neg_w", DenseKind::exp_neg_w)
      .value("exp_w", DenseKind::exp_w)
      .value("sqrt_exp_neg_w", DenseKind::sqrt_exp_neg_w)
      .value("nonsymmetric", DenseKind::nonsymmetric)
      .value("symmetric", DenseKind::symmetric);
  m.def(
      "dense_operator",
      [](const Factors& f, DenseKind kind, std::size_t cap) { return dense_operator(*f, kind, cap); },
      py::arg("factors"), py::arg("kind"), py::arg("oracle_cap") = kDefaultOracleCap);

  py::enum_<Method>(m, "Method")
      .value("arnoldi_eda", Method::arnoldi_eda)
      .value("lanczos_eda", Method::lanczos_eda)
      .value("eda_dense", Method::eda_dense)
      .value("classical_lda", Method::classical_lda)
      .value("lda_pca", Method::lda_pca);
  m.def("parse_method", [](const std::string& s) { return parse_method(s); }, py::arg("name"));

  py::class_<ProjectionBasis>(m, "ProjectionBasis")
      .def_readonly("v", &ProjectionBasis::v)
      .def_readonly("eigenvalues", &ProjectionBasis::eigenvalues)
      .def_readonly("small_sample_size", &ProjectionBasis::small_sample_size)
      .def_readonly("matvecs", &ProjectionBasis::matvecs)
      .def_readonly("restarts", &ProjectionBasis::restarts)
      .def_readonly("tol", &ProjectionBasis::tol)
      .def_property_readonly("method", [](const ProjectionBasis& p) { return p.method; })
      .def_property_readonly("t", &ProjectionBasis::t);

  m.def(
      "fit",
      [](Method method, const LabeledDataset& ds, std::size_t t, double tol, std::uint64_t seed,
         std::size_t max_basis, std::size_t max_restarts, std::size_t cap, double energy) {
        py::gil_scoped_release release;
        return fit(method, ds, fit_options(t, tol, seed, max_basis, max_restarts, cap, energy));
      },
      py::arg("method"), py::arg("dataset"), FIT_ARGS, "Projection basis V (d x t, orthonormal columns).");

  m.def(
      "eda_criterion", [](const Factors& f, const Matrix& v) { return eda_criterion(*f, v).value; },
      py::arg("factors"), py::arg("v"));
  m.def(
      "lda_criterion", [](const LabeledDataset& ds, const Matrix& v) { return lda_criterion(build_scatter(ds), v).value; },
      py::arg("dataset"), py::arg("v"));

  py::class_<SpectrumSummary>(m, "SpectrumSummary")
      .def_readonly("nu", &SpectrumSummary::nu)
      .def_readonly("mu", &SpectrumSummary::mu)
      .def_readonly("lambda_m", &SpectrumSummary::lambda_m)
      .def_readonly("dense", &SpectrumSummary::dense);
  m.def(
      "spectrum_summary", [](const Factors& f, std::size_t cap) { return spectrum_summary(*f, cap); },
      py::arg("factors"), py::arg("oracle_cap") = kDefaultOracleCap);
  m.def(
      "eig_bounds",
      [](const SpectrumSummary& s, std::size_t i) {
        const Interval b = eig_bounds(s, i);
        return std::make_pair(b.lower, b.upper);
      },
      py::arg("summary"), py::arg("i"), "(lower, upper) for the i-th (0-based) eigenvalue of M.");
  m.def(
      "criterion_bounds",
      [](const SpectrumSummary& s, std::size_t t, const std::string& kind) {
        if (kind != "eda" && kind != "lda") throw ConfigError("kind must be 'eda' or 'lda'");
        const Interval b = criterion_bounds(s, t, kind == "eda" ? CriterionKind::eda : CriterionKind::lda);
        return std::make_pair(b.lower, b.upper);
      },
      py::arg("summary"), py::arg("t"), py::arg("kind") = "eda");
  m.def("count_unit_eigs", &count_unit_eigs, py::arg("summary"), py::arg("tol") = 1e-8);

  py::class_<SubspaceAngle>(m, "SubspaceAngle")
      .def_readonly("sin_angle", &SubspaceAngle::sin_angle)
      .def_readonly("cos_angle", &SubspaceAngle::cos_angle)
      .def_readonly("cos_min", &SubspaceAngle::cos_min);
  m.def("subspace_angle", &subspace_angle, py::arg("v"), py::arg("w"));
  m.def("distance_bound_check", &distance_bound_check, py::arg("d_exact"), py::arg("d_tilde"), py::arg("angle"),
        py::arg("slack") = 1e-12);

  m.def(
      "split",
      [](const LabeledDataset& ds, std::size_t per_class_train, std::uint64_t seed, std::size_t repeat) {
        Split s = split(ds, SplitSpec{per_class_train, seed, repeat + 1}, repeat);
        return py::make_tuple(s.train, s.test, s.train_index, s.test_index);
      },
      py::arg("dataset"), py::arg("per_class_train") = 3, py::arg("seed") = 0, py::arg("repeat") = 0,
      "(train, test, train_index, test_index)");
  m.def("nn_classify_all",
        [](const Matrix& v, const LabeledDataset& train, const Matrix& queries) {
          return NearestNeighbor(v, train).classify_all(queries);
        },
        py::arg("v"), py::arg("train"), py::arg("queries"));

  py::class_<EvaluationReport>(m, "EvaluationReport")
      .def_readonly("t", &EvaluationReport::t)
      .def_readonly("tol", &EvaluationReport::tol)
      .def_readonly("per_class_train", &EvaluationReport::per_class_train)
      .def_readonly("accuracy", &EvaluationReport::accuracy)
      .def_readonly("accuracy_std", &EvaluationReport::accuracy_std)
      .def_readonly("fit_seconds", &EvaluationReport::fit_seconds)
      .def_readonly("classify_seconds", &EvaluationReport::classify_seconds)
      .def_readonly("per_repeat_accuracy", &EvaluationReport::per_repeat_accuracy)
      .def_readonly("predictions", &EvaluationReport::predictions);
  m.def(
      "evaluate",
      [](const LabeledDataset& ds, Method method, std::size_t per_class_train, std::size_t repeats,
         std::size_t t, double tol, std::uint64_t seed, std::size_t max_basis, std::size_t max_restarts,
         std::size_t cap, double energy) {
        py::gil_scoped_release release;
        return evaluate(ds, method, fit_options(t, tol, seed, max_basis, max_restarts, cap, energy),
                        SplitSpec{per_class_train, seed, repeats});
      },
      py::arg("dataset"), py::arg("method"), py::arg("per_class_train") = 3, py::arg("repeats") = 10, FIT_ARGS);
}
