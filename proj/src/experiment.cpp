#include "expeda/experiment.hpp"

#include "expeda/analysis.hpp"
#include "expeda/error.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <thread>

namespace fs = std::filesystem;
using nlohmann::json;

namespace expeda {

namespace {

double median(std::vector<double> x) {
  const auto mid = x.begin() + static_cast<std::ptrdiff_t>(x.size() / 2);
  std::nth_element(x.begin(), mid, x.end());
  return *mid;
}

void evict(std::vector<double>& scratch) {
  for (double& x : scratch) x += 1.0;
}

bool iterative(Method m) { return m == Method::arnoldi_eda || m == Method::lanczos_eda; }

std::string format_number(const char* fmt, double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, value);
  return buf;
}

json report_to_json(const EvaluationReport& r) {
  return {{"method", method_name(r.method)},
          {"t", r.t},
          {"tol", r.tol},
          {"train_per_class", r.per_class_train},
          {"accuracy_mean", r.accuracy},
          {"accuracy_std", r.accuracy_std},
          {"fit_seconds", r.fit_seconds},
          {"classify_seconds", r.classify_seconds},
          {"per_repeat_accuracy", r.per_repeat_accuracy}};
}

}  // namespace

LabeledDataset load_dataset(const DatasetSource& source) {
  switch (source.kind) {
    case DatasetSource::Kind::synthetic:
      return make_synthetic(source.synthetic);
    case DatasetSource::Kind::images:
      return ingest_image_dir(source.path);
    case DatasetSource::Kind::csv:
      return ingest_csv(source.path);
  }
  throw ConfigError("unknown dataset source");
}

void validate(const ExperimentConfig& config) {
  if (config.methods.empty()) throw ConfigError("at least one method is required");
  if (config.tolerances.empty()) throw ConfigError("at least one tolerance is required");
  for (double tol : config.tolerances) {
    if (!(tol > 0.0)) throw ConfigError("tolerances must be positive");
  }
  if (config.train_per_class.empty()) throw ConfigError("at least one training size is required");
  for (std::size_t l : config.train_per_class) {
    if (l < 1) throw ConfigError("training size per class must be at least 1");
  }
  if (config.repeats < 1) throw ConfigError("repeats must be at least 1");
  if (config.workers < 1) throw ConfigError("workers must be at least 1");
  if (!(config.pca_energy > 0.0 && config.pca_energy <= 1.0)) throw ConfigError("PCA energy must lie in (0, 1]");
}

bool ExperimentResult::any_failed() const {
  return std::any_of(cells.begin(), cells.end(), [](const CellResult& c) { return !c.report; });
}

ExperimentResult run_experiment(const ExperimentConfig& config, const LabeledDataset& ds) {
  validate(config);

  // Direct methods do not depend on the tolerance: run them once per training
  // size and repeat the row for every tolerance.
  struct Job {
    Method method;
    double tol;
    std::size_t per_class;
  };
  std::vector<Job> jobs;
  for (std::size_t l : config.train_per_class) {
    for (Method m : config.methods) {
      if (iterative(m)) {
        for (double tol : config.tolerances) jobs.push_back({m, tol, l});
      } else {
        jobs.push_back({m, 0.0, l});
      }
    }
  }

  std::vector<CellResult> done(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      const Job& job = jobs[i];
      CellResult cell{job.method, job.tol, job.per_class, std::nullopt, {}};
      FitOptions fit_opts;
      fit_opts.t = config.t;
      fit_opts.tol = iterative(job.method) ? job.tol : 1e-4;
      fit_opts.seed = config.seed;
      fit_opts.oracle_cap = config.oracle_cap;
      fit_opts.pca_energy = config.pca_energy;
      SplitSpec spec{job.per_class, config.seed, config.repeats};
      try {
        cell.report = evaluate(ds, job.method, fit_opts, spec);
      } catch (const std::exception& e) {
        cell.error = e.what();
      }
      done[i] = std::move(cell);
    }
  };
  {
    std::vector<std::jthread> pool;
    const std::size_t nthreads = std::min(config.workers, jobs.size());
    for (std::size_t w = 1; w < nthreads; ++w) pool.emplace_back(worker);
    worker();
  }

  ExperimentResult result;
  std::size_t j = 0;
  for (std::size_t l : config.train_per_class) {
    const std::size_t first = j;
    while (j < jobs.size() && jobs[j].per_class == l) ++j;
    for (double tol : config.tolerances) {
      for (std::size_t i = first; i < j; ++i) {
        if (iterative(jobs[i].method) && jobs[i].tol != tol) continue;
        CellResult cell = done[i];
        cell.tol = tol;
        result.cells.push_back(std::move(cell));
      }
    }
  }

  if (config.theory_checks) {
    try {
      result.theory = theory_report(ds, config.tolerances, config.t, config.train_per_class.front(),
                                    config.seed, config.oracle_cap);
    } catch (const std::exception& e) {
      result.theory = {{"error", e.what()}};
    }
  }
  return result;
}

std::string format_table_csv(const ExperimentResult& result) {
  std::string out = "method,t,tol,train_per_class,accuracy_mean,accuracy_std,fit_seconds,classify_seconds\n";
  for (const auto& cell : result.cells) {
    out += std::string(method_name(cell.method)) + ",";
    if (cell.report) {
      const auto& r = *cell.report;
      out += std::to_string(r.t) + "," + format_number("%g", cell.tol) + "," +
             std::to_string(cell.per_class_train) + "," + format_number("%.3f", r.accuracy) + "," +
             format_number("%.3f", r.accuracy_std) + "," + format_number("%.6f", r.fit_seconds) + "," +
             format_number("%.6f", r.classify_seconds) + "\n";
    } else {
      out += "," + format_number("%g", cell.tol) + "," + std::to_string(cell.per_class_train) +
             ",nan,nan,nan,nan\n";
    }
  }
  return out;
}

json report_json(const ExperimentConfig& config, const LabeledDataset& ds, const ExperimentResult& result) {
  json cfg;
  switch (config.source.kind) {
    case DatasetSource::Kind::synthetic:
      cfg["synthetic"] = format_synthetic_spec(config.source.synthetic);
      break;
    default:
      cfg["data"] = config.source.path.string();
  }
  std::vector<std::string> methods;
  for (Method m : config.methods) methods.emplace_back(method_name(m));
  cfg["methods"] = methods;
  cfg["t"] = config.t;
  cfg["tolerances"] = config.tolerances;
  cfg["train_per_class"] = config.train_per_class;
  cfg["repeats"] = config.repeats;
  cfg["seed"] = config.seed;
  cfg["oracle_cap"] = config.oracle_cap;
  cfg["pca_energy"] = config.pca_energy;
  cfg["workers"] = config.workers;

  json cells = json::array();
  for (const auto& cell : result.cells) {
    json c;
    if (cell.report) {
      c = report_to_json(*cell.report);
      c["tol"] = cell.tol;
      c["tol_used"] = iterative(cell.method);
    } else {
      c = {{"method", method_name(cell.method)},
           {"tol", cell.tol},
           {"train_per_class", cell.per_class_train},
           {"error", cell.error}};
    }
    cells.push_back(std::move(c));
  }
  return {{"config", cfg},
          {"dataset", {{"d", ds.dim()}, {"n", ds.size()}, {"k", ds.num_classes()}}},
          {"cells", cells},
          {"theory", result.theory},
          {"failed", result.any_failed()}};
}

void write_reports(const ExperimentConfig& config, const LabeledDataset& ds, const ExperimentResult& result) {
  std::error_code ec;
  fs::create_directories(config.out, ec);
  if (ec) throw IoError("cannot create '" + config.out.string() + "': " + ec.message());
  {
    std::ofstream csv(config.out / "results.csv");
    csv << format_table_csv(result);
    if (!csv) throw IoError("cannot write results.csv");
  }
  std::ofstream js(config.out / "report.json");
  js << report_json(config, ds, result).dump(2) << '\n';
  if (!js) throw IoError("cannot write report.json");
}

json theory_report(const LabeledDataset& ds, const std::vector<double>& tolerances, std::size_t t_in,
                   std::size_t per_class_train, std::uint64_t seed, std::size_t oracle_cap) {
  const std::size_t t = resolve_t(ds, t_in);
  const std::size_t d = ds.dim();
  const std::size_t n = ds.size();
  const ScatterPair sp = build_scatter(ds);
  const auto f = std::make_shared<const ScatterFactorization>(preprocess(sp));
  const bool dense = d <= oracle_cap;
  const SpectrumSummary s = spectrum_summary(*f, oracle_cap);

  json out;
  out["oracle_scale"] = dense;
  out["lambda_from_dense"] = s.dense;

  // Eigenvalue sandwich.
  {
    double worst = -INFINITY;
    for (std::size_t i = 0; i < d; ++i) {
      const Interval b = eig_bounds(s, i);
      const double lam = s.lambda_m(static_cast<Eigen::Index>(i));
      worst = std::max({worst, b.lower - lam, lam - b.upper});
    }
    out["eigenvalue_bounds"] = {{"holds", worst <= 1e-8}, {"max_violation", worst}};
  }

  // Unit eigenvalues of M.
  {
    const std::size_t count = count_unit_eigs(s, 1e-8);
    const bool independent =
        n <= d && Eigen::JacobiSVD<Matrix>(ds.data()).singularValues().minCoeff() > 1e-8;
    const long long guaranteed = static_cast<long long>(d) - static_cast<long long>(n) + 1;
    out["unit_eigenvalues"] = {{"count", count},
                               {"guaranteed", guaranteed},
                               {"samples_independent", independent},
                               {"holds", !independent || static_cast<long long>(count) >= guaranteed}};
  }

  if (dense) {
    const ProjectionBasis v_dense = fit_eda_dense(*f, t, oracle_cap);
    const double rho = eda_criterion(*f, v_dense.v).value;
    const Interval b = criterion_bounds(s, t, CriterionKind::eda);
    out["eda_criterion_bounds"] = {{"rho", rho},
                                   {"lower", b.lower},
                                   {"upper", b.upper},
                                   {"holds", b.lower - 1e-8 * b.lower <= rho && rho <= b.upper + 1e-8 * b.upper}};

    const double nu_d = s.nu(s.nu.size() - 1);
    if (nu_d > 1e-10 * s.nu(0)) {
      const ProjectionBasis v_lda = fit_classical_lda(sp, t, oracle_cap);
      const double varrho = lda_criterion(sp, v_lda.v).value;
      const Interval lb = criterion_bounds(s, t, CriterionKind::lda);
      out["lda_criterion_bounds"] = {{"varrho", varrho},
                                     {"lower", lb.lower},
                                     {"upper", lb.upper},
                                     {"holds", lb.lower * (1 - 1e-8) <= varrho && varrho <= lb.upper * (1 + 1e-8)}};
    } else {
      out["lda_criterion_bounds"] = {{"applicable", false}, {"reason", "S_W is singular"}};
    }

    // Distance perturbation on one split.
    json dist = json::array();
    try {
      const Split sp_split = split(ds, SplitSpec{per_class_train, seed, 1}, 0);
      const std::size_t t_train = std::min(t, sp_split.train.dim());
      const auto f_train = std::make_shared<const ScatterFactorization>(preprocess(build_scatter(sp_split.train)));
      const ProjectionBasis exact = fit_eda_dense(*f_train, t_train, oracle_cap);
      for (double tol : tolerances) {
        FitOptions opts;
        opts.tol = tol;
        opts.seed = seed;
        const ProjectionBasis approx = fit_arnoldi_eda(f_train, t_train, opts);
        const SubspaceAngle ang = subspace_angle(exact.v, approx.v);
        std::size_t pairs = 0;
        std::size_t holding = 0;
        const Matrix px = exact.v.transpose() * sp_split.train.data();
        const Matrix py = exact.v.transpose() * sp_split.test.data();
        const Matrix qx = approx.v.transpose() * sp_split.train.data();
        const Matrix qy = approx.v.transpose() * sp_split.test.data();
        for (Eigen::Index i = 0; i < px.cols(); ++i) {
          for (Eigen::Index j = 0; j < py.cols(); ++j) {
            ++pairs;
            if (distance_bound_check((px.col(i) - py.col(j)).norm(), (qx.col(i) - qy.col(j)).norm(), ang)) ++holding;
          }
        }
        dist.push_back({{"tol", tol},
                        {"sin_angle", ang.sin_angle},
                        {"cos_angle", ang.cos_angle},
                        {"pairs", pairs},
                        {"holding", holding},
                        {"holds", holding == pairs}});
      }
    } catch (const std::exception& e) {
      dist = {{"error", e.what()}};
    }
    out["distance_bounds"] = dist;
  }
  return out;
}

std::vector<BenchRow> run_bench(const BenchConfig& config) {
  if (config.dims.empty() || config.reps < 1) throw ConfigError("bench: need dimensions and reps >= 1");
  if (config.k < 2 || config.n < config.k || config.n % config.k != 0) {
    throw ConfigError("bench: n must be a positive multiple of k >= 2");
  }
  using clock = std::chrono::steady_clock;

  struct Case {
    std::shared_ptr<const ScatterFactorization> f;
    Vector v;
    Vector w;
    std::vector<double> cold;
    std::vector<double> warm;
  };
  std::vector<Case> cases;
  for (std::size_t d : config.dims) {
    SyntheticSpec spec;
    spec.d = d;
    spec.k = config.k;
    spec.per_class = config.n / config.k;
    spec.seed = config.seed;
    Case c;
    c.f = std::make_shared<const ScatterFactorization>(preprocess(build_scatter(make_synthetic(spec))));
    std::mt19937_64 rng(config.seed);
    std::normal_distribution<double> normal;
    c.v.resize(static_cast<Eigen::Index>(d));
    for (Eigen::Index i = 0; i < c.v.size(); ++i) c.v(i) = normal(rng);
    apply_nonsym(*c.f, c.v, c.w);  // warm-up, sizes the output
    cases.push_back(std::move(c));
  }

  std::vector<double> scratch(config.evict_bytes / sizeof(double), 1.0);
  double sink = 0.0;
  auto timed = [&](Case& c) {
    const auto t0 = clock::now();
    apply_nonsym(*c.f, c.v, c.w);
    const auto t1 = clock::now();
    sink += c.w(0);
    return std::chrono::duration<double>(t1 - t0).count();
  };
  // Dimensions are interleaved within each repetition so that slow phases of
  // the machine affect all of them alike.
  for (std::size_t r = 0; r < config.reps; ++r) {
    for (auto& c : cases) {
      evict(scratch);
      c.cold.push_back(timed(c));
    }
  }
  for (std::size_t r = 0; r < config.reps; ++r) {
    for (auto& c : cases) c.warm.push_back(timed(c));
  }

  std::vector<BenchRow> rows;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    BenchRow row;
    row.d = config.dims[i];
    row.median_matvec_seconds = median(cases[i].cold);
    row.median_warm_seconds = median(cases[i].warm);
    row.growth = rows.empty() ? 1.0 : row.median_matvec_seconds / rows.back().median_matvec_seconds;
    if (config.fit) {
      FitOptions opts;
      opts.seed = config.seed;
      const auto t0 = clock::now();
      fit_arnoldi_eda(cases[i].f, config.k - 1, opts);
      row.fit_seconds = std::chrono::duration<double>(clock::now() - t0).count();
    }
    try {
      require_oracle_scale(row.d, config.oracle_cap);
    } catch (const OracleScaleError&) {
      row.dense_refused = true;
    }
    rows.push_back(row);
  }
  if (!std::isfinite(sink)) throw Error("bench: non-finite product");
  return rows;
}

json bench_json(const BenchConfig& config, const std::vector<BenchRow>& rows) {
  json out = json::array();
  for (const auto& r : rows) {
    out.push_back({{"d", r.d},
                   {"n", config.n},
                   {"k", config.k},
                   {"reps", config.reps},
                   {"evict_bytes", config.evict_bytes},
                   {"median_matvec_seconds", r.median_matvec_seconds},
                   {"median_warm_seconds", r.median_warm_seconds},
                   {"growth", r.growth},
                   {"fit_seconds", r.fit_seconds},
                   {"dense_refused", r.dense_refused}});
  }
  return out;
}

}  // namespace expeda
