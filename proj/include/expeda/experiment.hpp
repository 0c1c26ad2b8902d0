#pragma once

// Experiment driver behind the command-line tool: the (method x tolerance x
// training size) grid, theory checks at oracle scale, and the matvec
// scaling benchmark.

#include "expeda/eda.hpp"
#include "expeda/io.hpp"
#include "expeda/recognize.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace expeda {

struct DatasetSource {
  enum class Kind { csv, images, synthetic };
  Kind kind = Kind::synthetic;
  std::filesystem::path path;
  SyntheticSpec synthetic;
};

/// csv file, image directory, or synthetic spec, decided by what `path` is.
LabeledDataset load_dataset(const DatasetSource& source);

struct ExperimentConfig {
  DatasetSource source;
  std::vector<Method> methods;
  std::size_t t = 0;  // 0: k - 1
  std::vector<double> tolerances{1e-4};
  std::vector<std::size_t> train_per_class{3};
  std::size_t repeats = 10;
  std::uint64_t seed = 0;
  std::size_t oracle_cap = kDefaultOracleCap;
  double pca_energy = 0.99;
  std::size_t workers = 1;
  bool theory_checks = true;
  std::filesystem::path out = "expeda_out";
};

/// Throws ConfigError on an invalid configuration.
void validate(const ExperimentConfig& config);

struct CellResult {
  Method method = Method::arnoldi_eda;
  double tol = 0.0;  // grid tolerance of the row; direct methods ignore it
  std::size_t per_class_train = 0;
  std::optional<EvaluationReport> report;
  std::string error;
};

struct ExperimentResult {
  std::vector<CellResult> cells;  // ordered by (train size, tolerance, method)
  nlohmann::json theory;          // null when skipped
  bool any_failed() const;
};

ExperimentResult run_experiment(const ExperimentConfig& config, const LabeledDataset& ds);

/// Header: method,t,tol,train_per_class,accuracy_mean,accuracy_std,fit_seconds,classify_seconds
std::string format_table_csv(const ExperimentResult& result);
nlohmann::json report_json(const ExperimentConfig& config, const LabeledDataset& ds,
                           const ExperimentResult& result);
/// Writes <out>/results.csv and <out>/report.json.
void write_reports(const ExperimentConfig& config, const LabeledDataset& ds,
                   const ExperimentResult& result);

/// Numeric checks of the eigenvalue, criterion, unit-eigenvalue and distance
/// inequalities on `ds`. Entries that need dense work are skipped above the
/// oracle cap.
nlohmann::json theory_report(const LabeledDataset& ds, const std::vector<double>& tolerances,
                             std::size_t t, std::size_t per_class_train, std::uint64_t seed,
                             std::size_t oracle_cap);

struct BenchConfig {
  std::vector<std::size_t> dims{10000, 20000, 40000};
  std::size_t n = 30;
  std::size_t k = 6;
  std::size_t reps = 51;
  std::uint64_t seed = 0;
  std::size_t oracle_cap = kDefaultOracleCap;
  bool fit = true;  // also time a full Arnoldi-EDA fit per dimension
  // Bytes swept between timed products to evict the factors from private
  // caches, as the Gram-Schmidt pass does inside the solver. 0 disables.
  std::size_t evict_bytes = std::size_t{16} << 20;
};

struct BenchRow {
  std::size_t d = 0;
  double median_matvec_seconds = 0.0;  // with eviction between products
  double growth = 0.0;                 // median time relative to the previous row
  double median_warm_seconds = 0.0;    // back-to-back products, factors cache-resident
  double fit_seconds = -1.0;
  bool dense_refused = false;
};

std::vector<BenchRow> run_bench(const BenchConfig& config);
nlohmann::json bench_json(const BenchConfig& config, const std::vector<BenchRow>& rows);

}  // namespace expeda
