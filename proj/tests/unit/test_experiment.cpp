#include "expeda/error.hpp"
#include "expeda/experiment.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <fstream>
#include <sstream>

using namespace expeda;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.source.synthetic = SyntheticSpec{60, 4, 6, 2.0, 1.0, 3};
  c.methods = all_methods();
  c.tolerances = {1e-2, 1e-6};
  c.train_per_class = {2, 3};
  c.repeats = 3;
  return c;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream is(text);
  for (std::string line; std::getline(is, line);) out.push_back(line);
  return out;
}

// Drops the last two (timing) columns.
std::string without_timing(const std::string& line) {
  auto cut = line.rfind(',');
  cut = line.rfind(',', cut - 1);
  return line.substr(0, cut);
}

}  // namespace

TEST_CASE("config validation") {
  auto c = small_config();
  CHECK_NOTHROW(validate(c));
  c.methods.clear();
  CHECK_THROWS_AS(validate(c), ConfigError);
  c = small_config();
  c.tolerances = {-1.0};
  CHECK_THROWS_AS(validate(c), ConfigError);
  c = small_config();
  c.repeats = 0;
  CHECK_THROWS_AS(validate(c), ConfigError);
}

TEST_CASE("grid table layout: five rows per tolerance and training size") {
  const auto c = small_config();
  const auto ds = load_dataset(c.source);
  const auto res = run_experiment(c, ds);
  CHECK_FALSE(res.any_failed());
  const auto rows = lines(format_table_csv(res));
  REQUIRE(rows.size() == 1 + 2 * 2 * 5);
  CHECK(rows[0] == "method,t,tol,train_per_class,accuracy_mean,accuracy_std,fit_seconds,classify_seconds");
  CHECK(rows[1].rfind("arnoldi_eda,3,0.01,2,", 0) == 0);
  CHECK(rows[5].rfind("lda_pca,3,0.01,2,", 0) == 0);
  CHECK(rows[6].rfind("arnoldi_eda,3,1e-06,2,", 0) == 0);
  CHECK(rows[20].rfind("lda_pca,3,1e-06,3,", 0) == 0);
  CHECK(res.theory.contains("eigenvalue_bounds"));
  CHECK(res.theory["eigenvalue_bounds"]["holds"].get<bool>());
}

TEST_CASE("tolerance sweep rows") {
  auto c = small_config();
  c.methods = {Method::arnoldi_eda};
  c.tolerances = {1e-2, 1e-4, 1e-6, 1e-8, 1e-10};
  c.train_per_class = {3};
  c.theory_checks = false;
  const auto res = run_experiment(c, load_dataset(c.source));
  const auto rows = lines(format_table_csv(res));
  REQUIRE(rows.size() == 6);
  CHECK(rows[5].rfind("arnoldi_eda,3,1e-10,3,", 0) == 0);
  CHECK(res.theory.is_null());
}

TEST_CASE("output is deterministic apart from timing") {
  auto c = small_config();
  c.workers = 3;
  const auto ds = load_dataset(c.source);
  const auto a = lines(format_table_csv(run_experiment(c, ds)));
  c.workers = 1;
  const auto b = lines(format_table_csv(run_experiment(c, ds)));
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 1; i < a.size(); ++i) CHECK(without_timing(a[i]) == without_timing(b[i]));
}

TEST_CASE("failed cells are recorded and reports agree") {
  auto c = small_config();
  c.methods = {Method::eda_dense, Method::arnoldi_eda};
  c.tolerances = {1e-4};
  c.train_per_class = {3};
  c.oracle_cap = 50;
  c.theory_checks = false;
  const auto ds = load_dataset(c.source);
  const auto res = run_experiment(c, ds);
  CHECK(res.any_failed());
  REQUIRE(res.cells.size() == 2);
  CHECK_FALSE(res.cells[0].report.has_value());
  CHECK(res.cells[0].error.find("oracle") != std::string::npos);
  const auto rows = lines(format_table_csv(res));
  CHECK(rows[1] == "eda_dense,,0.0001,3,nan,nan,nan,nan");

  const auto j = report_json(c, ds, res);
  CHECK(j["failed"].get<bool>());
  CHECK(j["cells"][0].contains("error"));
  const auto& cell = j["cells"][1];
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", cell["accuracy_mean"].get<double>());
  CHECK(rows[2].find(std::string(",") + buf + ",") != std::string::npos);
  CHECK(cell["method"] == "arnoldi_eda");
  CHECK(cell["per_repeat_accuracy"].size() == 3);
}

TEST_CASE("reports are written to the output directory") {
  auto c = small_config();
  c.methods = {Method::lanczos_eda};
  c.tolerances = {1e-4};
  c.train_per_class = {3};
  c.out = std::filesystem::temp_directory_path() / "expeda_report_test";
  const auto ds = load_dataset(c.source);
  write_reports(c, ds, run_experiment(c, ds));
  CHECK(std::filesystem::exists(c.out / "results.csv"));
  std::ifstream js(c.out / "report.json");
  const auto j = nlohmann::json::parse(js);
  CHECK(j["config"]["methods"][0] == "lanczos_eda");
  std::filesystem::remove_all(c.out);
}

TEST_CASE("synthetic SSS regime: LDA flags SSS and EDA runs") {
  SyntheticSpec s;
  s.d = 150;
  s.k = 6;
  s.per_class = 5;
  const auto ds = make_synthetic(s);
  CHECK(ds.size() < ds.dim());
  CHECK(fit_classical_lda(ds, FitOptions{}).small_sample_size);
  CHECK(fit_arnoldi_eda(ds, FitOptions{}).t() == 5);
}

TEST_CASE("bench rows") {
  BenchConfig b;
  b.dims = {2000, 4000};
  b.reps = 5;
  b.oracle_cap = 3000;
  const auto rows = run_bench(b);
  REQUIRE(rows.size() == 2);
  CHECK_FALSE(rows[0].dense_refused);
  CHECK(rows[1].dense_refused);
  CHECK(rows[0].growth == 1.0);
  CHECK(rows[1].median_matvec_seconds > 0.0);
  CHECK(rows[1].fit_seconds >= 0.0);
  CHECK(bench_json(b, rows).size() == 2);
  b.n = 31;
  CHECK_THROWS_AS(run_bench(b), ConfigError);
}
