// Command-line front end: run, bounds, bench.

#include "expeda/error.hpp"
#include "expeda/experiment.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <set>
#include <string>
#include <vector>

namespace {

enum Exit : int { ok = 0, config_error = 1, cell_failure = 2, io_error = 3 };

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

// Replaces --config FILE with the file's key=value lines as --key value
// arguments. Keys already given on the command line win; a key may repeat.
std::vector<std::string> expand_config(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw expeda::ConfigError("--config needs a file name");
      path = args[i + 1];
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
      break;
    }
  }
  if (path.empty()) return args;

  std::ifstream in(path);
  if (!in) throw expeda::IoError("cannot read config file '" + path + "'");
  std::set<std::string> given;
  for (const auto& a : args) {
    if (a.rfind("--", 0) == 0) given.insert(a.substr(2, a.find('=') == std::string::npos ? std::string::npos : a.find('=') - 2));
  }
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw expeda::ConfigError(path + ":" + std::to_string(lineno) + ": expected key=value");
    }
    std::string key = trim(line.substr(0, eq));
    std::replace(key.begin(), key.end(), '_', '-');
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw expeda::ConfigError(path + ":" + std::to_string(lineno) + ": empty key");
    if (given.count(key)) continue;
    if (value == "true") {
      args.push_back("--" + key);
    } else if (value != "false") {
      args.push_back("--" + key);
      args.push_back(value);
    }
  }
  return args;
}

struct CommonFlags {
  std::string data;
  std::string synthetic;
  std::vector<std::string> methods;
  std::size_t t = 0;
  std::vector<double> tolerances;
  std::vector<std::size_t> train_per_class;
  std::size_t repeats = 10;
  std::uint64_t seed = 0;
  std::size_t oracle_cap = expeda::kDefaultOracleCap;
  std::size_t workers = 1;
  double pca_energy = 0.99;
  bool no_theory = false;
  std::string out = "expeda_out";
};

void add_dataset_flags(CLI::App* app, CommonFlags& f) {
  auto* data = app->add_option("--data", f.data, "CSV file or directory of class subdirectories with PGM images");
  auto* syn = app->add_option("--synthetic", f.synthetic,
                              "synthetic spec, e.g. d=400,k=10,per_class=10,noise=3,scale=1,seed=0 (bare flag: defaults)")
                  ->expected(0, 1);
  data->excludes(syn);
  app->add_option("--t", f.t, "projection dimension (default k-1)");
  app->add_option("--seed", f.seed, "random seed for splits and start vectors");
  app->add_option("--oracle-cap", f.oracle_cap, "largest dimension for dense reference work");
  app->add_option("--out", f.out, "output directory");
}

expeda::DatasetSource make_source(const CommonFlags& f) {
  expeda::DatasetSource src;
  if (!f.data.empty()) {
    src.path = f.data;
    std::error_code ec;
    if (!std::filesystem::exists(src.path, ec)) throw expeda::IoError("no such file or directory: " + f.data);
    src.kind = std::filesystem::is_directory(src.path, ec) ? expeda::DatasetSource::Kind::images
                                                          : expeda::DatasetSource::Kind::csv;
  } else {
    src.kind = expeda::DatasetSource::Kind::synthetic;
    // A bare flag in a config file arrives as "true".
    src.synthetic = expeda::parse_synthetic_spec(f.synthetic == "true" ? std::string{} : f.synthetic);
  }
  return src;
}

expeda::ExperimentConfig make_config(const CommonFlags& f) {
  expeda::ExperimentConfig cfg;
  cfg.source = make_source(f);
  if (f.methods.empty()) {
    cfg.methods = expeda::all_methods();
  } else {
    for (const auto& m : f.methods) cfg.methods.push_back(expeda::parse_method(m));
  }
  cfg.t = f.t;
  if (!f.tolerances.empty()) cfg.tolerances = f.tolerances;
  if (!f.train_per_class.empty()) cfg.train_per_class = f.train_per_class;
  cfg.repeats = f.repeats;
  cfg.seed = f.seed;
  cfg.oracle_cap = f.oracle_cap;
  cfg.workers = f.workers;
  cfg.pca_energy = f.pca_energy;
  cfg.theory_checks = !f.no_theory;
  cfg.out = f.out;
  expeda::validate(cfg);
  return cfg;
}

void write_json(const std::filesystem::path& dir, const std::string& name, const nlohmann::json& j) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw expeda::IoError("cannot create '" + dir.string() + "': " + ec.message());
  std::ofstream os(dir / name);
  os << j.dump(2) << '\n';
  if (!os) throw expeda::IoError("cannot write " + (dir / name).string());
}

int cmd_run(const CommonFlags& f) {
  const auto cfg = make_config(f);
  const auto ds = expeda::load_dataset(cfg.source);
  const auto result = expeda::run_experiment(cfg, ds);
  expeda::write_reports(cfg, ds, result);
  std::cout << expeda::format_table_csv(result);
  for (const auto& cell : result.cells) {
    if (!cell.report) {
      std::cerr << "cell " << expeda::method_name(cell.method) << " tol=" << cell.tol
                << " l=" << cell.per_class_train << " failed: " << cell.error << '\n';
    }
  }
  return result.any_failed() ? cell_failure : ok;
}

int cmd_bounds(const CommonFlags& f) {
  const auto src = make_source(f);
  const auto ds = expeda::load_dataset(src);
  const std::vector<double> tols = f.tolerances.empty() ? std::vector<double>{1e-2, 1e-4, 1e-6} : f.tolerances;
  const std::size_t l = f.train_per_class.empty() ? 3 : f.train_per_class.front();
  const auto report = expeda::theory_report(ds, tols, f.t, l, f.seed, f.oracle_cap);
  write_json(f.out, "bounds.json", report);
  std::cout << report.dump(2) << '\n';
  return ok;
}

int cmd_bench(const CommonFlags& f, expeda::BenchConfig bc) {
  bc.seed = f.seed;
  bc.oracle_cap = f.oracle_cap;
  const auto rows = expeda::run_bench(bc);
  const auto report = expeda::bench_json(bc, rows);
  write_json(f.out, "bench.json", report);
  std::cout << "d,median_matvec_seconds,growth,median_warm_seconds,fit_seconds,dense_refused\n";
  for (const auto& r : rows) {
    std::cout << r.d << ',' << r.median_matvec_seconds << ',' << r.growth << ',' << r.median_warm_seconds << ',' << r.fit_seconds << ','
              << (r.dense_refused ? "true" : "false") << '\n';
  }
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exponential discriminant analysis with inexact Krylov solvers"};
  app.name("expeda");
  app.require_subcommand(1);

  CommonFlags run_flags;
  auto* run = app.add_subcommand("run", "evaluate methods over a tolerance and training-size grid");
  add_dataset_flags(run, run_flags);
  run->add_option("--methods", run_flags.methods,
                  "arnoldi_eda, lanczos_eda, eda_dense, classical_lda, lda_pca (default: all)")
      ->delimiter(',');
  run->add_option("--tol", run_flags.tolerances, "solver tolerance (repeatable)")->delimiter(',');
  run->add_option("--train-per-class", run_flags.train_per_class, "training samples per class (repeatable)")
      ->delimiter(',');
  run->add_option("--repeats", run_flags.repeats, "random splits per cell");
  run->add_option("--workers", run_flags.workers, "concurrent grid cells");
  run->add_option("--pca-energy", run_flags.pca_energy, "energy kept by the PCA step of lda_pca");
  run->add_flag("--no-theory", run_flags.no_theory, "skip the inequality checks in the JSON report");

  CommonFlags bounds_flags;
  auto* bounds = app.add_subcommand("bounds", "report eigenvalue, criterion and distance inequality checks");
  add_dataset_flags(bounds, bounds_flags);
  bounds->add_option("--tol", bounds_flags.tolerances, "Arnoldi tolerance for the distance check (repeatable)")
      ->delimiter(',');
  bounds->add_option("--train-per-class", bounds_flags.train_per_class, "training samples per class");

  CommonFlags bench_flags;
  expeda::BenchConfig bench_cfg;
  auto* bench = app.add_subcommand("bench", "time matrix-exponential products as d grows");
  bench->add_option("--dims", bench_cfg.dims, "dimensions to time")->delimiter(',');
  bench->add_option("--n", bench_cfg.n, "number of samples");
  bench->add_option("--k", bench_cfg.k, "number of classes");
  bench->add_option("--reps", bench_cfg.reps, "timed products per dimension");
  bench->add_option("--evict-bytes", bench_cfg.evict_bytes,
                    "bytes swept between timed products to evict private caches (0: none)");
  bench->add_option("--seed", bench_flags.seed, "random seed");
  bench->add_option("--oracle-cap", bench_flags.oracle_cap, "largest dimension for dense reference work");
  bench->add_option("--out", bench_flags.out, "output directory");
  bool no_fit = false;
  bench->add_flag("--no-fit", no_fit, "skip the end-to-end Arnoldi fit timing");

  app.add_option("--config", "flat key=value file; keys are long option names of the chosen subcommand");

  std::vector<std::string> args;
  try {
    args = expand_config(argc, argv);
  } catch (const expeda::IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return io_error;
  } catch (const expeda::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return config_error;
  }
  std::reverse(args.begin(), args.end());

  try {
    app.parse(args);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::FileError& e) {
    app.exit(e);
    return io_error;
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return config_error;
  }

  try {
    if (run->parsed()) return cmd_run(run_flags);
    if (bounds->parsed()) return cmd_bounds(bounds_flags);
    bench_cfg.fit = !no_fit;
    return cmd_bench(bench_flags, bench_cfg);
  } catch (const expeda::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return config_error;
  } catch (const expeda::IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return io_error;
  } catch (const expeda::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return io_error;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cell_failure;
  }
}
