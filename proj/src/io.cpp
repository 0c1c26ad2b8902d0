#include "expeda/io.hpp"

#include "expeda/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>
#include <vector>

namespace fs = std::filesystem;

namespace expeda {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

LabeledDataset ingest_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");

  std::string line;
  std::size_t row = 0;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++row;
    if (!trim(line).empty()) break;
  }
  if (trim(line).empty()) throw DataError(path.string() + ": missing header");
  const auto header = split_fields(line);
  if (header.size() < 2) throw DataError(path.string() + ": header needs a label and at least one feature");
  width = header.size();

  std::vector<std::string> labels;
  std::vector<double> values;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != width) {
      throw DataError(path.string() + ": row " + std::to_string(row) + " has " +
                      std::to_string(fields.size()) + " fields, expected " + std::to_string(width));
    }
    if (fields[0].empty()) throw DataError(path.string() + ": row " + std::to_string(row) + " has an empty label");
    labels.emplace_back(fields[0]);
    for (std::size_t c = 1; c < width; ++c) {
      double value = 0.0;
      const auto f = fields[c];
      const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), value);
      if (ec != std::errc() || ptr != f.data() + f.size() || f.empty()) {
        throw DataError(path.string() + ": row " + std::to_string(row) + ", column " +
                        std::to_string(c + 1) + ": '" + std::string(f) + "' is not a number");
      }
      if (!std::isfinite(value)) {
        throw DataError(path.string() + ": row " + std::to_string(row) + ", column " +
                        std::to_string(c + 1) + ": non-finite value");
      }
      values.push_back(value);
    }
  }
  if (labels.empty()) throw DataError(path.string() + ": no samples");

  const auto d = static_cast<Eigen::Index>(width - 1);
  const auto n = static_cast<Eigen::Index>(labels.size());
  const Matrix data = Eigen::Map<const Matrix>(values.data(), d, n);
  try {
    return LabeledDataset::from_raw(data, labels, /*normalize=*/true);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void export_csv(const LabeledDataset& ds, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << "label";
  for (std::size_t i = 0; i < ds.dim(); ++i) out << ",f" << (i + 1);
  out << '\n' << std::setprecision(17);
  for (std::size_t j = 0; j < ds.size(); ++j) {
    out << ds.class_names()[static_cast<std::size_t>(ds.labels()[j])];
    for (std::size_t i = 0; i < ds.dim(); ++i) {
      out << ',' << ds.data()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
    out << '\n';
  }
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

namespace {

// Reads one header token, skipping whitespace and '#' comments.
std::string pgm_token(std::istream& in, const fs::path& path) {
  std::string token;
  int c = in.get();
  while (c != EOF) {
    if (c == '#') {
      while (c != EOF && c != '\n') c = in.get();
    } else if (!std::isspace(c)) {
      break;
    }
    c = in.get();
  }
  while (c != EOF && !std::isspace(c) && c != '#') {
    token.push_back(static_cast<char>(c));
    c = in.get();
  }
  if (token.empty()) throw DataError(path.string() + ": truncated PGM header");
  return token;
}

std::size_t pgm_number(std::istream& in, const fs::path& path, const char* field) {
  const std::string tok = pgm_token(in, path);
  std::size_t value = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw DataError(path.string() + ": malformed PGM " + field + " '" + tok + "'");
  }
  return value;
}

}  // namespace

GrayImage read_pgm(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  if (pgm_token(in, path) != "P5") throw DataError(path.string() + ": not a binary PGM (P5)");
  GrayImage img;
  img.width = pgm_number(in, path, "width");
  img.height = pgm_number(in, path, "height");
  const std::size_t maxval = pgm_number(in, path, "maxval");
  if (img.width == 0 || img.height == 0) throw DataError(path.string() + ": empty image");
  if (maxval == 0 || maxval > 255) {
    throw DataError(path.string() + ": only 8-bit PGM is supported (maxval " + std::to_string(maxval) + ")");
  }
  img.max_value = static_cast<unsigned>(maxval);
  // pgm_token consumed exactly one whitespace byte after maxval.
  img.pixels.resize(img.width * img.height);
  in.read(reinterpret_cast<char*>(img.pixels.data()), static_cast<std::streamsize>(img.pixels.size()));
  if (in.gcount() != static_cast<std::streamsize>(img.pixels.size())) {
    throw DataError(path.string() + ": truncated pixel data");
  }
  return img;
}

void write_pgm(const GrayImage& image, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << "P5\n" << image.width << ' ' << image.height << '\n' << image.max_value << '\n';
  out.write(reinterpret_cast<const char*>(image.pixels.data()),
            static_cast<std::streamsize>(image.pixels.size()));
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

LabeledDataset ingest_image_dir(const fs::path& root) {
  std::error_code ec;
  if (!fs::is_directory(root, ec)) throw IoError("'" + root.string() + "' is not a directory");

  std::vector<fs::path> class_dirs;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (entry.is_directory()) class_dirs.push_back(entry.path());
  }
  std::sort(class_dirs.begin(), class_dirs.end());

  std::vector<std::string> labels;
  std::vector<Vector> columns;
  std::size_t width = 0;
  std::size_t height = 0;
  for (const auto& dir : class_dirs) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (entry.is_regular_file() && entry.path().extension() == ".pgm") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& file : files) {
      const GrayImage img = read_pgm(file);
      if (columns.empty()) {
        width = img.width;
        height = img.height;
      } else if (img.width != width || img.height != height) {
        throw DataError(file.string() + ": image is " + std::to_string(img.width) + "x" +
                        std::to_string(img.height) + ", expected " + std::to_string(width) + "x" +
                        std::to_string(height));
      }
      Vector x(static_cast<Eigen::Index>(width * height));
      for (std::size_t r = 0; r < height; ++r) {
        for (std::size_t c = 0; c < width; ++c) {
          x(static_cast<Eigen::Index>(c * height + r)) =
              static_cast<double>(img.pixels[r * width + c]) / static_cast<double>(img.max_value);
        }
      }
      if (!(x.norm() > 0.0)) throw DataError(file.string() + ": image is all zero and cannot be normalized");
      columns.push_back(std::move(x));
      labels.push_back(dir.filename().string());
    }
  }
  if (columns.empty()) throw DataError(root.string() + ": no .pgm images found");

  Matrix data(static_cast<Eigen::Index>(width * height), static_cast<Eigen::Index>(columns.size()));
  for (std::size_t j = 0; j < columns.size(); ++j) data.col(static_cast<Eigen::Index>(j)) = columns[j];
  return LabeledDataset::from_raw(std::move(data), labels, /*normalize=*/true);
}

SyntheticSpec parse_synthetic_spec(std::string_view text) {
  SyntheticSpec spec;
  if (trim(text).empty() || trim(text) == "default") return spec;
  for (auto field : split_fields(text)) {
    const auto eq = field.find('=');
    if (eq == std::string_view::npos) throw ConfigError("synthetic spec: expected key=value, got '" + std::string(field) + "'");
    const auto key = trim(field.substr(0, eq));
    const auto value = trim(field.substr(eq + 1));
    auto parse = [&](auto& out) {
      const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
      if (ec != std::errc() || ptr != value.data() + value.size()) {
        throw ConfigError("synthetic spec: bad value for '" + std::string(key) + "'");
      }
    };
    if (key == "d") parse(spec.d);
    else if (key == "k") parse(spec.k);
    else if (key == "per_class") parse(spec.per_class);
    else if (key == "noise") parse(spec.noise);
    else if (key == "scale") parse(spec.scale);
    else if (key == "seed") parse(spec.seed);
    else throw ConfigError("synthetic spec: unknown key '" + std::string(key) + "'");
  }
  return spec;
}

std::string format_synthetic_spec(const SyntheticSpec& spec) {
  std::ostringstream os;
  os << "d=" << spec.d << ",k=" << spec.k << ",per_class=" << spec.per_class
     << ",noise=" << spec.noise << ",scale=" << spec.scale << ",seed=" << spec.seed;
  return os.str();
}

LabeledDataset make_synthetic(const SyntheticSpec& spec) {
  if (spec.d < 1 || spec.k < 1 || spec.per_class < 1) throw ConfigError("synthetic spec: sizes must be positive");
  if (!(spec.scale > 0.0) || !(spec.noise >= 0.0)) {
    throw ConfigError("synthetic spec: scale must be positive and noise nonnegative");
  }
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto d = static_cast<Eigen::Index>(spec.d);

  Matrix centroids(d, static_cast<Eigen::Index>(spec.k));
  for (Eigen::Index j = 0; j < centroids.cols(); ++j) {
    for (Eigen::Index i = 0; i < d; ++i) centroids(i, j) = spec.scale * normal(rng);
  }
  const std::size_t n = spec.k * spec.per_class;
  Matrix data(d, static_cast<Eigen::Index>(n));
  std::vector<int> labels;
  labels.reserve(n);
  std::vector<std::string> names;
  for (std::size_t j = 0; j < spec.k; ++j) {
    names.push_back("c" + std::to_string(j));
    for (std::size_t s = 0; s < spec.per_class; ++s) {
      const auto col = static_cast<Eigen::Index>(j * spec.per_class + s);
      for (Eigen::Index i = 0; i < d; ++i) {
        data(i, col) = centroids(i, static_cast<Eigen::Index>(j)) + spec.noise * normal(rng);
      }
      labels.push_back(static_cast<int>(j));
    }
  }
  return LabeledDataset::from_indices(std::move(data), std::move(labels), std::move(names), true);
}

}  // namespace expeda
