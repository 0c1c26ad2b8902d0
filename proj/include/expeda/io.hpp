#pragma once

// Dataset ingestion (CSV, directories of PGM images) and the seeded
// synthetic generator.

#include "expeda/scatter.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace expeda {

/// Reads `label,f1,...,fd` rows (one header line, one sample per row).
/// Samples are unit-normalized; labels are numbered by first appearance.
LabeledDataset ingest_csv(const std::filesystem::path& path);

/// Writes the dataset in the format read by ingest_csv, using class names as
/// labels and 17 significant digits.
void export_csv(const LabeledDataset& ds, const std::filesystem::path& path);

struct GrayImage {
  std::size_t width = 0;
  std::size_t height = 0;
  unsigned max_value = 255;
  std::vector<std::uint8_t> pixels;  // row-major
};

/// Binary 8-bit PGM (P5).
GrayImage read_pgm(const std::filesystem::path& path);
void write_pgm(const GrayImage& image, const std::filesystem::path& path);

/// `<root>/<class>/*.pgm`; class directories and files are visited in sorted
/// order. Images are flattened column-major, scaled to [0, 1] and
/// unit-normalized.
LabeledDataset ingest_image_dir(const std::filesystem::path& root);

struct SyntheticSpec {
  std::size_t d = 400;
  std::size_t k = 10;
  std::size_t per_class = 10;
  double noise = 3.0;  // standard deviation of within-class noise
  double scale = 1.0;  // standard deviation of the class centroids
  std::uint64_t seed = 0;
};

/// Parses `d=150,k=6,per_class=5,noise=0.5,scale=1,seed=3`; omitted keys
/// keep their defaults.
SyntheticSpec parse_synthetic_spec(std::string_view text);
std::string format_synthetic_spec(const SyntheticSpec& spec);

/// Gaussian classes around Gaussian centroids, unit-normalized. Samples are
/// ordered class by class. Deterministic per seed.
LabeledDataset make_synthetic(const SyntheticSpec& spec);

}  // namespace expeda
