#include "expeda/error.hpp"
#include "expeda/io.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <fstream>

using namespace expeda;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    std::random_device rd;
    path = fs::temp_directory_path() / ("expeda_test_" + std::to_string(rd()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream os(p);
  os << text;
}

GrayImage image(std::size_t w, std::size_t h, std::uint8_t fill) {
  GrayImage g;
  g.width = w;
  g.height = h;
  g.pixels.assign(w * h, fill);
  return g;
}

}  // namespace

TEST_CASE("csv ingestion") {
  TempDir tmp;
  write_text(tmp.path / "a.csv", "label,f1,f2\ncat,3,4\ndog,1,0\ncat,0,2\n");
  const auto ds = ingest_csv(tmp.path / "a.csv");
  CHECK(ds.size() == 3);
  CHECK(ds.dim() == 2);
  CHECK(ds.num_classes() == 2);
  CHECK(ds.labels() == std::vector<int>{0, 1, 0});
  CHECK(ds.data()(1, 0) == doctest::Approx(0.8));
}

// Rows are counted as file lines, header included.
TEST_CASE("csv errors name the row") {
  TempDir tmp;
  write_text(tmp.path / "nan.csv", "label,f1,f2\na,1,2\nb,nan,1\n");
  try {
    ingest_csv(tmp.path / "nan.csv");
    FAIL("expected an error");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("row 3") != std::string::npos);
  }
  write_text(tmp.path / "ragged.csv", "label,f1,f2\na,1,2\nb,1\n");
  CHECK_THROWS_AS(ingest_csv(tmp.path / "ragged.csv"), DataError);
  write_text(tmp.path / "text.csv", "label,f1\na,x1\n");
  CHECK_THROWS_AS(ingest_csv(tmp.path / "text.csv"), DataError);
  CHECK_THROWS_AS(ingest_csv(tmp.path / "missing.csv"), IoError);
}

TEST_CASE("csv export and ingest round-trip") {
  TempDir tmp;
  const auto ds = oracle::synthetic(7, 3, 4, 2);
  export_csv(ds, tmp.path / "out.csv");
  const auto back = ingest_csv(tmp.path / "out.csv");
  CHECK((back.data() - ds.data()).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(back.labels() == ds.labels());
  CHECK(back.class_names() == ds.class_names());
}

TEST_CASE("pgm round-trip with comments") {
  TempDir tmp;
  GrayImage g = image(3, 2, 0);
  for (std::size_t i = 0; i < 6; ++i) g.pixels[i] = static_cast<std::uint8_t>(40 * i);
  write_pgm(g, tmp.path / "x.pgm");
  const auto back = read_pgm(tmp.path / "x.pgm");
  CHECK(back.width == 3);
  CHECK(back.height == 2);
  CHECK(back.pixels == g.pixels);

  std::ofstream os(tmp.path / "c.pgm", std::ios::binary);
  os << "P5\n# a comment\n2 1\n255\n";
  os.put(static_cast<char>(7));
  os.put(static_cast<char>(9));
  os.close();
  CHECK(read_pgm(tmp.path / "c.pgm").pixels == std::vector<std::uint8_t>{7, 9});

  write_text(tmp.path / "bad.pgm", "P2\n1 1\n255\n0\n");
  CHECK_THROWS_AS(read_pgm(tmp.path / "bad.pgm"), DataError);
}

TEST_CASE("image directory ingestion") {
  TempDir tmp;
  fs::create_directories(tmp.path / "a");
  fs::create_directories(tmp.path / "b");
  GrayImage g = image(2, 2, 0);
  g.pixels = {10, 20, 30, 40};  // rows (10 20) and (30 40)
  write_pgm(g, tmp.path / "a" / "1.pgm");
  write_pgm(image(2, 2, 200), tmp.path / "a" / "2.pgm");
  write_pgm(image(2, 2, 100), tmp.path / "b" / "1.pgm");
  const auto ds = ingest_image_dir(tmp.path);
  CHECK(ds.dim() == 4);
  CHECK(ds.size() == 3);
  CHECK(ds.num_classes() == 2);
  Vector expect(4);
  expect << 10, 30, 20, 40;  // column-major flattening
  expect.normalize();
  CHECK((ds.data().col(0) - expect).norm() < 1e-14);

  write_pgm(image(3, 2, 5), tmp.path / "b" / "2.pgm");
  CHECK_THROWS_AS(ingest_image_dir(tmp.path), DataError);
}

TEST_CASE("single class image directory is rejected by scatter") {
  TempDir tmp;
  fs::create_directories(tmp.path / "only");
  write_pgm(image(2, 2, 9), tmp.path / "only" / "1.pgm");
  write_pgm(image(2, 2, 19), tmp.path / "only" / "2.pgm");
  const auto ds = ingest_image_dir(tmp.path);
  CHECK(ds.dim() == 4);
  CHECK(ds.size() == 2);
  CHECK(ds.num_classes() == 1);
  CHECK_THROWS_AS(build_scatter(ds), DataError);
}

TEST_CASE("an all-black image is reported by file") {
  TempDir tmp;
  fs::create_directories(tmp.path / "a");
  fs::create_directories(tmp.path / "b");
  write_pgm(image(2, 2, 9), tmp.path / "a" / "ok.pgm");
  write_pgm(image(2, 2, 0), tmp.path / "b" / "black.pgm");
  try {
    ingest_image_dir(tmp.path);
    FAIL("expected an error");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("black.pgm") != std::string::npos);
  }
}

TEST_CASE("32x32 images give d = 1024") {
  TempDir tmp;
  for (const char* c : {"a", "b"}) {
    fs::create_directories(tmp.path / c);
    write_pgm(image(32, 32, 77), tmp.path / c / "1.pgm");
  }
  CHECK(ingest_image_dir(tmp.path).dim() == 1024);
}

TEST_CASE("synthetic generator") {
  SyntheticSpec spec;
  spec.d = 150;
  spec.k = 6;
  spec.per_class = 5;
  const auto a = make_synthetic(spec);
  const auto b = make_synthetic(spec);
  CHECK(a.data() == b.data());
  CHECK(a.size() == 30);
  CHECK(a.num_classes() == 6);
  spec.seed = 1;
  CHECK(make_synthetic(spec).data() != a.data());

  spec.noise = 0.0;
  const auto flat = make_synthetic(spec);
  CHECK(build_scatter(flat).h_w.norm() < 1e-13);

  CHECK(format_synthetic_spec(parse_synthetic_spec(format_synthetic_spec(spec))) == format_synthetic_spec(spec));
  const auto parsed = parse_synthetic_spec("d=20,k=3,per_class=4,noise=0.5,scale=2,seed=9");
  CHECK(parsed.d == 20);
  CHECK(parsed.k == 3);
  CHECK(parsed.per_class == 4);
  CHECK(parsed.noise == 0.5);
  CHECK(parsed.scale == 2.0);
  CHECK(parsed.seed == 9);
  CHECK(parse_synthetic_spec("default").d == SyntheticSpec{}.d);
  CHECK_THROWS_AS(parse_synthetic_spec("d=abc"), ConfigError);
  CHECK_THROWS_AS(parse_synthetic_spec("colour=3"), ConfigError);
}
