#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "reiflab/errors.hpp"
#include "reiflab/geometry.hpp"
#include "reiflab/io.hpp"

using namespace reiflab;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "reiflab_test_io";
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("format_double round-trips") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> U(-1e6, 1e6);
  for (int t = 0; t < 1000; ++t) {
    const double v = U(rng) * std::pow(10.0, t % 40 - 20);
    CHECK(std::strtod(format_double(v).c_str(), nullptr) == v);
  }
  CHECK(format_double(0.125) == "0.125");
  CHECK(format_double(0.1) == "0.10000000000000001");
}

TEST_CASE("domain raster round trip") {
  for (const auto& dom : {koch_domain(0.1, 1, 0.5, 1.0 / 64), half_space_ball(0.5, 1.0 / 32, 3),
                          interval_domain(0.0, 1.0, 1.0 / 20)}) {
    const auto path = scratch("dom.rfdm");
    write_domain(*dom, path);
    const auto back = read_domain(path);
    CHECK(back->dim() == dom->dim());
    CHECK(back->spacing() == dom->spacing());
    CHECK(back->lo() == dom->lo());
    CHECK(back->shape() == dom->shape());
    CHECK(back->mask() == dom->mask());
    CHECK(fs::exists(fs::path(path.string() + ".json")));
  }
}

TEST_CASE("raster header layout") {
  const auto dom = interval_domain(0.0, 1.0, 0.25);
  const auto path = scratch("interval.rfdm");
  write_domain(*dom, path);
  const auto bytes = slurp(path);
  std::uint32_t N = 0, version = 0;
  double h = 0;
  std::int64_t lo = 0, count = 0;
  std::memcpy(&N, bytes.data(), 4);
  std::memcpy(&version, bytes.data() + 4, 4);
  std::memcpy(&h, bytes.data() + 8, 8);
  std::memcpy(&lo, bytes.data() + 16, 8);
  std::memcpy(&count, bytes.data() + 24, 8);
  CHECK(N == 1);
  CHECK(version == 1);
  CHECK(h == 0.25);
  CHECK(lo == dom->lo()[0]);
  CHECK(count == dom->shape()[0]);
  CHECK(bytes.size() == 32 + (dom->node_count() + 7) / 8);
}

TEST_CASE("grid function round trip is bit exact") {
  const auto dom = ball_domain(0.5, 1.0 / 32, 2);
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g;
  const auto u = LatticeField::sample(dom, [&](const Point&) { return g(rng); });
  const auto path = scratch("u.rfgf");
  write_grid_function(u, path);
  const auto back = read_grid_function(path);
  CHECK(back.values() == u.values());
  CHECK(back.domain().mask() == dom->mask());
}

TEST_CASE("corrupt rasters are rejected") {
  const auto path = scratch("bad.rfdm");
  {
    std::ofstream out(path, std::ios::binary);
    out << "not a raster";
  }
  CHECK_THROWS_AS(read_domain(path), InvalidInput);
  CHECK_THROWS_AS(read_domain(scratch("missing.rfdm")), InvalidInput);
}

TEST_CASE("csv writer: header once, %.17g cells") {
  const auto path = scratch("t.csv");
  fs::remove(path);
  {
    CsvWriter w(path, {"a", "b", "c"}, true);
    w.row({0.1, 3LL, std::string("x")});
  }
  {
    CsvWriter w(path, {"a", "b", "c"}, true);
    w.row({std::numeric_limits<double>::quiet_NaN(), -1LL, std::string("y")});
  }
  CHECK(slurp(path) == "a,b,c\n0.10000000000000001,3,x\nnan,-1,y\n");
  CsvWriter w(path, {"a"});
  CHECK_THROWS_AS(w.row({1.0, 2.0}), InvalidInput);
}
