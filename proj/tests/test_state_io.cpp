#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "core/dynamic_fgt.hpp"
#include "core/error.hpp"
#include "core/state_io.hpp"
#include "doctest.h"
#include "test_support.hpp"

namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("dfgt-test-" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  out << content;
}

}  // namespace

TEST_CASE("save and load round-trip a populated structure exactly") {
  TempDir dir;
  std::mt19937_64 rng(81);
  const std::size_t n = 70;
  const auto pts = testsupport::random_points(rng, n, 2, -1.0, 2.0);
  const auto qs = testsupport::random_charges(rng, n);
  dfgt::DynamicFgt original(2, 0.35, 1e-4, 0.5, 100.0, pts, qs);

  const std::string path = dir.file("state.txt");
  dfgt::save_state(original, path);
  dfgt::DynamicFgt loaded = dfgt::load_state(path);

  CHECK(loaded.dim() == original.dim());
  CHECK(loaded.size() == original.size());
  CHECK(loaded.params().delta == original.params().delta);
  CHECK(loaded.params().eps == original.params().eps);
  CHECK(loaded.params().r == original.params().r);
  CHECK(loaded.params().side == original.params().side);
  CHECK(loaded.params().order == original.params().order);
  CHECK(loaded.params().radius == original.params().radius);
  CHECK(loaded.params().charge_budget == original.params().charge_budget);

  const auto p1 = original.points();
  const auto p2 = loaded.points();
  REQUIRE(p1.size() == p2.size());
  for (std::size_t i = 0; i < p1.size(); ++i) CHECK(p1[i] == p2[i]);
  const auto q1 = original.charges();
  const auto q2 = loaded.charges();
  for (std::size_t i = 0; i < q1.size(); ++i) CHECK(q1[i] == q2[i]);

  const auto ids1 = original.source_box_ids();
  const auto ids2 = loaded.source_box_ids();
  REQUIRE(ids1.size() == ids2.size());
  for (std::size_t i = 0; i < ids1.size(); ++i) CHECK(ids1[i] == ids2[i]);

  for (int i = 0; i < 20; ++i) {
    const auto t = testsupport::random_points(rng, 1, 2, -1.0, 2.0);
    CHECK(original.kde_query(t) == loaded.kde_query(t));
  }
}

TEST_CASE("an empty structure round-trips") {
  TempDir dir;
  const dfgt::DynamicFgt empty(3, 0.7, 1e-3, 0.4, 5.0, {}, {});
  const std::string path = dir.file("empty.txt");
  dfgt::save_state(empty, path);
  dfgt::DynamicFgt loaded = dfgt::load_state(path);
  CHECK(loaded.size() == 0);
  CHECK(loaded.dim() == 3);
  CHECK(loaded.params().charge_budget == 5.0);
  const std::vector<double> t{0.0, 0.0, 0.0};
  CHECK(loaded.kde_query(t) == 0.0);
}

TEST_CASE("negative and duplicate charges survive the round trip") {
  TempDir dir;
  const std::vector<double> pts{0.5, 0.5, 0.5};
  const std::vector<double> qs{-2.0, 3.0, -2.0};
  dfgt::DynamicFgt original(1, 0.4, 1e-4, 0.5, 0.0, pts, qs);
  const std::string path = dir.file("dup.txt");
  dfgt::save_state(original, path);
  dfgt::DynamicFgt loaded = dfgt::load_state(path);
  CHECK(loaded.size() == 3);
  const auto q = loaded.charges();
  CHECK(q[0] == -2.0);
  CHECK(q[1] == 3.0);
  CHECK(q[2] == -2.0);
}

TEST_CASE("loading a missing file reports an io error") {
  try {
    dfgt::load_state("/no/such/dir/state.txt");
    FAIL("expected an error");
  } catch (const dfgt::Error& e) {
    CHECK(e.code() == dfgt::ErrorCode::io);
  }
}

TEST_CASE("saving to an unwritable path reports an io error") {
  const dfgt::DynamicFgt f(1, 0.5, 1e-4, 0.5, 0.0, {}, {});
  try {
    dfgt::save_state(f, "/no/such/dir/state.txt");
    FAIL("expected an error");
  } catch (const dfgt::Error& e) {
    CHECK(e.code() == dfgt::ErrorCode::io);
  }
}

TEST_CASE("a wrong header is rejected as invalid data") {
  TempDir dir;
  const std::string path = dir.file("bad.txt");
  write_text(path, "some other format\n");
  try {
    dfgt::load_state(path);
    FAIL("expected an error");
  } catch (const dfgt::Error& e) {
    CHECK(e.code() == dfgt::ErrorCode::invalid_data);
  }
}

TEST_CASE("a truncated file is rejected with the expected row count") {
  TempDir dir;
  const std::string path = dir.file("trunc.txt");
  write_text(path,
             "dfgt-state v1\ndim=1\ndelta=0.5\neps=0.0001\nr=0.5\nbudget=1\ncount=3\n"
             "0.1,1\n0.2,1\n");
  try {
    dfgt::load_state(path);
    FAIL("expected an error");
  } catch (const dfgt::Error& e) {
    CHECK(e.code() == dfgt::ErrorCode::invalid_data);
    CHECK(std::string(e.what()).find("expected 3 rows") != std::string::npos);
  }
}

TEST_CASE("a malformed number is rejected with its line number") {
  TempDir dir;
  const std::string path = dir.file("badnum.txt");
  write_text(path,
             "dfgt-state v1\ndim=1\ndelta=0.5\neps=0.0001\nr=0.5\nbudget=1\ncount=2\n"
             "0.1,1\n0.2,oops\n");
  try {
    dfgt::load_state(path);
    FAIL("expected an error");
  } catch (const dfgt::Error& e) {
    CHECK(e.code() == dfgt::ErrorCode::invalid_data);
    CHECK(std::string(e.what()).find("line 9") != std::string::npos);
  }
}

TEST_CASE("a wrong field arity is rejected") {
  TempDir dir;
  const std::string path = dir.file("arity.txt");
  write_text(path,
             "dfgt-state v1\ndim=2\ndelta=0.5\neps=0.0001\nr=0.5\nbudget=1\ncount=1\n"
             "0.1,0.2\n");
  try {
    dfgt::load_state(path);
    FAIL("expected an error");
  } catch (const dfgt::Error& e) {
    CHECK(e.code() == dfgt::ErrorCode::invalid_data);
    CHECK(std::string(e.what()).find("expected 3 fields, got 2") != std::string::npos);
  }
}

TEST_CASE("trailing content after the rows is rejected") {
  TempDir dir;
  const std::string path = dir.file("trail.txt");
  write_text(path,
             "dfgt-state v1\ndim=1\ndelta=0.5\neps=0.0001\nr=0.5\nbudget=1\ncount=1\n"
             "0.1,1\nextra stuff\n");
  try {
    dfgt::load_state(path);
    FAIL("expected an error");
  } catch (const dfgt::Error& e) {
    CHECK(e.code() == dfgt::ErrorCode::invalid_data);
  }
}

TEST_CASE("out-of-range dim is rejected") {
  TempDir dir;
  const std::string path = dir.file("dim.txt");
  write_text(path, "dfgt-state v1\ndim=12\ndelta=0.5\neps=0.0001\nr=0.5\nbudget=1\ncount=0\n");
  try {
    dfgt::load_state(path);
    FAIL("expected an error");
  } catch (const dfgt::Error& e) {
    CHECK(e.code() == dfgt::ErrorCode::invalid_data);
  }
}

TEST_CASE("state saved after mutations reflects the live registry") {
  TempDir dir;
  std::mt19937_64 rng(82);
  const auto pts = testsupport::random_points(rng, 20, 2, 0.0, 1.0);
  const auto qs = testsupport::random_charges(rng, 20);
  dfgt::DynamicFgt f(2, 0.3, 1e-3, 0.5, 50.0, pts, qs);
  const auto extra = testsupport::random_points(rng, 1, 2, 0.0, 1.0);
  f.insert(extra, 0.9);
  const std::vector<double> first{pts[0], pts[1]};
  f.erase(first);

  const std::string path = dir.file("mut.txt");
  dfgt::save_state(f, path);
  dfgt::DynamicFgt loaded = dfgt::load_state(path);
  CHECK(loaded.size() == 20);
  for (int i = 0; i < 10; ++i) {
    const auto t = testsupport::random_points(rng, 1, 2, 0.0, 1.0);
    // The loaded structure is a fresh batch build over the same registry, so
    // agreement is to rebuild tolerance, not bitwise.
    CHECK(testsupport::close(f.kde_query(t), loaded.kde_query(t), 1e-9));
  }
}
