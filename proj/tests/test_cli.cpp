#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"

namespace fs = std::filesystem;

namespace {

struct CliResult {
  int code = -1;
  std::string out;  // stdout and stderr merged
};

CliResult run_cli(const std::string& args) {
  const std::string cmd = std::string(DFGT_CLI_PATH) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  CliResult result;
  char buf[4096];
  std::size_t got = 0;
  while ((got = std::fread(buf, 1, sizeof buf, pipe)) > 0) result.out.append(buf, got);
  const int status = pclose(pipe);
  result.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("dfgt-cli-" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  REQUIRE(out.good());
  out << content;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) lines.push_back(line);
  return lines;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Deterministic little source/target files shared by several cases.
std::string make_sources(int n, int dim, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(0.0, 1.0);
  std::uniform_real_distribution<double> charge(-1.0, 1.0);
  std::string text;
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < dim; ++k) text += fmt(coord(rng)) + ",";
    text += fmt(charge(rng)) + "\n";
  }
  return text;
}

std::string make_targets(int n, int dim, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(0.0, 1.0);
  std::string text;
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < dim; ++k) text += fmt(coord(rng)) + (k + 1 < dim ? "," : "");
    text += "\n";
  }
  return text;
}

}  // namespace

TEST_CASE("build then query then verify agree and stay within eps") {
  TempDir dir;
  write_file(dir.file("src.csv"), make_sources(40, 2, 1001));
  write_file(dir.file("tgt.csv"), make_targets(12, 2, 1002));

  auto built = run_cli("build " + dir.file("src.csv") + " " + dir.file("state.txt") +
                       " --delta 0.3 --eps 1e-3");
  CHECK(built.code == 0);
  CHECK(fs::exists(dir.file("state.txt")));

  auto queried = run_cli("query " + dir.file("state.txt") + " " + dir.file("tgt.csv"));
  REQUIRE(queried.code == 0);
  const auto query_lines = lines_of(queried.out);
  REQUIRE(query_lines.size() == 12);

  auto verified = run_cli("verify " + dir.file("state.txt") + " " + dir.file("tgt.csv"));
  CHECK(verified.code == 0);
  const auto verify_lines = lines_of(verified.out);
  REQUIRE(verify_lines.size() == 13);
  CHECK(verify_lines.back().rfind("max_abs_diff=", 0) == 0);

  for (std::size_t i = 0; i < 12; ++i) {
    std::stringstream ss(verify_lines[i]);
    std::string approx_tok, exact_tok;
    ss >> approx_tok >> exact_tok;
    /* Query and verify print the same values through the same formatter. */
    CHECK(approx_tok == query_lines[i]);
    const double approx = std::strtod(approx_tok.c_str(), nullptr);
    const double exact = std::strtod(exact_tok.c_str(), nullptr);
    CHECK(std::abs(approx - exact) <= 1e-3);
  }
}

TEST_CASE("repeated runs are byte-identical") {
  TempDir dir;
  write_file(dir.file("src.csv"), make_sources(30, 2, 1101));
  write_file(dir.file("tgt.csv"), make_targets(10, 2, 1102));

  auto b1 = run_cli("build " + dir.file("src.csv") + " " + dir.file("s1.txt") +
                    " --delta 0.25 --eps 1e-3");
  auto b2 = run_cli("build " + dir.file("src.csv") + " " + dir.file("s2.txt") +
                    " --delta 0.25 --eps 1e-3");
  REQUIRE(b1.code == 0);
  REQUIRE(b2.code == 0);
  CHECK(read_file(dir.file("s1.txt")) == read_file(dir.file("s2.txt")));

  auto q1 = run_cli("query " + dir.file("s1.txt") + " " + dir.file("tgt.csv"));
  auto q2 = run_cli("query " + dir.file("s2.txt") + " " + dir.file("tgt.csv"));
  REQUIRE(q1.code == 0);
  CHECK(q1.out == q2.out);

  auto m1 = run_cli("matvec " + dir.file("s1.txt") + " " + dir.file("q.txt"));
  // No charge file yet: expect failure, then write it and compare twice.
  CHECK(m1.code == 2);
  std::string charges;
  for (int i = 0; i < 30; ++i) charges += fmt(0.1 * (i % 7) - 0.3) + "\n";
  write_file(dir.file("q.txt"), charges);
  auto m2 = run_cli("matvec " + dir.file("s1.txt") + " " + dir.file("q.txt"));
  auto m3 = run_cli("matvec " + dir.file("s1.txt") + " " + dir.file("q.txt"));
  REQUIRE(m2.code == 0);
  CHECK(m2.out == m3.out);
  CHECK(lines_of(m2.out).size() == 30);
}

TEST_CASE("malformed source rows are reported with their line number") {
  TempDir dir;
  write_file(dir.file("bad.csv"), "0.1,0.2,1.0\n0.3,0.4,-1.0\n0.5,oops,2.0\n");
  auto r = run_cli("build " + dir.file("bad.csv") + " " + dir.file("state.txt") +
                   " --delta 0.5 --eps 1e-3");
  CHECK(r.code == 2);
  CHECK(r.out.find("line 3") != std::string::npos);
  CHECK(r.out.find("bad number") != std::string::npos);
  CHECK(!fs::exists(dir.file("state.txt")));
}

TEST_CASE("empty source file builds an empty structure") {
  TempDir dir;
  write_file(dir.file("empty.csv"), "");
  auto built = run_cli("build " + dir.file("empty.csv") + " " + dir.file("state.txt") +
                       " --delta 0.5 --eps 1e-3 --dim 2");
  CHECK(built.code == 0);

  write_file(dir.file("tgt.csv"), "0.5,0.5\n");
  auto queried = run_cli("query " + dir.file("state.txt") + " " + dir.file("tgt.csv"));
  REQUIRE(queried.code == 0);
  const auto out_lines = lines_of(queried.out);
  REQUIRE(out_lines.size() == 1);
  CHECK(std::strtod(out_lines[0].c_str(), nullptr) == 0.0);

  write_file(dir.file("none.csv"), "");
  auto none = run_cli("query " + dir.file("state.txt") + " " + dir.file("none.csv"));
  CHECK(none.code == 0);
  CHECK(none.out.empty());
}

TEST_CASE("update applies ops in place and a failed op leaves the state alone") {
  TempDir dir;
  write_file(dir.file("src.csv"), make_sources(25, 2, 1201));
  write_file(dir.file("tgt.csv"), make_targets(8, 2, 1202));
  // Budget headroom keeps the insert below from forcing a rebuild, so the
  // derived parameters stay fixed across the round trip.
  REQUIRE(run_cli("build " + dir.file("src.csv") + " " + dir.file("state.txt") +
                  " --delta 0.4 --eps 1e-3 --capacity 100")
              .code == 0);
  const auto before = run_cli("query " + dir.file("state.txt") + " " + dir.file("tgt.csv"));
  REQUIRE(before.code == 0);

  write_file(dir.file("ops.txt"), "I 0.91 0.13 0.75\nD 0.91 0.13\n");
  auto updated = run_cli("update " + dir.file("state.txt") + " " + dir.file("ops.txt"));
  CHECK(updated.code == 0);
  const auto after = run_cli("query " + dir.file("state.txt") + " " + dir.file("tgt.csv"));
  REQUIRE(after.code == 0);
  const auto a = lines_of(before.out);
  const auto b = lines_of(after.out);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double va = std::strtod(a[i].c_str(), nullptr);
    const double vb = std::strtod(b[i].c_str(), nullptr);
    CHECK(std::abs(va - vb) <= 1e-9 * (1.0 + std::abs(va)));
  }

  const std::string snapshot = read_file(dir.file("state.txt"));
  write_file(dir.file("missing.txt"), "D 7.5 7.5\n");
  auto failed = run_cli("update " + dir.file("state.txt") + " " + dir.file("missing.txt"));
  CHECK(failed.code == 2);
  CHECK(failed.out.find("line 1") != std::string::npos);
  CHECK(read_file(dir.file("state.txt")) == snapshot);

  write_file(dir.file("noop.txt"), "");
  auto noop = run_cli("update " + dir.file("state.txt") + " " + dir.file("noop.txt"));
  CHECK(noop.code == 0);
  CHECK(read_file(dir.file("state.txt")) == snapshot);

  write_file(dir.file("junk.txt"), "X 0.5 0.5\n");
  auto junk = run_cli("update " + dir.file("state.txt") + " " + dir.file("junk.txt"));
  CHECK(junk.code == 2);
  CHECK(junk.out.find("op must be I or D") != std::string::npos);
}

TEST_CASE("matvec rejects a charge count mismatch") {
  TempDir dir;
  write_file(dir.file("src.csv"), make_sources(10, 1, 1301));
  REQUIRE(run_cli("build " + dir.file("src.csv") + " " + dir.file("state.txt") +
                  " --delta 0.5 --eps 1e-2")
              .code == 0);
  std::string charges;
  for (int i = 0; i < 9; ++i) charges += "1.0\n";
  write_file(dir.file("q.txt"), charges);
  auto r = run_cli("matvec " + dir.file("state.txt") + " " + dir.file("q.txt"));
  CHECK(r.code == 2);
  CHECK(r.out.find("9 charges for 10 registered points") != std::string::npos);
}

TEST_CASE("verify with a zero threshold fails and reports the gap") {
  TempDir dir;
  write_file(dir.file("src.csv"), make_sources(30, 2, 1401));
  write_file(dir.file("tgt.csv"), make_targets(6, 2, 1402));
  REQUIRE(run_cli("build " + dir.file("src.csv") + " " + dir.file("state.txt") +
                  " --delta 0.3 --eps 1e-3")
              .code == 0);
  auto r = run_cli("verify " + dir.file("state.txt") + " " + dir.file("tgt.csv") + " --eps 0");
  CHECK(r.code == 3);
  CHECK(r.out.find("max_abs_diff=") != std::string::npos);
}

TEST_CASE("bench emits a CSV with one row per cell") {
  TempDir dir;
  auto r = run_cli("bench --dims 1 --sizes 64,128 --delta 0.5 --eps 1e-2 --ops 50 --seed 3");
  REQUIRE(r.code == 0);
  const auto rows = lines_of(r.out);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0] == "N,d,median_insert_ns,median_query_ns,median_delete_ns");
  CHECK(rows[1].rfind("64,1,", 0) == 0);
  CHECK(rows[2].rfind("128,1,", 0) == 0);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    std::stringstream ss(rows[i]);
    std::string field;
    int n_fields = 0;
    while (std::getline(ss, field, ',')) {
      CHECK(!field.empty());
      ++n_fields;
    }
    CHECK(n_fields == 5);
  }
}

TEST_CASE("usage errors exit with code 1") {
  TempDir dir;
  write_file(dir.file("src.csv"), "0.5,1.0\n");
  CHECK(run_cli("build " + dir.file("src.csv") + " " + dir.file("state.txt") + " --eps 1e-3")
            .code == 1);
  CHECK(run_cli("frobnicate").code == 1);
  CHECK(run_cli("bench --delta 0.5 --eps 1e-2 --ops 0").code == 1);
  /* Parameter rejected by the library maps to a usage error as well. */
  CHECK(run_cli("build " + dir.file("src.csv") + " " + dir.file("state.txt") +
                " --delta 0.5 --eps 1e-3 --r 0.9")
            .code == 1);
}

TEST_CASE("missing input files exit with code 2") {
  TempDir dir;
  auto r = run_cli("build " + dir.file("nope.csv") + " " + dir.file("state.txt") +
                   " --delta 0.5 --eps 1e-3");
  CHECK(r.code == 2);
  CHECK(r.out.find("cannot open") != std::string::npos);
  CHECK(run_cli("query " + dir.file("nope.txt") + " " + dir.file("also-nope.csv")).code == 2);
}

TEST_CASE("target dimension mismatches are rejected") {
  TempDir dir;
  write_file(dir.file("src.csv"), make_sources(12, 2, 1501));
  REQUIRE(run_cli("build " + dir.file("src.csv") + " " + dir.file("state.txt") +
                  " --delta 0.5 --eps 1e-2")
              .code == 0);
  write_file(dir.file("tgt3.csv"), "0.1,0.2,0.3\n");
  auto r = run_cli("query " + dir.file("state.txt") + " " + dir.file("tgt3.csv"));
  CHECK(r.code == 2);
  CHECK(r.out.find("expected 2 fields, got 3") != std::string::npos);
}
