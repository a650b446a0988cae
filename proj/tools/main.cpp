// Command-line front end over the dfgt C API.
//
// Exit codes: 0 success, 1 usage or parameter errors, 2 data errors
// (malformed files, unknown points, IO), 3 verification failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dfgt/dfgt.h"

namespace {

struct CliError {
  int code;
  std::string message;
};

int status_exit_code(dfgt_status status) {
  switch (status) {
    case DFGT_OK: return 0;
    case DFGT_ERROR_INVALID_ARGUMENT:
    case DFGT_ERROR_ACCURACY: return 1;
    default: return 2;
  }
}

[[noreturn]] void fail_status(dfgt_status status, const dfgt_handle* handle) {
  throw CliError{status_exit_code(status),
                 std::string(dfgt_status_name(status)) + ": " + dfgt_last_error(handle)};
}

void check(dfgt_status status, const dfgt_handle* handle) {
  if (status != DFGT_OK) fail_status(status, handle);
}

struct HandleGuard {
  dfgt_handle* h = nullptr;
  ~HandleGuard() { dfgt_destroy(h); }
  HandleGuard() = default;
  HandleGuard(const HandleGuard&) = delete;
  HandleGuard& operator=(const HandleGuard&) = delete;
};

void print17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  std::fputs(buf, stdout);
}

double parse_double_token(const std::string& token, const std::string& file, int line_no) {
  const char* begin = token.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0') {
    throw CliError{2, file + " line " + std::to_string(line_no) + ": bad number '" + token + "'"};
  }
  if (!std::isfinite(v)) {
    throw CliError{2, file + " line " + std::to_string(line_no) + ": non-finite value"};
  }
  return v;
}

// Rows of comma-separated decimals, `dim` coordinates plus optionally one
// charge. An optional first line "dim=<d>" fixes the dimension; otherwise
// it is taken from `dim_hint` (if nonzero) or inferred from the first row.
struct PointFile {
  std::size_t dim = 0;
  std::vector<double> points;   // row-major
  std::vector<double> charges;  // empty unless with_charges
};

PointFile read_point_file(const std::string& path, bool with_charges, std::size_t dim_hint) {
  std::ifstream in(path);
  if (!in) throw CliError{2, "cannot open '" + path + "'"};

  PointFile data;
  data.dim = 0;
  std::string line;
  int line_no = 0;
  bool saw_row = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (!saw_row && data.dim == 0 && line.rfind("dim=", 0) == 0) {
      const long d = std::strtol(line.c_str() + 4, nullptr, 10);
      if (d < 1) throw CliError{2, path + " line " + std::to_string(line_no) + ": bad dim header"};
      data.dim = static_cast<std::size_t>(d);
      continue;
    }
    std::stringstream ss(line);
    std::string token;
    std::vector<double> values;
    while (std::getline(ss, token, ',')) {
      values.push_back(parse_double_token(token, path, line_no));
    }
    const std::size_t extra = with_charges ? 1 : 0;
    if (data.dim == 0) {
      if (dim_hint > 0) {
        data.dim = dim_hint;
      } else {
        if (values.size() <= extra) {
          throw CliError{2, path + " line " + std::to_string(line_no) + ": too few fields"};
        }
        data.dim = values.size() - extra;
      }
    }
    if (values.size() != data.dim + extra) {
      throw CliError{2, path + " line " + std::to_string(line_no) + ": expected " +
                            std::to_string(data.dim + extra) + " fields, got " +
                            std::to_string(values.size())};
    }
    saw_row = true;
    if (with_charges) {
      data.points.insert(data.points.end(), values.begin(), values.end() - 1);
      data.charges.push_back(values.back());
    } else {
      data.points.insert(data.points.end(), values.begin(), values.end());
    }
  }
  if (data.dim == 0) data.dim = (dim_hint > 0) ? dim_hint : 1;
  return data;
}

std::vector<double> read_value_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CliError{2, "cannot open '" + path + "'"};
  std::vector<double> values;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    values.push_back(parse_double_token(line, path, line_no));
  }
  return values;
}

struct BuildOptions {
  std::string sources;
  std::string out_state;
  double delta = 0.0;
  double eps = 0.0;
  double r = 0.5;
  double capacity = 0.0;
  std::size_t dim = 0;
};

int run_build(const BuildOptions& opt) {
  const PointFile data = read_point_file(opt.sources, /*with_charges=*/true, opt.dim);
  HandleGuard guard;
  check(dfgt_create(data.dim, opt.delta, opt.eps, opt.r, opt.capacity, data.points.data(),
                    data.charges.data(), data.charges.size(), &guard.h),
        nullptr);
  check(dfgt_save(guard.h, opt.out_state.c_str()), guard.h);
  return 0;
}

struct StateTargetsOptions {
  std::string state;
  std::string targets;
  double eps_override = -1.0;  // verify only; < 0 means use the state's eps
};

int run_query(const StateTargetsOptions& opt) {
  HandleGuard guard;
  check(dfgt_load(opt.state.c_str(), &guard.h), nullptr);
  dfgt_info info;
  check(dfgt_get_info(guard.h, &info), guard.h);
  const PointFile targets = read_point_file(opt.targets, /*with_charges=*/false, info.dim);
  if (targets.dim != info.dim) {
    throw CliError{2, opt.targets + ": dimension " + std::to_string(targets.dim) +
                          " does not match state dimension " + std::to_string(info.dim)};
  }
  const std::size_t n = targets.points.size() / targets.dim;
  for (std::size_t i = 0; i < n; ++i) {
    double value = 0.0;
    check(dfgt_kde_query(guard.h, targets.points.data() + i * targets.dim, &value), guard.h);
    print17(value);
    std::fputs("\n", stdout);
  }
  return 0;
}

struct UpdateOptions {
  std::string state;
  std::string ops;
};

int run_update(const UpdateOptions& opt) {
  HandleGuard guard;
  check(dfgt_load(opt.state.c_str(), &guard.h), nullptr);
  dfgt_info info;
  check(dfgt_get_info(guard.h, &info), guard.h);

  std::ifstream in(opt.ops);
  if (!in) throw CliError{2, "cannot open '" + opt.ops + "'"};
  std::string line;
  int line_no = 0;
  std::vector<double> point(info.dim);
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string op;
    ss >> op;
    if (op != "I" && op != "D") {
      throw CliError{2, opt.ops + " line " + std::to_string(line_no) + ": op must be I or D"};
    }
    const std::size_t n_values = info.dim + (op == "I" ? 1 : 0);
    std::vector<std::string> tokens;
    std::string token;
    while (ss >> token) tokens.push_back(token);
    if (tokens.size() != n_values) {
      throw CliError{2, opt.ops + " line " + std::to_string(line_no) + ": expected " +
                            std::to_string(n_values) + " values, got " +
                            std::to_string(tokens.size())};
    }
    for (std::size_t i = 0; i < info.dim; ++i) {
      point[i] = parse_double_token(tokens[i], opt.ops, line_no);
    }
    if (op == "I") {
      const double charge = parse_double_token(tokens.back(), opt.ops, line_no);
      const dfgt_status status = dfgt_insert(guard.h, point.data(), charge);
      if (status != DFGT_OK) {
        throw CliError{status_exit_code(status),
                       opt.ops + " line " + std::to_string(line_no) + ": " + dfgt_last_error(guard.h)};
      }
    } else {
      const dfgt_status status = dfgt_delete(guard.h, point.data());
      if (status != DFGT_OK) {
        throw CliError{status_exit_code(status),
                       opt.ops + " line " + std::to_string(line_no) + ": " + dfgt_last_error(guard.h)};
      }
    }
  }
  check(dfgt_save(guard.h, opt.state.c_str()), guard.h);
  return 0;
}

struct MatvecOptions {
  std::string state;
  std::string charges;
};

int run_matvec(const MatvecOptions& opt) {
  HandleGuard guard;
  check(dfgt_load(opt.state.c_str(), &guard.h), nullptr);
  size_t count = 0;
  check(dfgt_size(guard.h, &count), guard.h);
  const std::vector<double> charges = read_value_file(opt.charges);
  if (charges.size() != count) {
    throw CliError{2, opt.charges + ": " + std::to_string(charges.size()) +
                          " charges for " + std::to_string(count) + " registered points"};
  }
  std::vector<double> values(count);
  check(dfgt_matvec(guard.h, charges.data(), count, values.data()), guard.h);
  for (double v : values) {
    print17(v);
    std::fputs("\n", stdout);
  }
  return 0;
}

int run_verify(const StateTargetsOptions& opt) {
  HandleGuard guard;
  check(dfgt_load(opt.state.c_str(), &guard.h), nullptr);
  dfgt_info info;
  check(dfgt_get_info(guard.h, &info), guard.h);
  const PointFile targets = read_point_file(opt.targets, /*with_charges=*/false, info.dim);
  if (targets.dim != info.dim) {
    throw CliError{2, opt.targets + ": dimension " + std::to_string(targets.dim) +
                          " does not match state dimension " + std::to_string(info.dim)};
  }
  const double threshold = (opt.eps_override >= 0.0) ? opt.eps_override : info.eps;
  const std::size_t n = targets.points.size() / targets.dim;
  double max_abs_diff = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double* t = targets.points.data() + i * targets.dim;
    double approx = 0.0, exact = 0.0;
    check(dfgt_kde_query(guard.h, t, &approx), guard.h);
    check(dfgt_exact_kde(guard.h, t, &exact), guard.h);
    print17(approx);
    std::fputs(" ", stdout);
    print17(exact);
    std::fputs("\n", stdout);
    max_abs_diff = std::max(max_abs_diff, std::abs(approx - exact));
  }
  std::fputs("max_abs_diff=", stdout);
  print17(max_abs_diff);
  std::fputs("\n", stdout);
  return (max_abs_diff > threshold) ? 3 : 0;
}

struct BenchOptions {
  std::vector<std::size_t> dims{2};
  std::vector<std::size_t> sizes{1000, 100000};
  double delta = 0.0;
  double eps = 0.0;
  double r = 0.5;
  unsigned long long seed = 1;
  std::size_t ops = 1000;
};

long long median_ns(std::vector<long long>& samples) {
  std::sort(samples.begin(), samples.end());
  return samples[samples.size() / 2];
}

int run_bench(const BenchOptions& opt) {
  if (opt.ops == 0) throw CliError{1, "--ops must be >= 1"};
  if (opt.dims.empty() || opt.sizes.empty()) throw CliError{1, "--dims and --sizes must be non-empty"};
  using clock = std::chrono::steady_clock;
  std::printf("N,d,median_insert_ns,median_query_ns,median_delete_ns\n");
  for (std::size_t d : opt.dims) {
    for (std::size_t n : opt.sizes) {
      // Deterministic per-cell stream: same seed, same workload.
      std::seed_seq seq{static_cast<unsigned long long>(opt.seed),
                        static_cast<unsigned long long>(d),
                        static_cast<unsigned long long>(n)};
      std::mt19937_64 rng(seq);
      std::uniform_real_distribution<double> coord(0.0, 1.0);
      std::uniform_real_distribution<double> charge(-1.0, 1.0);

      std::vector<double> points(n * d);
      std::vector<double> charges(n);
      for (double& x : points) x = coord(rng);
      for (double& q : charges) q = charge(rng);

      // Pre-size the budget so the timed ops never trigger a rebuild: every
      // charge has |q| <= 1, so sum|q| stays below n + ops.
      const double capacity = static_cast<double>(n + opt.ops);
      HandleGuard guard;
      check(dfgt_create(d, opt.delta, opt.eps, opt.r, capacity, points.data(), charges.data(),
                        n, &guard.h),
            nullptr);

      std::vector<double> ins_points(opt.ops * d), ins_charges(opt.ops);
      std::vector<double> query_points(opt.ops * d), warm_points(opt.ops * d);
      for (double& x : ins_points) x = coord(rng);
      for (double& q : ins_charges) q = charge(rng);
      for (double& x : query_points) x = coord(rng);
      for (double& x : warm_points) x = coord(rng);

      // Untimed warmup materializes the target caches queries will hit.
      for (std::size_t i = 0; i < opt.ops; ++i) {
        double v = 0.0;
        check(dfgt_kde_query(guard.h, warm_points.data() + i * d, &v), guard.h);
      }

      std::vector<long long> ins_ns(opt.ops), qry_ns(opt.ops), del_ns(opt.ops);
      for (std::size_t i = 0; i < opt.ops; ++i) {
        const auto t0 = clock::now();
        const dfgt_status status = dfgt_insert(guard.h, ins_points.data() + i * d, ins_charges[i]);
        const auto t1 = clock::now();
        check(status, guard.h);
        ins_ns[i] = std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count();
      }
      for (std::size_t i = 0; i < opt.ops; ++i) {
        double v = 0.0;
        const auto t0 = clock::now();
        const dfgt_status status = dfgt_kde_query(guard.h, query_points.data() + i * d, &v);
        const auto t1 = clock::now();
        check(status, guard.h);
        qry_ns[i] = std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count();
      }
      for (std::size_t i = 0; i < opt.ops; ++i) {
        const auto t0 = clock::now();
        const dfgt_status status = dfgt_delete(guard.h, ins_points.data() + i * d);
        const auto t1 = clock::now();
        check(status, guard.h);
        del_ns[i] = std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count();
      }

      std::printf("%zu,%zu,%lld,%lld,%lld\n", n, d, median_ns(ins_ns), median_ns(qry_ns),
                  median_ns(del_ns));
      std::fflush(stdout);
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dynamic approximate Gaussian transform"};
  app.require_subcommand(1);

  BuildOptions build_opt;
  CLI::App* build = app.add_subcommand("build", "build a structure from a source point file");
  build->add_option("sources", build_opt.sources, "CSV point file: x_1,...,x_d,q per row")
      ->required();
  build->add_option("state", build_opt.out_state, "output state file")->required();
  build->add_option("--delta", build_opt.delta, "squared kernel bandwidth (> 0)")->required();
  build->add_option("--eps", build_opt.eps, "additive accuracy target in (0, 1)")->required();
  build->add_option("--r", build_opt.r, "box scale ratio in (0, 1/2]")->capture_default_str();
  build->add_option("--capacity", build_opt.capacity, "pre-sized charge budget (>= 0)")->capture_default_str();
  build->add_option("--dim", build_opt.dim, "dimension when the file has no rows or header");

  StateTargetsOptions query_opt;
  CLI::App* query = app.add_subcommand("query", "evaluate the transform at target points");
  query->add_option("state", query_opt.state, "state file")->required();
  query->add_option("targets", query_opt.targets, "CSV target file: x_1,...,x_d per row")
      ->required();

  UpdateOptions update_opt;
  CLI::App* update = app.add_subcommand("update", "apply an insert/delete op file to a state");
  update->add_option("state", update_opt.state, "state file, rewritten in place")->required();
  update->add_option("ops", update_opt.ops, "op file: 'I x_1 .. x_d q' or 'D x_1 .. x_d' per line")
      ->required();

  MatvecOptions matvec_opt;
  CLI::App* matvec = app.add_subcommand("matvec", "kernel matrix-vector product");
  matvec->add_option("state", matvec_opt.state, "state file")->required();
  matvec->add_option("charges", matvec_opt.charges, "file with one charge per line")->required();

  StateTargetsOptions verify_opt;
  CLI::App* verify = app.add_subcommand("verify", "compare against exact evaluation");
  verify->add_option("state", verify_opt.state, "state file")->required();
  verify->add_option("targets", verify_opt.targets, "CSV target file")->required();
  verify->add_option("--eps", verify_opt.eps_override,
                     "pass threshold (defaults to the state's eps)");

  BenchOptions bench_opt;
  CLI::App* bench = app.add_subcommand("bench", "per-op latency medians as CSV");
  bench->add_option("--dims", bench_opt.dims, "dimensions to benchmark")->delimiter(',');
  bench->add_option("--sizes", bench_opt.sizes, "point counts to benchmark")->delimiter(',');
  bench->add_option("--delta", bench_opt.delta, "squared kernel bandwidth (> 0)")->required();
  bench->add_option("--eps", bench_opt.eps, "additive accuracy target in (0, 1)")->required();
  bench->add_option("--r", bench_opt.r, "box scale ratio in (0, 1/2]")->capture_default_str();
  bench->add_option("--seed", bench_opt.seed, "workload RNG seed")->capture_default_str();
  bench->add_option("--ops", bench_opt.ops, "timed operations per cell")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::cerr << "dfgt: " << e.what() << "\n";
    return 1;
  }

  try {
    if (*build) return run_build(build_opt);
    if (*query) return run_query(query_opt);
    if (*update) return run_update(update_opt);
    if (*matvec) return run_matvec(matvec_opt);
    if (*verify) return run_verify(verify_opt);
    if (*bench) return run_bench(bench_opt);
  } catch (const CliError& e) {
    std::cerr << "dfgt: " << e.message << "\n";
    return e.code;
  }
  return 1;
}
