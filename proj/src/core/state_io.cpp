#include "core/state_io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

#include "core/error.hpp"

namespace dfgt {

namespace {

constexpr const char* kMagic = "dfgt-state v1";

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double parse_double_strict(const std::string& token, int line_no) {
  const char* begin = token.c_str();
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0') {
    throw Error(ErrorCode::invalid_data,
                "state file line " + std::to_string(line_no) + ": bad number '" + token + "'");
  }
  return v;
}

long long parse_int_strict(const std::string& token, int line_no) {
  const char* begin = token.c_str();
  char* end = nullptr;
  errno = 0;
  const long long v = std::strtoll(begin, &end, 10);
  if (end == begin || *end != '\0') {
    throw Error(ErrorCode::invalid_data,
                "state file line " + std::to_string(line_no) + ": bad integer '" + token + "'");
  }
  return v;
}

// Reads "key=value", enforcing the key.
std::string expect_field(std::istream& in, const char* key, int& line_no) {
  std::string line;
  if (!std::getline(in, line)) {
    throw Error(ErrorCode::invalid_data,
                std::string("state file truncated before '") + key + "' field");
  }
  ++line_no;
  const std::string prefix = std::string(key) + "=";
  if (line.rfind(prefix, 0) != 0) {
    throw Error(ErrorCode::invalid_data,
                "state file line " + std::to_string(line_no) + ": expected '" + key + "=...'");
  }
  return line.substr(prefix.size());
}

}  // namespace

void save_state(const DynamicFgt& fgt, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::io, "cannot open '" + path + "' for writing");

  const GridParams& p = fgt.params();
  out << kMagic << "\n";
  out << "dim=" << p.dim << "\n";
  out << "delta=" << fmt17(p.delta) << "\n";
  out << "eps=" << fmt17(p.eps) << "\n";
  out << "r=" << fmt17(p.r) << "\n";
  out << "budget=" << fmt17(p.charge_budget) << "\n";

  const std::vector<double> pts = fgt.points();
  const std::vector<double> qs = fgt.charges();
  out << "count=" << qs.size() << "\n";
  const std::size_t d = static_cast<std::size_t>(p.dim);
  for (std::size_t j = 0; j < qs.size(); ++j) {
    for (std::size_t i = 0; i < d; ++i) out << fmt17(pts[j * d + i]) << ",";
    out << fmt17(qs[j]) << "\n";
  }
  out.flush();
  if (!out) throw Error(ErrorCode::io, "write to '" + path + "' failed");
}

DynamicFgt load_state(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot open '" + path + "' for reading");

  int line_no = 0;
  std::string line;
  if (!std::getline(in, line) || line != kMagic) {
    throw Error(ErrorCode::invalid_data, "'" + path + "' is not a dfgt-state v1 file");
  }
  ++line_no;

  const long long dim = parse_int_strict(expect_field(in, "dim", line_no), line_no);
  const double delta = parse_double_strict(expect_field(in, "delta", line_no), line_no);
  const double eps = parse_double_strict(expect_field(in, "eps", line_no), line_no);
  const double r = parse_double_strict(expect_field(in, "r", line_no), line_no);
  const double budget = parse_double_strict(expect_field(in, "budget", line_no), line_no);
  const long long count = parse_int_strict(expect_field(in, "count", line_no), line_no);
  if (dim < 1 || dim > kMaxDim) {
    throw Error(ErrorCode::invalid_data, "state file: dim out of range");
  }
  if (count < 0) throw Error(ErrorCode::invalid_data, "state file: negative count");

  const std::size_t d = static_cast<std::size_t>(dim);
  std::vector<double> points;
  std::vector<double> charges;
  points.reserve(static_cast<std::size_t>(count) * d);
  charges.reserve(static_cast<std::size_t>(count));
  for (long long row = 0; row < count; ++row) {
    if (!std::getline(in, line)) {
      throw Error(ErrorCode::invalid_data, "state file truncated: expected " +
                                               std::to_string(count) + " rows, got " +
                                               std::to_string(row));
    }
    ++line_no;
    std::stringstream ss(line);
    std::string token;
    std::vector<double> values;
    while (std::getline(ss, token, ',')) values.push_back(parse_double_strict(token, line_no));
    if (values.size() != d + 1) {
      throw Error(ErrorCode::invalid_data,
                  "state file line " + std::to_string(line_no) + ": expected " +
                      std::to_string(d + 1) + " fields, got " + std::to_string(values.size()));
    }
    points.insert(points.end(), values.begin(), values.end() - 1);
    charges.push_back(values.back());
  }
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty()) {
      throw Error(ErrorCode::invalid_data,
                  "state file line " + std::to_string(line_no) + ": unexpected trailing content");
    }
  }

  return DynamicFgt(static_cast<int>(dim), delta, eps, r, budget, points, charges);
}

}  // namespace dfgt
