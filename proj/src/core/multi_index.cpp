#include "core/multi_index.hpp"

#include "core/error.hpp"

namespace dfgt {

namespace {

constexpr int kMaxFactorialArg = 170;  // 171! overflows double

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= static_cast<double>(i);
  return f;
}

}  // namespace

int MultiIndex::degree() const {
  int total = 0;
  for (int c : coords) total += c;
  return total;
}

std::size_t checked_pow(int base, int dim, std::size_t limit) {
  if (base < 1 || dim < 1) {
    throw Error(ErrorCode::invalid_argument, "checked_pow: base and dim must be positive");
  }
  std::size_t n = 1;
  for (int i = 0; i < dim; ++i) {
    if (n > limit / static_cast<std::size_t>(base)) {
      throw Error(ErrorCode::invalid_argument, "index set too large to materialize");
    }
    n *= static_cast<std::size_t>(base);
  }
  return n;
}

std::vector<MultiIndex> enumerate_truncated(int dim, int order) {
  if (dim < 1) throw Error(ErrorCode::invalid_argument, "enumerate_truncated: dim must be >= 1");
  if (order < 1) throw Error(ErrorCode::invalid_argument, "enumerate_truncated: order must be >= 1");
  const std::size_t count = checked_pow(order, dim, std::size_t{1} << 28);

  std::vector<MultiIndex> out;
  out.reserve(count);
  MultiIndex cur;
  cur.coords.assign(static_cast<std::size_t>(dim), 0);
  for (std::size_t i = 0; i < count; ++i) {
    out.push_back(cur);
    // odometer increment, last coordinate fastest
    for (int axis = dim - 1; axis >= 0; --axis) {
      auto& c = cur.coords[static_cast<std::size_t>(axis)];
      if (++c < order) break;
      c = 0;
    }
  }
  return out;
}

double factorial_reciprocal(const MultiIndex& alpha) {
  double denom = 1.0;
  for (int c : alpha.coords) {
    if (c < 0) throw Error(ErrorCode::invalid_argument, "multi-index coordinate is negative");
    if (c > kMaxFactorialArg) {
      throw Error(ErrorCode::invalid_argument, "multi-index coordinate too large for factorial");
    }
    denom *= factorial(c);
  }
  return 1.0 / denom;
}

int sign(const MultiIndex& alpha) {
  return (alpha.degree() % 2 == 0) ? 1 : -1;
}

double power(std::span<const double> v, const MultiIndex& alpha) {
  if (static_cast<int>(v.size()) != alpha.dim()) {
    throw Error(ErrorCode::invalid_argument, "power: dimension mismatch");
  }
  double result = 1.0;
  for (int i = 0; i < alpha.dim(); ++i) {
    for (int j = 0; j < alpha[i]; ++j) result *= v[static_cast<std::size_t>(i)];
  }
  return result;
}

}  // namespace dfgt
