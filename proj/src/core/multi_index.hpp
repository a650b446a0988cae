#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace dfgt {

// A d-tuple of nonnegative integer exponents.
struct MultiIndex {
  std::vector<int> coords;

  int dim() const { return static_cast<int>(coords.size()); }
  int operator[](int i) const { return coords[static_cast<std::size_t>(i)]; }
  // |alpha|_1, the total degree.
  int degree() const;
  bool operator==(const MultiIndex&) const = default;
};

// All indices with every coordinate in [0, order), in lexicographic order with
// the first coordinate most significant: (0,0),(0,1),(1,0),(1,1) for d=2, order=2.
// Exactly order^dim entries. Throws if dim < 1, order < 1, or order^dim is
// too large to materialize.
std::vector<MultiIndex> enumerate_truncated(int dim, int order);

// 1 / (alpha_1! * ... * alpha_d!). Throws if any coordinate exceeds 170
// (double factorial overflow).
double factorial_reciprocal(const MultiIndex& alpha);

// (-1)^{|alpha|_1}
int sign(const MultiIndex& alpha);

// v^alpha = prod_i v_i^{alpha_i}, with 0^0 = 1. v must have alpha.dim() entries.
double power(std::span<const double> v, const MultiIndex& alpha);

// order^dim as size_t, throwing if it exceeds limit. Shared guard for
// truncation sets and neighbor enumerations.
std::size_t checked_pow(int base, int dim, std::size_t limit);

}  // namespace dfgt
