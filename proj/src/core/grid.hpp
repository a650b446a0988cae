#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace dfgt {

inline constexpr int kMaxDim = 8;
// Caps on the expansion order p and neighbor radius k; if either cap binds the
// requested accuracy is reported as unreachable.
inline constexpr int kMaxOrder = 80;
inline constexpr int kMaxRadius = 80;
// Cap on materialized index sets: p^d and (2k+1)^d must stay below this.
inline constexpr std::size_t kMaxIndexCount = std::size_t{1} << 24;

// Integer coordinates of an axis-aligned grid box, inline up to kMaxDim.
class BoxId {
 public:
  BoxId() : dim_(0) { coords_.fill(0); }
  explicit BoxId(std::span<const std::int64_t> coords);

  int dim() const { return dim_; }
  std::int64_t operator[](int i) const { return coords_[static_cast<std::size_t>(i)]; }
  std::int64_t& operator[](int i) { return coords_[static_cast<std::size_t>(i)]; }

  bool operator==(const BoxId& other) const {
    if (dim_ != other.dim_) return false;
    for (int i = 0; i < dim_; ++i) if (coords_[static_cast<std::size_t>(i)] != other.coords_[static_cast<std::size_t>(i)]) return false;
    return true;
  }
  // Lexicographic; gives tests and dumps a stable ordering.
  bool operator<(const BoxId& other) const;

  static BoxId with_dim(int dim);

 private:
  std::array<std::int64_t, kMaxDim> coords_;
  int dim_;
};

struct BoxIdHash {
  std::size_t operator()(const BoxId& id) const {
    std::size_t h = static_cast<std::size_t>(id.dim());
    for (int i = 0; i < id.dim(); ++i) {
      h ^= static_cast<std::size_t>(id[i]) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return h;
  }
};

// Box containing a point under side-length `side`, half-open along each axis:
// coordinate i maps to floor(x_i / side).
BoxId box_of(std::span<const double> point, double side);

// Center of a box: (c_i + 1/2) * side per axis.
void box_center(const BoxId& id, double side, std::span<double> out);

// All boxes within Chebyshev distance `radius` of `id`, own box included,
// in lexicographic offset order ((-k,..,-k) first, (k,..,k) last).
// Exactly (2*radius+1)^dim ids.
std::vector<BoxId> neighbors(const BoxId& id, int radius);

// Allocation-free neighbor walk in the same deterministic order.
void for_each_neighbor(const BoxId& id, int radius, const std::function<void(const BoxId&)>& fn);

// Derived accuracy parameters: smallest radius with
// charge * exp(-2 r^2 k^2) <= eps/3 and smallest order with
// combined_truncation_bound <= 2*eps/3.
struct ParamChoice {
  int order;   // p
  int radius;  // k
};
ParamChoice choose_params(double charge, double eps, double r, int dim);

// Fixed per-structure geometry and accuracy parameters.
struct GridParams {
  int dim;
  double delta;          // squared kernel bandwidth
  double eps;            // additive accuracy target
  double r;              // box scale ratio, side = r * sqrt(2*delta)
  double side;           // L, computed once at construction
  int order;             // p
  int radius;            // k
  double charge_budget;  // Q the parameters were derived for
};

// Validates inputs, picks (order, radius) for the given budget and enforces
// the index-set resource caps.
GridParams make_grid_params(int dim, double delta, double eps, double r, double charge_budget);

}  // namespace dfgt
