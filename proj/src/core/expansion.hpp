#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "core/grid.hpp"
#include "core/multi_index.hpp"

namespace dfgt {

// View of one source box's expansion as input to a target-side computation.
struct SourceView {
  std::span<const double> center;
  std::span<const double> coeffs;
};

// Coefficient algebra for one fixed (dim, order, delta) configuration.
//
// Conventions, with g(alpha) = (-1)^{|alpha|_1} / alpha!:
//   source coeffs   A_alpha = g(alpha) * sum_j q_j * nu_j^alpha,
//                   nu_j = (s_j - box_center) / sqrt(delta)
//   target coeffs   C_beta = (1/beta!) * sum_{boxes B} sum_{alpha < p} A_alpha(B)
//                             * h_{alpha+beta}((center_B - center_C)/sqrt(delta))
//   field estimate  sum_beta C_beta * ((t - center_C)/sqrt(delta))^beta
//
// The pair is consistent: h_beta(v + nu) = sum_alpha ((-nu)^alpha/alpha!)
// h_{alpha+beta}(v), so for one source the translated C_beta collapses to the
// kernel's true Taylor coefficient h_beta((s - center_C)/sqrt(delta))/beta!
// up to truncation. The signs of g live entirely on the source side.
//
// All index sets are {0..p-1}^d in lexicographic order, first coordinate most
// significant. Every loop below walks them in that fixed order, so identical
// inputs produce bitwise-identical outputs.
class Expansion {
 public:
  explicit Expansion(const GridParams& params);

  const GridParams& params() const { return params_; }
  std::size_t coeff_count() const { return count_; }
  // g(alpha) per flat index.
  std::span<const double> signed_recip() const { return signed_recip_; }

  // A for a batch of residents of the box centered at `center`: accumulates
  // q * nu^alpha per point, then scales by g once. Every point must lie in
  // the box.
  std::vector<double> source_coeffs(std::span<const double> points_flat,
                                    std::span<const double> charges,
                                    std::span<const double> center) const;

  // Contribution of a single (point, charge) to A: g(alpha) * q * nu^alpha.
  // Written so a singleton batch produces bitwise-identical values. The point
  // must lie in the box.
  void point_coeffs(std::span<const double> point, double charge,
                    std::span<const double> center, std::span<double> out) const;

  // C for a target box from the given source expansions, accumulated in the
  // order given. Output is zeroed first.
  void target_coeffs(std::span<const double> target_center,
                     std::span<const SourceView> sources, std::span<double> out) const;

  // Adds one source expansion's contribution to an existing C (the increment
  // applied on insert/delete, with `source_coeffs` holding the A-delta).
  void translate_accumulate(std::span<const double> source_coeffs,
                            std::span<const double> source_center,
                            std::span<const double> target_center,
                            std::span<double> target_coeffs) const;

  // sum_beta coeffs[beta] * ((t - center)/sqrt(delta))^beta. t must lie in
  // the box of `center`.
  double evaluate(std::span<const double> coeffs, std::span<const double> point,
                  std::span<const double> center) const;

 private:
  void check_center(std::span<const double> center) const;
  void check_in_box(std::span<const double> point, std::span<const double> center,
                    const char* what) const;
  // Accumulates charge * nu^alpha into acc over the whole index set.
  void accumulate_moments(std::span<const double> nu, double charge, double* acc) const;
  double eval_block(const double* coeffs, const double* w, int axis) const;

  GridParams params_;
  std::size_t count_;                 // order^dim
  std::vector<double> signed_recip_;  // g per flat index
  std::vector<double> recip_;         // 1/alpha! per flat index
  std::vector<std::size_t> stride_;   // stride_[axis] = order^(dim-1-axis)
  double inv_sqrt_delta_;
};

}  // namespace dfgt
