#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <shared_mutex>
#include <span>
#include <unordered_map>
#include <vector>

#include "core/expansion.hpp"
#include "core/grid.hpp"

namespace dfgt {

// One occupied grid box on the source side. `coeffs` is the Hermite expansion
// of the residents' field about the box center; abs_charge tracks sum |q| of
// residents. Boxes with no residents are removed from the map entirely.
struct SourceBox {
  std::array<double, kMaxDim> center{};
  std::vector<std::uint32_t> residents;  // registry slots; order changes on removal
  std::vector<double> coeffs;
  double abs_charge = 0.0;
};

// One materialized target box: the Taylor expansion of the near field about
// the box center. Created on first query into the box, kept consistent by
// incremental updates afterwards.
struct TargetBox {
  std::array<double, kMaxDim> center{};
  std::vector<double> coeffs;
};

// Reach of the most recent insert/erase, for locality checks.
struct UpdateFootprint {
  std::size_t source_boxes_touched = 0;
  std::size_t target_boxes_updated = 0;
};

// Fully dynamic approximate Gaussian transform over a weighted point set.
//
// Guarantees, with params derived from (charge budget Q, eps, r, dim):
//   * kde_query(t) is within eps of sum_j q_j exp(-||t-s_j||^2/delta)
//     whenever sum_j |q_j| <= Q (maintained by rebuild-on-overflow).
//   * insert/erase cost is independent of the number of points: one source
//     box update plus at most (2k+1)^d materialized target updates.
//
// Concurrency: any number of kde_query calls may run concurrently (cache
// materialization is internally synchronized); all mutating operations
// require exclusive access.
class DynamicFgt {
 public:
  // points_flat holds charges.size() points of `dim` coordinates each.
  // capacity >= 0 pre-sizes the charge budget: params are derived for
  // max(1, sum|q|, capacity), so later inserts up to the budget do not
  // trigger a rebuild.
  DynamicFgt(int dim, double delta, double eps, double r, double capacity,
             std::span<const double> points_flat, std::span<const double> charges);
  DynamicFgt(DynamicFgt&&) noexcept;
  DynamicFgt& operator=(DynamicFgt&&) noexcept;
  DynamicFgt(const DynamicFgt&) = delete;
  DynamicFgt& operator=(const DynamicFgt&) = delete;
  ~DynamicFgt();

  int dim() const { return dim_; }
  std::size_t size() const { return live_; }
  const GridParams& params() const { return params_; }
  double current_abs_charge() const { return abs_charge_; }
  std::size_t rebuild_count() const { return rebuild_count_; }
  const UpdateFootprint& last_update_footprint() const { return footprint_; }

  // Registers the point and folds its contribution into its source box and
  // every materialized target box within the neighbor radius. May trigger a
  // budget-doubling rebuild if sum|q| exceeds the current budget.
  void insert(std::span<const double> point, double charge);

  // Removes one registry entry matching the point bitwise (the most recently
  // inserted one if duplicated) and reverses its contributions. Throws
  // not_found and leaves the structure untouched if no entry matches.
  void erase(std::span<const double> point);

  // Approximate transform at an arbitrary target.
  double kde_query(std::span<const double> target) const;

  // Approximate K*q over the registered points (insertion order) for an
  // arbitrary charge vector; the registered charges are not modified.
  // Retains a session so matvec_delta can answer sparse updates.
  std::vector<double> matvec(std::span<const double> charges);

  struct DeltaUpdate {
    std::size_t index;  // position in the matvec charge vector
    double charge;      // new value
  };
  struct DeltaResult {
    std::vector<std::size_t> indices;  // ascending, deduplicated
    std::vector<double> values;        // updated product entries
  };
  // Applies charge updates to the most recent matvec session and returns the
  // product entries that can change: all points within the neighbor radius of
  // a changed box. Entries not reported keep their previous values exactly.
  // Throws a state error if no session exists (mutations invalidate it).
  DeltaResult matvec_delta(std::span<const DeltaUpdate> changes);

  // Discards all coefficient state and recomputes from the registry. Budget
  // grows to max(1, Q_current^2) when over budget, else stays as derived.
  void rebuild();

  // Registry snapshots in insertion order (live entries only).
  std::vector<double> points() const;
  std::vector<double> charges() const;

  // Introspection for consistency validation.
  std::vector<BoxId> source_box_ids() const;  // sorted
  std::vector<BoxId> target_box_ids() const;  // sorted
  const SourceBox* find_source_box(const BoxId& id) const;
  const TargetBox* find_target_box(const BoxId& id) const;
  // Ensures the target box is materialized, as a query into it would.
  void materialize_target(const BoxId& id) const;

 private:
  struct RegistryEntry {
    std::array<double, kMaxDim> point{};
    double charge = 0.0;
    std::uint32_t pos_in_box = 0;
    bool alive = false;
  };
  // Bit patterns of the coordinates; deletion matches bitwise.
  struct PointKey {
    std::array<std::uint64_t, kMaxDim> bits{};
    bool operator==(const PointKey&) const = default;
  };
  struct PointKeyHash {
    std::size_t operator()(const PointKey& k) const {
      std::size_t h = 0;
      for (std::uint64_t b : k.bits) h ^= static_cast<std::size_t>(b) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
      return h;
    }
  };
  struct MatvecSession {
    bool valid = false;
    std::vector<double> points;
    std::vector<double> charges;
    std::vector<double> values;
    std::unique_ptr<DynamicFgt> scratch;
  };

  void validate_point(std::span<const double> point) const;
  PointKey key_of(const double* point) const;
  std::span<const double> point_span(const RegistryEntry& e) const {
    return {e.point.data(), static_cast<std::size_t>(dim_)};
  }
  void build(std::span<const double> points_flat, std::span<const double> charges, double capacity);
  void rebuild_with_budget(double budget);
  SourceBox& find_or_create_source(const BoxId& id);
  // Adds g*q*nu^alpha to the box expansion and propagates the increment to
  // every materialized target within the radius.
  void apply_point_delta(std::span<const double> point, double charge, SourceBox& box,
                         const BoxId& id);
  void update_charge_internal(std::size_t idx, double new_charge);
  void invalidate_session();
  void compact_registry();
  TargetBox& materialize_target_locked(const BoxId& id) const;

  int dim_ = 0;
  double delta_ = 0.0, eps_ = 0.0, r_ = 0.0;
  GridParams params_{};
  std::unique_ptr<Expansion> expansion_;

  std::vector<RegistryEntry> registry_;
  std::size_t live_ = 0;
  std::unordered_map<PointKey, std::vector<std::uint32_t>, PointKeyHash> point_index_;

  std::unordered_map<BoxId, SourceBox, BoxIdHash> source_boxes_;
  mutable std::unordered_map<BoxId, TargetBox, BoxIdHash> target_boxes_;
  mutable std::unique_ptr<std::shared_mutex> target_mutex_;

  double abs_charge_ = 0.0;
  std::size_t rebuild_count_ = 0;
  UpdateFootprint footprint_{};
  MatvecSession session_;
  std::vector<double> delta_buf_;  // scratch for single-point coefficient deltas
};

}  // namespace dfgt
