#include "core/dynamic_fgt.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <mutex>
#include <unordered_set>

#include "core/error.hpp"

namespace dfgt {

DynamicFgt::DynamicFgt(int dim, double delta, double eps, double r, double capacity,
                       std::span<const double> points_flat, std::span<const double> charges)
    : dim_(dim), delta_(delta), eps_(eps), r_(r),
      target_mutex_(std::make_unique<std::shared_mutex>()) {
  if (dim < 1 || dim > kMaxDim) throw Error(ErrorCode::invalid_argument, "dim must be in [1, 8]");
  if (!(capacity >= 0.0) || !std::isfinite(capacity)) {
    throw Error(ErrorCode::invalid_argument, "capacity must be >= 0 and finite");
  }
  build(points_flat, charges, capacity);
}

DynamicFgt::DynamicFgt(DynamicFgt&&) noexcept = default;
DynamicFgt& DynamicFgt::operator=(DynamicFgt&&) noexcept = default;
DynamicFgt::~DynamicFgt() = default;

void DynamicFgt::validate_point(std::span<const double> point) const {
  if (static_cast<int>(point.size()) != dim_) {
    throw Error(ErrorCode::invalid_argument, "point dimension mismatch");
  }
  for (double x : point) {
    if (!std::isfinite(x)) throw Error(ErrorCode::invalid_data, "non-finite coordinate");
  }
}

DynamicFgt::PointKey DynamicFgt::key_of(const double* point) const {
  PointKey key;
  static_assert(sizeof(double) == sizeof(std::uint64_t));
  std::memcpy(key.bits.data(), point, static_cast<std::size_t>(dim_) * sizeof(double));
  return key;
}

void DynamicFgt::build(std::span<const double> points_flat, std::span<const double> charges,
                       double capacity) {
  const std::size_t n = charges.size();
  const std::size_t d = static_cast<std::size_t>(dim_);
  if (points_flat.size() != n * d) {
    throw Error(ErrorCode::invalid_argument, "points/charges size mismatch");
  }
  if (n > std::numeric_limits<std::uint32_t>::max() - 1) {
    throw Error(ErrorCode::invalid_argument, "too many points");
  }
  double total_abs = 0.0;
  for (double q : charges) {
    if (!std::isfinite(q)) throw Error(ErrorCode::invalid_data, "non-finite charge");
    total_abs += std::abs(q);
  }
  if (!std::isfinite(total_abs)) throw Error(ErrorCode::invalid_data, "total charge overflows");

  const double budget = std::max({1.0, total_abs, capacity});
  params_ = make_grid_params(dim_, delta_, eps_, r_, budget);
  expansion_ = std::make_unique<Expansion>(params_);

  registry_.clear();
  registry_.reserve(n);
  point_index_.clear();
  source_boxes_.clear();
  target_boxes_.clear();
  invalidate_session();
  abs_charge_ = total_abs;
  live_ = n;
  footprint_ = {};

  for (std::size_t j = 0; j < n; ++j) {
    std::span<const double> point = points_flat.subspan(j * d, d);
    validate_point(point);
    RegistryEntry entry;
    std::copy(point.begin(), point.end(), entry.point.begin());
    entry.charge = charges[j];
    entry.alive = true;
    const auto idx = static_cast<std::uint32_t>(registry_.size());
    registry_.push_back(entry);
    point_index_[key_of(entry.point.data())].push_back(idx);

    SourceBox& box = find_or_create_source(box_of(point, params_.side));
    registry_[idx].pos_in_box = static_cast<std::uint32_t>(box.residents.size());
    box.residents.push_back(idx);
    box.abs_charge += std::abs(charges[j]);
  }

  // Whole-box expansions in one pass per box. Cross-box iteration order is
  // irrelevant: each box's coefficients depend only on its own residents,
  // which are walked in insertion order.
  std::vector<double> box_points, box_charges;
  for (auto& [id, box] : source_boxes_) {
    box_points.clear();
    box_charges.clear();
    for (std::uint32_t idx : box.residents) {
      const RegistryEntry& e = registry_[idx];
      box_points.insert(box_points.end(), e.point.begin(), e.point.begin() + dim_);
      box_charges.push_back(e.charge);
    }
    box.coeffs = expansion_->source_coeffs(box_points, box_charges,
                                           {box.center.data(), d});
  }
}

SourceBox& DynamicFgt::find_or_create_source(const BoxId& id) {
  auto [it, inserted] = source_boxes_.try_emplace(id);
  if (inserted) {
    box_center(id, params_.side, {it->second.center.data(), static_cast<std::size_t>(dim_)});
    it->second.coeffs.assign(expansion_->coeff_count(), 0.0);
  }
  return it->second;
}

void DynamicFgt::apply_point_delta(std::span<const double> point, double charge, SourceBox& box,
                                   const BoxId& id) {
  const std::size_t d = static_cast<std::size_t>(dim_);
  delta_buf_.resize(expansion_->coeff_count());
  expansion_->point_coeffs(point, charge, {box.center.data(), d}, delta_buf_);
  for (std::size_t i = 0; i < delta_buf_.size(); ++i) box.coeffs[i] += delta_buf_[i];
  footprint_.source_boxes_touched += 1;

  if (target_boxes_.empty()) return;
  for_each_neighbor(id, params_.radius, [&](const BoxId& nb) {
    auto it = target_boxes_.find(nb);
    if (it == target_boxes_.end()) return;
    expansion_->translate_accumulate(delta_buf_, {box.center.data(), d},
                                     {it->second.center.data(), d}, it->second.coeffs);
    footprint_.target_boxes_updated += 1;
  });
}

void DynamicFgt::insert(std::span<const double> point, double charge) {
  validate_point(point);
  if (!std::isfinite(charge)) throw Error(ErrorCode::invalid_data, "non-finite charge");
  if (registry_.size() >= std::numeric_limits<std::uint32_t>::max() - 1) {
    if (registry_.size() > live_) {
      compact_registry();
    } else {
      throw Error(ErrorCode::invalid_argument, "too many points");
    }
  }
  footprint_ = {};

  const auto idx = static_cast<std::uint32_t>(registry_.size());
  RegistryEntry entry;
  std::copy(point.begin(), point.end(), entry.point.begin());
  entry.charge = charge;
  entry.alive = true;
  registry_.push_back(entry);
  point_index_[key_of(entry.point.data())].push_back(idx);
  live_ += 1;

  const BoxId id = box_of(point, params_.side);
  SourceBox& box = find_or_create_source(id);
  registry_[idx].pos_in_box = static_cast<std::uint32_t>(box.residents.size());
  box.residents.push_back(idx);
  box.abs_charge += std::abs(charge);
  abs_charge_ += std::abs(charge);

  // A zero charge contributes nothing; skipping keeps coefficients bitwise
  // untouched instead of adding signed zeros.
  if (charge != 0.0) apply_point_delta(point, charge, box, id);

  invalidate_session();
  if (abs_charge_ > params_.charge_budget) {
    rebuild_with_budget(std::max(1.0, abs_charge_ * abs_charge_));
  }
}

void DynamicFgt::erase(std::span<const double> point) {
  validate_point(point);
  const auto key_it = point_index_.find(key_of(point.data()));
  if (key_it == point_index_.end() || key_it->second.empty()) {
    throw Error(ErrorCode::not_found, "point is not registered");
  }
  const std::uint32_t idx = key_it->second.back();
  RegistryEntry& entry = registry_[idx];
  const BoxId id = box_of(point, params_.side);
  const auto box_it = source_boxes_.find(id);
  if (box_it == source_boxes_.end()) throw Error(ErrorCode::internal, "missing source box");
  SourceBox& box = box_it->second;

  footprint_ = {};
  key_it->second.pop_back();
  if (key_it->second.empty()) point_index_.erase(key_it);

  // Swap-remove from the resident list.
  const std::uint32_t last = box.residents.back();
  box.residents[entry.pos_in_box] = last;
  registry_[last].pos_in_box = entry.pos_in_box;
  box.residents.pop_back();

  const double charge = entry.charge;
  entry.alive = false;
  live_ -= 1;
  box.abs_charge -= std::abs(charge);
  abs_charge_ -= std::abs(charge);

  if (charge != 0.0) {
    const std::size_t d = static_cast<std::size_t>(dim_);
    delta_buf_.resize(expansion_->coeff_count());
    expansion_->point_coeffs(point, charge, {box.center.data(), d}, delta_buf_);
    for (std::size_t i = 0; i < delta_buf_.size(); ++i) box.coeffs[i] -= delta_buf_[i];
    footprint_.source_boxes_touched += 1;
    if (!target_boxes_.empty()) {
      for (double& v : delta_buf_) v = -v;
      for_each_neighbor(id, params_.radius, [&](const BoxId& nb) {
        auto it = target_boxes_.find(nb);
        if (it == target_boxes_.end()) return;
        expansion_->translate_accumulate(delta_buf_, {box.center.data(), d},
                                         {it->second.center.data(), d}, it->second.coeffs);
        footprint_.target_boxes_updated += 1;
      });
    }
  }

  if (box.residents.empty()) source_boxes_.erase(box_it);
  invalidate_session();
  if (registry_.size() - live_ > live_ && registry_.size() - live_ >= 64) compact_registry();
}

TargetBox& DynamicFgt::materialize_target_locked(const BoxId& id) const {
  auto [it, inserted] = target_boxes_.try_emplace(id);
  TargetBox& box = it->second;
  if (inserted) {
    const std::size_t d = static_cast<std::size_t>(dim_);
    box_center(id, params_.side, {box.center.data(), d});
    box.coeffs.assign(expansion_->coeff_count(), 0.0);
    for_each_neighbor(id, params_.radius, [&](const BoxId& nb) {
      auto src = source_boxes_.find(nb);
      if (src == source_boxes_.end()) return;
      expansion_->translate_accumulate(src->second.coeffs, {src->second.center.data(), d},
                                       {box.center.data(), d}, box.coeffs);
    });
  }
  return box;
}

double DynamicFgt::kde_query(std::span<const double> target) const {
  validate_point(target);
  const BoxId id = box_of(target, params_.side);
  const std::size_t d = static_cast<std::size_t>(dim_);
  {
    std::shared_lock lock(*target_mutex_);
    auto it = target_boxes_.find(id);
    if (it != target_boxes_.end()) {
      return expansion_->evaluate(it->second.coeffs, target, {it->second.center.data(), d});
    }
  }
  std::unique_lock lock(*target_mutex_);
  TargetBox& box = materialize_target_locked(id);
  return expansion_->evaluate(box.coeffs, target, {box.center.data(), d});
}

void DynamicFgt::materialize_target(const BoxId& id) const {
  if (id.dim() != dim_) throw Error(ErrorCode::invalid_argument, "box id dimension mismatch");
  std::unique_lock lock(*target_mutex_);
  materialize_target_locked(id);
}

std::vector<double> DynamicFgt::matvec(std::span<const double> charges) {
  if (charges.size() != live_) {
    throw Error(ErrorCode::invalid_argument, "charge vector length must equal registered point count");
  }
  for (double q : charges) {
    if (!std::isfinite(q)) throw Error(ErrorCode::invalid_data, "non-finite charge");
  }
  session_.points = points();
  session_.charges.assign(charges.begin(), charges.end());
  // The scratch inherits the primary budget so its derived params match a
  // fresh build over the same data whenever sum|q| stays within budget.
  session_.scratch = std::make_unique<DynamicFgt>(dim_, delta_, eps_, r_, params_.charge_budget,
                                                  session_.points, session_.charges);
  const std::size_t d = static_cast<std::size_t>(dim_);
  std::vector<double> values(live_);
  for (std::size_t i = 0; i < live_; ++i) {
    values[i] = session_.scratch->kde_query(
        std::span<const double>(session_.points).subspan(i * d, d));
  }
  session_.values = values;
  session_.valid = true;
  return values;
}

DynamicFgt::DeltaResult DynamicFgt::matvec_delta(std::span<const DeltaUpdate> changes) {
  if (!session_.valid || session_.scratch == nullptr) {
    throw Error(ErrorCode::state, "no matvec session; call matvec first");
  }
  DynamicFgt& scratch = *session_.scratch;
  const std::size_t n = session_.charges.size();
  for (const DeltaUpdate& u : changes) {
    if (u.index >= n) throw Error(ErrorCode::invalid_argument, "matvec_delta: index out of range");
    if (!std::isfinite(u.charge)) throw Error(ErrorCode::invalid_data, "non-finite charge");
  }
  DeltaResult result;
  if (changes.empty()) return result;

  std::vector<BoxId> changed_boxes;
  changed_boxes.reserve(changes.size());
  for (const DeltaUpdate& u : changes) {
    changed_boxes.push_back(box_of(scratch.point_span(scratch.registry_[u.index]),
                                   scratch.params_.side));
    scratch.update_charge_internal(u.index, u.charge);
    session_.charges[u.index] = u.charge;
  }

  bool full_recompute = false;
  if (scratch.abs_charge_ > scratch.params_.charge_budget) {
    // No squaring here: growth must track the fresh-build budget rule so the
    // session's params never diverge from what a fresh matvec would use.
    scratch.rebuild_with_budget(std::max({1.0, params_.charge_budget, scratch.abs_charge_}));
    full_recompute = true;
  }

  if (full_recompute) {
    result.indices.resize(n);
    for (std::size_t i = 0; i < n; ++i) result.indices[i] = i;
  } else {
    std::sort(changed_boxes.begin(), changed_boxes.end());
    changed_boxes.erase(std::unique(changed_boxes.begin(), changed_boxes.end()),
                        changed_boxes.end());
    std::unordered_set<BoxId, BoxIdHash> visited;
    for (const BoxId& id : changed_boxes) {
      for_each_neighbor(id, scratch.params_.radius, [&](const BoxId& nb) {
        if (!visited.insert(nb).second) return;
        auto it = scratch.source_boxes_.find(nb);
        if (it == scratch.source_boxes_.end()) return;
        for (std::uint32_t idx : it->second.residents) result.indices.push_back(idx);
      });
    }
    std::sort(result.indices.begin(), result.indices.end());
  }

  const std::size_t d = static_cast<std::size_t>(dim_);
  result.values.reserve(result.indices.size());
  for (std::size_t idx : result.indices) {
    const double v = scratch.kde_query(
        std::span<const double>(session_.points).subspan(idx * d, d));
    session_.values[idx] = v;
    result.values.push_back(v);
  }
  return result;
}

void DynamicFgt::update_charge_internal(std::size_t idx, double new_charge) {
  RegistryEntry& entry = registry_[idx];
  const double dq = new_charge - entry.charge;
  const BoxId id = box_of(point_span(entry), params_.side);
  SourceBox& box = source_boxes_.at(id);
  box.abs_charge += std::abs(new_charge) - std::abs(entry.charge);
  abs_charge_ += std::abs(new_charge) - std::abs(entry.charge);
  entry.charge = new_charge;
  if (dq != 0.0) apply_point_delta(point_span(entry), dq, box, id);
}

void DynamicFgt::rebuild() {
  const double budget = (abs_charge_ > params_.charge_budget)
                            ? std::max(1.0, abs_charge_ * abs_charge_)
                            : params_.charge_budget;
  rebuild_with_budget(budget);
}

void DynamicFgt::rebuild_with_budget(double budget) {
  const std::vector<double> pts = points();
  const std::vector<double> qs = charges();
  build(pts, qs, budget);
  rebuild_count_ += 1;
}

void DynamicFgt::invalidate_session() {
  session_.valid = false;
  session_.scratch.reset();
  session_.points.clear();
  session_.charges.clear();
  session_.values.clear();
}

void DynamicFgt::compact_registry() {
  std::vector<RegistryEntry> fresh;
  fresh.reserve(live_);
  for (const RegistryEntry& e : registry_) {
    if (e.alive) fresh.push_back(e);
  }
  registry_ = std::move(fresh);

  point_index_.clear();
  for (auto& [id, box] : source_boxes_) box.residents.clear();
  for (std::uint32_t i = 0; i < registry_.size(); ++i) {
    RegistryEntry& e = registry_[i];
    point_index_[key_of(e.point.data())].push_back(i);
    SourceBox& box = source_boxes_.at(box_of(point_span(e), params_.side));
    e.pos_in_box = static_cast<std::uint32_t>(box.residents.size());
    box.residents.push_back(i);
  }
}

std::vector<double> DynamicFgt::points() const {
  std::vector<double> out;
  out.reserve(live_ * static_cast<std::size_t>(dim_));
  for (const RegistryEntry& e : registry_) {
    if (e.alive) out.insert(out.end(), e.point.begin(), e.point.begin() + dim_);
  }
  return out;
}

std::vector<double> DynamicFgt::charges() const {
  std::vector<double> out;
  out.reserve(live_);
  for (const RegistryEntry& e : registry_) {
    if (e.alive) out.push_back(e.charge);
  }
  return out;
}

std::vector<BoxId> DynamicFgt::source_box_ids() const {
  std::vector<BoxId> ids;
  ids.reserve(source_boxes_.size());
  for (const auto& [id, box] : source_boxes_) ids.push_back(id);
  std::sort(ids.begin(), ids.end());
  return ids;
}

std::vector<BoxId> DynamicFgt::target_box_ids() const {
  std::shared_lock lock(*target_mutex_);
  std::vector<BoxId> ids;
  ids.reserve(target_boxes_.size());
  for (const auto& [id, box] : target_boxes_) ids.push_back(id);
  std::sort(ids.begin(), ids.end());
  return ids;
}

const SourceBox* DynamicFgt::find_source_box(const BoxId& id) const {
  auto it = source_boxes_.find(id);
  return it == source_boxes_.end() ? nullptr : &it->second;
}

const TargetBox* DynamicFgt::find_target_box(const BoxId& id) const {
  std::shared_lock lock(*target_mutex_);
  auto it = target_boxes_.find(id);
  return it == target_boxes_.end() ? nullptr : &it->second;
}

}  // namespace dfgt
