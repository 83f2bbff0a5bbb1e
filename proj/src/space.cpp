#include "qswitch/space.hpp"

#include <set>
#include <stdexcept>

namespace qswitch {

std::string_view to_string(SubsystemKind kind) {
  switch (kind) {
    case SubsystemKind::boson: return "boson";
    case SubsystemKind::qubit: return "qubit";
    case SubsystemKind::transmon: return "transmon";
  }
  return "unknown";
}

SpaceLayout::SpaceLayout(std::vector<Subsystem> subsystems) : subsystems_(std::move(subsystems)) {
  if (subsystems_.empty()) throw std::invalid_argument("layout needs at least one subsystem");
  std::set<std::string_view> seen;
  for (const auto& s : subsystems_) {
    if (s.label.empty()) throw std::invalid_argument("subsystem label must not be empty");
    if (!seen.insert(s.label).second) throw std::invalid_argument("duplicate subsystem label '" + s.label + "'");
    if (s.kind == SubsystemKind::qubit && s.dim != 2)
      throw std::invalid_argument("qubit '" + s.label + "' must have dim 2");
    if (s.dim < 2) throw std::invalid_argument("subsystem '" + s.label + "' must have dim >= 2");
  }
  strides_.assign(subsystems_.size(), 1);
  for (std::size_t i = subsystems_.size(); i-- > 0;) {
    strides_[i] = total_dim_;
    total_dim_ *= static_cast<std::size_t>(subsystems_[i].dim);
  }
}

std::optional<std::size_t> SpaceLayout::find(std::string_view label) const {
  for (std::size_t i = 0; i < subsystems_.size(); ++i)
    if (subsystems_[i].label == label) return i;
  return std::nullopt;
}

std::size_t SpaceLayout::position(std::string_view label) const {
  if (auto pos = find(label)) return *pos;
  throw std::invalid_argument("unknown subsystem '" + std::string(label) + "'");
}

int SpaceLayout::digit(std::size_t basis_index, std::size_t position) const {
  return static_cast<int>((basis_index / strides_[position]) % static_cast<std::size_t>(subsystems_[position].dim));
}

std::size_t SpaceLayout::compose(std::span<const int> digits) const {
  if (digits.size() != subsystems_.size()) throw std::invalid_argument("digit count does not match layout");
  std::size_t index = 0;
  for (std::size_t i = 0; i < digits.size(); ++i) {
    if (digits[i] < 0 || digits[i] >= subsystems_[i].dim)
      throw std::out_of_range("level " + std::to_string(digits[i]) + " out of range for '" + subsystems_[i].label + "'");
    index += static_cast<std::size_t>(digits[i]) * strides_[i];
  }
  return index;
}

LayoutPtr make_layout(std::vector<Subsystem> subsystems) {
  return std::make_shared<const SpaceLayout>(std::move(subsystems));
}

LayoutPtr sublayout(const SpaceLayout& layout, std::span<const std::string> labels) {
  std::vector<Subsystem> picked;
  picked.reserve(labels.size());
  for (const auto& label : labels) picked.push_back(layout.subsystem(label));
  return make_layout(std::move(picked));
}

void require_same_layout(const SpaceLayout& a, const SpaceLayout& b, std::string_view context) {
  if (!(a == b)) throw std::invalid_argument(std::string(context) + ": layout mismatch");
}

}  // namespace qswitch
