#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qswitch {

enum class SubsystemKind { boson, qubit, transmon };

std::string_view to_string(SubsystemKind kind);

struct Subsystem {
  std::string label;
  SubsystemKind kind = SubsystemKind::boson;
  int dim = 2;

  bool operator==(const Subsystem&) const = default;
};

/// Ordered tensor-product structure. The first subsystem varies slowest;
/// qubit level 0 is |g>, level 1 is |e>.
class SpaceLayout {
 public:
  explicit SpaceLayout(std::vector<Subsystem> subsystems);

  std::span<const Subsystem> subsystems() const { return subsystems_; }
  std::size_t size() const { return subsystems_.size(); }
  std::size_t total_dim() const { return total_dim_; }

  std::optional<std::size_t> find(std::string_view label) const;
  std::size_t position(std::string_view label) const;  // throws std::invalid_argument
  const Subsystem& subsystem(std::string_view label) const { return subsystems_[position(label)]; }

  /// Product of the dims of all subsystems after `position`.
  std::size_t stride(std::size_t position) const { return strides_[position]; }
  int digit(std::size_t basis_index, std::size_t position) const;
  std::size_t compose(std::span<const int> digits) const;

  bool operator==(const SpaceLayout& other) const { return subsystems_ == other.subsystems_; }

 private:
  std::vector<Subsystem> subsystems_;
  std::vector<std::size_t> strides_;
  std::size_t total_dim_ = 1;
};

using LayoutPtr = std::shared_ptr<const SpaceLayout>;

LayoutPtr make_layout(std::vector<Subsystem> subsystems);

/// Layout containing only `labels`, in the given order.
LayoutPtr sublayout(const SpaceLayout& layout, std::span<const std::string> labels);

void require_same_layout(const SpaceLayout& a, const SpaceLayout& b, std::string_view context);

}  // namespace qswitch
