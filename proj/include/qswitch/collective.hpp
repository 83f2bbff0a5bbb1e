#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qswitch/operator.hpp"

namespace qswitch {

/// Qubits of one switch. The first 2*floor(N/2) qubits are paired in
/// declaration order; an odd last qubit is the tail and stays in |g>.
class QubitCollection {
 public:
  QubitCollection() = default;
  explicit QubitCollection(std::vector<std::string> labels);

  const std::vector<std::string>& labels() const { return labels_; }
  const std::vector<std::pair<std::string, std::string>>& pairs() const { return pairs_; }
  const std::optional<std::string>& odd_tail() const { return odd_tail_; }
  std::size_t size() const { return labels_.size(); }
  int pair_count() const { return static_cast<int>(pairs_.size()); }

  bool operator==(const QubitCollection&) const = default;

 private:
  std::vector<std::string> labels_;
  std::vector<std::pair<std::string, std::string>> pairs_;
  std::optional<std::string> odd_tail_;
};

struct CollectiveQuantumNumbers {
  int j = 0;
  int m = 0;
};

enum class CollectiveKind { x, y, z, plus, minus, pm };

struct CollectiveOptions {
  /// Add the odd tail's sigma^z to J^z. Affects J^z only.
  bool odd_qubit_counts_in_jz = false;
};

/// Sum over paired qubits: J^z = sum sigma^z, J^pm = sum sigma^pm,
/// J^{+-} = sum_pairs (s+_1 + s+_2)(s-_1 + s-_2). Transmon subsystems use
/// c, c^dagger and 2 c^dagger c - 1 in place of sigma^-, sigma^+, sigma^z.
Operator collective_operator(LayoutPtr layout, const QubitCollection& qubits, CollectiveKind kind,
                             CollectiveOptions options = {});

/// Two-qubit operator of one pair (J_k^z, J_k^-, ... ).
Operator pair_operator(LayoutPtr layout, const QubitCollection& qubits, int pair_index, CollectiveKind kind);

/// sigma-like single-site operator on a qubit or transmon subsystem.
Operator qubit_operator(LayoutPtr layout, std::string_view label, PauliAxis axis);

enum class PairState { ground, excited, singlet, triplet_zero, eg, ge };

std::string_view to_string(PairState state);
std::optional<PairState> pair_state_from_string(std::string_view text);

/// Amplitudes over (first, second) qubit levels, order gg, ge, eg, ee.
Eigen::Vector4cd pair_state_amplitudes(PairState state);

/// J^z eigenvalue of one pair state (each is an eigenstate).
int pair_jz(PairState state);

/// j pairs in |gg>, the remaining pairs in the singlet.
std::vector<PairState> subradiant_pattern(const QubitCollection& qubits, int j);

/// One factor per pair plus the tail in |g>; combine with resonator factors.
std::vector<LocalFactor> pair_pattern_factors(const SpaceLayout& layout, const QubitCollection& qubits,
                                              std::span<const PairState> pattern);

StateVector pair_pattern_state(LayoutPtr layout, const QubitCollection& qubits, std::span<const PairState> pattern);

/// J^z eigenvalue of a pair pattern, tail included when the flag says so.
int pattern_jz(const QubitCollection& qubits, std::span<const PairState> pattern, CollectiveOptions options = {});

/// |-> _j: J^z |->_j = -2j |->_j and J^- |->_j = 0. Other subsystems in level 0.
StateVector subradiant_state(LayoutPtr layout, const QubitCollection& qubits, int j);

/// |j, m> reached from |j, -j> by the normalized collective raising ladder.
StateVector dicke_state(LayoutPtr layout, const QubitCollection& qubits, CollectiveQuantumNumbers q);

/// sqrt((j -+ m)(j +- m + 1)); raising = true gives the J^+ coefficient.
double ladder_coefficient(int j, int m, bool raising);

}  // namespace qswitch
