#pragma once

#include <span>
#include <string>
#include <vector>

#include "qswitch/collective.hpp"
#include "qswitch/operator.hpp"

namespace qswitch {

enum class ResonatorRole { storage, bus };

std::string_view to_string(ResonatorRole role);

struct ResonatorSpec {
  std::string label;
  double omega_ghz = 0.0;
  int fock_dim = 2;
  double kappa_ghz = 0.0;
  ResonatorRole role = ResonatorRole::storage;
  bool operator==(const ResonatorSpec&) const = default;
};

struct SwitchSpec {
  std::string label;
  int qubit_count = 2;
  double omega_q_ghz = 0.0;
  double g_a_ghz = 0.0;  // coupling to the first endpoint
  double g_b_ghz = 0.0;  // coupling to the second endpoint
  double gamma_ghz = 0.0;
  double gamma_phi_ghz = 0.0;
  double pair_coupling_ghz = 0.0;  // K between the two qubits of a pair
  bool operator==(const SwitchSpec&) const = default;
};

/// Multi-level transmon mode for the Kerr-form model. chi_* are the cross-Kerr
/// strengths towards the two resonators it sits between.
struct TransmonSpec {
  std::string label;
  double omega_ghz = 0.0;
  double alpha_ghz = 0.0;
  int levels = 3;
  std::string resonator_a;
  std::string resonator_b;
  double chi_a_ghz = 0.0;
  double chi_b_ghz = 0.0;
};

struct PairCoupling {
  std::string first;
  std::string second;
  double k_ghz = 0.0;
};

/// Delta = omega_q - omega_r.
struct DispersiveCoefficients {
  double chi_a = 0.0;
  double chi_b = 0.0;
  double g_ab = 0.0;
  double delta_a = 0.0;
  double delta_b = 0.0;
};

/// chi = g^2 / Delta, g_ab = g_a g_b (Delta_a + Delta_b) / (2 Delta_a Delta_b).
/// Throws ResonanceError when either detuning is zero.
DispersiveCoefficients dispersive_coefficients(double g_a, double g_b, double delta_a, double delta_b);

/// A switch sitting between two resonators of a layout.
struct SwitchPlacement {
  SwitchSpec spec;
  QubitCollection qubits;
  std::string resonator_a;
  std::string resonator_b;
  DispersiveCoefficients coeffs;
};

SwitchPlacement place_switch(SwitchSpec spec, QubitCollection qubits, const ResonatorSpec& a, const ResonatorSpec& b);

/// sum_r omega_r a_r^dagger a_r (angular).
Operator bare_resonators(const LayoutPtr& layout, std::span<const ResonatorSpec> resonators);

/// Two resonators and one switch:
/// w_a n_a + w_b n_b + (w_q/2 + chi_a n_a + chi_b n_b) J^z + g_ab (a b^dag + a^dag b) J^z + (chi_a + chi_b) J^{+-}
Operator build_dispersive(const LayoutPtr& layout, const ResonatorSpec& a, const ResonatorSpec& b,
                          const SwitchPlacement& sw, CollectiveOptions options = {});

/// Same terms summed over every switch of a tree of resonators.
Operator build_network_dispersive(const LayoutPtr& layout, std::span<const ResonatorSpec> resonators,
                                  std::span<const SwitchPlacement> switches, CollectiveOptions options = {});

/// Chain form: switch k must bridge resonators k and k+1 (std::invalid_argument otherwise).
Operator build_chain_dispersive(const LayoutPtr& layout, std::span<const ResonatorSpec> resonators,
                                std::span<const SwitchPlacement> switches, CollectiveOptions options = {});

/// Exchange-coupled two-level model: every qubit (odd tail included) couples
/// to both endpoints of its switch with g (a sigma^+ + a^dag sigma^-).
Operator build_jc_reference(const LayoutPtr& layout, std::span<const ResonatorSpec> resonators,
                            std::span<const SwitchPlacement> switches);

/// Storage-bus-storage chain after eliminating the direct hopping to second
/// order in g/Delta_sb. Throws ResonanceError for Delta_sb = 0 and
/// std::invalid_argument for anything other than two degenerate storages
/// around one bus.
Operator build_storage_effective(const LayoutPtr& layout, std::span<const ResonatorSpec> resonators,
                                 std::span<const SwitchPlacement> switches, CollectiveOptions options = {});

/// Kerr-form model: bare energies, (alpha/2) c^dag^2 c^2, cross-Kerr
/// chi n_r n_c and K (c^dag c' + c c'^dag) pair exchange.
Operator build_full_kerr(const LayoutPtr& layout, std::span<const ResonatorSpec> resonators,
                         std::span<const TransmonSpec> transmons, std::span<const PairCoupling> pair_couplings);

/// prod g_{k,k+1} / Delta_sb^(m-2) for an m-resonator chain.
double distant_coupling(std::span<const double> g_chain, double delta_sb, int m);

}  // namespace qswitch
