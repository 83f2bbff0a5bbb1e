#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "qswitch/collective.hpp"
#include "qswitch/hamiltonians.hpp"
#include "qswitch/lindblad.hpp"

namespace qswitch {

enum class ModelKind { dispersive_chain, full_kerr, jc_reference, storage_effective };

std::string_view to_string(ModelKind model);
std::optional<ModelKind> model_from_string(std::string_view text);

/// Either {"j": k} (canonical subradiant state) or an explicit pair pattern.
struct SwitchState {
  std::optional<int> j;
  std::vector<PairState> pattern;
  bool operator==(const SwitchState&) const = default;

  static SwitchState subradiant(int j_value) { return {j_value, {}}; }
};

struct TransmonParams {
  double alpha_ghz = 0.0;
  int levels = 3;
  std::map<std::string, double> chi_ghz;  // endpoint label -> cross-Kerr
  bool operator==(const TransmonParams&) const = default;
};

struct SwitchConfig {
  SwitchSpec spec;  // g_a/g_b follow endpoint order
  std::array<std::string, 2> endpoints;
  std::optional<SwitchState> state;
  std::optional<TransmonParams> transmon;
  bool operator==(const SwitchConfig&) const = default;
};

struct IntegratorConfig {
  double dt_ns = 0.01;
  double t_final_ns = 0.0;
  double sample_every_ns = 0.5;
  bool check_convergence = true;
  bool operator==(const IntegratorConfig&) const = default;
};

struct NetworkConfig {
  std::vector<ResonatorSpec> resonators;
  std::vector<SwitchConfig> switches;
  ModelKind model = ModelKind::dispersive_chain;
  std::map<std::string, int> initial_fock;
  std::map<std::string, SwitchState> initial_switch;
  IntegratorConfig integrator;
  bool odd_qubit_counts_in_jz = false;
  bool operator==(const NetworkConfig&) const = default;

  const ResonatorSpec& resonator(std::string_view label) const;
  const SwitchConfig& switch_config(std::string_view label) const;
  SwitchConfig& switch_config(std::string_view label);
};

/// Strict parse. Syntax errors carry "line L, column C"; schema errors carry
/// the JSON pointer of the offending field. Throws ConfigError.
NetworkConfig parse_config(std::string_view text);
NetworkConfig config_from_json(const nlohmann::ordered_json& doc);
nlohmann::ordered_json config_to_json(const NetworkConfig& config);
std::string serialize_config(const NetworkConfig& config);

/// Syntax-checked JSON document (duplicate keys rejected), for path overrides.
nlohmann::ordered_json parse_json_document(std::string_view text);

/// Effective state of a switch: initial override, then `state`, then all ground.
SwitchState resolved_state(const NetworkConfig& config, std::size_t switch_index);

/// Pair pattern of a state for a switch with `pairs` pairs.
std::vector<PairState> state_pattern(const SwitchState& state, int pairs);

void set_switch_state(NetworkConfig& config, std::string_view label, SwitchState state);

/// Layout labels of a switch's qubits: "<switch>.q1", "<switch>.q2", ...
std::vector<std::string> qubit_labels(const SwitchConfig& sw);

struct CompiledSwitch {
  std::string label;
  SwitchPlacement placement;
  std::vector<PairState> pattern;
};

struct CompiledSystem {
  LayoutPtr layout;
  Operator hamiltonian;
  std::vector<CollapseTerm> collapses;
  StateVector psi0;
  DensityMatrix rho0;
  std::vector<Observable> observables;  // n_<resonator>..., Jz_<switch>...
  std::vector<ResonatorSpec> resonators;
  std::vector<CompiledSwitch> switches;
  ModelKind model = ModelKind::dispersive_chain;
  CollectiveOptions collective;
};

/// Resonators in declaration order then switch qubits. Throws ConfigError
/// for cycles, unsupported model/topology combinations and initial Fock
/// indices that do not fit the truncation.
CompiledSystem compile(const NetworkConfig& config);

struct CouplingEntry {
  std::string first;
  std::string second;
  double coupling_ghz = 0.0;
  int hops = 1;  // 1: adjacent, > 1: through buses
  std::vector<std::string> via;
  double first_hop_g_ab_ghz = 0.0;  // bare g_ab of the first switch on the path
};

/// Adjacent pairs g_{k,k+1} <J_k^z>; storage pairs linked only through buses
/// get prod g / Delta_sb^(m-2) times prod <J_k^z>.
std::vector<CouplingEntry> effective_coupling_table(const NetworkConfig& config);

struct Diagnostic {
  enum class Severity { info, warning } severity = Severity::info;
  std::string path;
  std::string message;
};

/// Physics diagnostics of a parsed config: Delta/g per switch endpoint,
/// Delta_sb/g for storage-bus links, truncation headroom.
std::vector<Diagnostic> physics_diagnostics(const NetworkConfig& config);

/// Shipped presets, embedded at build time.
std::optional<std::string_view> preset_text(std::string_view name);
std::vector<std::string_view> preset_names();
NetworkConfig load_preset(std::string_view name);

}  // namespace qswitch
