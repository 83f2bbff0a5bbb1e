#pragma once

#include <optional>

#include "qswitch/analysis.hpp"
#include "qswitch/lindblad.hpp"
#include "qswitch/network.hpp"

namespace qswitch {

IntegratorSettings integrator_settings(const IntegratorConfig& config);

/// Integrate a compiled system on the sampling grid of `config`, recording
/// the system's observables.
Trajectory simulate(const CompiledSystem& system, const IntegratorConfig& config);

struct Figure4Options {
  std::optional<ModelKind> model;
  std::optional<int> qubits_per_switch;  // resets both switches' states
  int fock_scale = 1;                    // multiplies every fock_dim
};

/// Storage-bus-storage chain with switch alpha (the first switch) either in
/// its all-ground state or all-singlet state; the second switch stays on.
/// Throws ConfigError when the config is not such a chain.
Trajectory figure4_experiment(const NetworkConfig& config, bool switch_alpha_on, Figure4Options options = {});

/// The config actually integrated by figure4_experiment.
NetworkConfig figure4_config(const NetworkConfig& config, bool switch_alpha_on, Figure4Options options = {});

struct Figure4Summary {
  double g12_ghz = 0.0;        // |g_ab| of switch alpha
  SwapFit swap;                // A -> C
  double ratio = 0.0;          // |swap.coupling| / g12
  double max_bus = 0.0;
  double max_far = 0.0;        // max n_C
  DecayFit near_decay;         // n_A
  double bare_decay_rate = 0.0;  // 2 kappa_s, rad/ns
};

Figure4Summary summarize_figure4(const NetworkConfig& config, const Trajectory& trajectory);

}  // namespace qswitch
