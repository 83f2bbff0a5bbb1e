#include "qswitch/experiments.hpp"

#include <algorithm>
#include <cmath>

#include "qswitch/errors.hpp"
#include "qswitch/units.hpp"

namespace qswitch {

IntegratorSettings integrator_settings(const IntegratorConfig& config) {
  IntegratorSettings s;
  s.dt_ns = config.dt_ns;
  s.check_convergence = config.check_convergence;
  return s;
}

Trajectory simulate(const CompiledSystem& system, const IntegratorConfig& config) {
  const auto grid = uniform_grid(config.t_final_ns, config.sample_every_ns);
  return integrate(system.hamiltonian, system.collapses, system.rho0, grid, system.observables, integrator_settings(config));
}

namespace {

void require_chain(const NetworkConfig& c) {
  if (c.resonators.size() != 3 || c.switches.size() != 2)
    throw ConfigError("", "three-resonator experiment needs 3 resonators and 2 switches");
  const auto& r = c.resonators;
  if (r[0].role != ResonatorRole::storage || r[1].role != ResonatorRole::bus || r[2].role != ResonatorRole::storage)
    throw ConfigError("/resonators", "three-resonator experiment expects storage, bus, storage");
  auto bridges = [](const SwitchConfig& s, const std::string& x, const std::string& y) {
    return (s.endpoints[0] == x && s.endpoints[1] == y) || (s.endpoints[0] == y && s.endpoints[1] == x);
  };
  if (!bridges(c.switches[0], r[0].label, r[1].label)) throw ConfigError("/switches/0", "first switch must bridge the first storage and the bus");
  if (!bridges(c.switches[1], r[1].label, r[2].label)) throw ConfigError("/switches/1", "second switch must bridge the bus and the second storage");
}

}  // namespace

NetworkConfig figure4_config(const NetworkConfig& config, bool switch_alpha_on, Figure4Options options) {
  require_chain(config);
  NetworkConfig c = config;
  if (options.model) c.model = *options.model;
  if (options.fock_scale != 1)
    for (auto& r : c.resonators) r.fock_dim *= options.fock_scale;
  if (options.qubits_per_switch)
    for (auto& s : c.switches) s.spec.qubit_count = *options.qubits_per_switch;
  for (std::size_t k = 0; k < 2; ++k) {
    const int pairs = c.switches[k].spec.qubit_count / 2;
    const bool on = k == 1 || switch_alpha_on;
    set_switch_state(c, c.switches[k].spec.label, SwitchState::subradiant(on ? pairs : 0));
  }
  return c;
}

Trajectory figure4_experiment(const NetworkConfig& config, bool switch_alpha_on, Figure4Options options) {
  const NetworkConfig c = figure4_config(config, switch_alpha_on, options);
  return simulate(compile(c), c.integrator);
}

Figure4Summary summarize_figure4(const NetworkConfig& config, const Trajectory& tr) {
  require_chain(config);
  Figure4Summary s;
  const auto& near = config.resonators[0];
  const auto& bus = config.resonators[1];
  const auto& far = config.resonators[2];
  const auto& sw = config.switches[0];
  const ResonatorSpec& a = config.resonator(sw.endpoints[0]);
  const ResonatorSpec& b = config.resonator(sw.endpoints[1]);
  s.g12_ghz = std::abs(
      dispersive_coefficients(sw.spec.g_a_ghz, sw.spec.g_b_ghz, sw.spec.omega_q_ghz - a.omega_ghz, sw.spec.omega_q_ghz - b.omega_ghz)
          .g_ab);
  const auto& na = tr.series("n_" + near.label);
  const auto& nb = tr.series("n_" + bus.label);
  const auto& nc = tr.series("n_" + far.label);
  s.swap = fit_swap_rate(tr.times, na, nc);
  s.ratio = std::abs(s.swap.coupling_ghz) / s.g12_ghz;
  s.max_bus = *std::max_element(nb.begin(), nb.end());
  s.max_far = *std::max_element(nc.begin(), nc.end());
  s.near_decay = fit_exponential_decay(tr.times, na, 1e-9);
  s.bare_decay_rate = 2.0 * angular(near.kappa_ghz);
  return s;
}

}  // namespace qswitch
