#include "qswitch/hamiltonians.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

#include "qswitch/errors.hpp"
#include "qswitch/units.hpp"

namespace qswitch {

std::string_view to_string(ResonatorRole role) { return role == ResonatorRole::bus ? "bus" : "storage"; }

DispersiveCoefficients dispersive_coefficients(double g_a, double g_b, double delta_a, double delta_b) {
  if (delta_a == 0.0 || delta_b == 0.0) throw ResonanceError("dispersive model invalid at resonance (Delta = 0)");
  DispersiveCoefficients c;
  c.delta_a = delta_a;
  c.delta_b = delta_b;
  c.chi_a = g_a * g_a / delta_a;
  c.chi_b = g_b * g_b / delta_b;
  c.g_ab = g_a * g_b * (delta_a + delta_b) / (2.0 * delta_a * delta_b);
  return c;
}

SwitchPlacement place_switch(SwitchSpec spec, QubitCollection qubits, const ResonatorSpec& a, const ResonatorSpec& b) {
  SwitchPlacement p;
  p.coeffs = dispersive_coefficients(spec.g_a_ghz, spec.g_b_ghz, spec.omega_q_ghz - a.omega_ghz, spec.omega_q_ghz - b.omega_ghz);
  p.spec = std::move(spec);
  p.qubits = std::move(qubits);
  p.resonator_a = a.label;
  p.resonator_b = b.label;
  return p;
}

Operator bare_resonators(const LayoutPtr& layout, std::span<const ResonatorSpec> resonators) {
  Operator h = Operator::zero(layout);
  for (const auto& r : resonators) h += angular(r.omega_ghz) * number(layout, r.label);
  return h;
}

namespace {

Operator hopping(const LayoutPtr& layout, std::string_view first, std::string_view second) {
  const Operator a = annihilation(layout, first);
  const Operator b = annihilation(layout, second);
  return a * b.adjoint() + a.adjoint() * b;
}

Operator switch_dispersive_terms(const LayoutPtr& layout, const SwitchPlacement& sw, CollectiveOptions options) {
  const auto& c = sw.coeffs;
  const Operator jz = collective_operator(layout, sw.qubits, CollectiveKind::z, options);
  const Operator jpm = collective_operator(layout, sw.qubits, CollectiveKind::pm, options);
  const Operator na = number(layout, sw.resonator_a);
  const Operator nb = number(layout, sw.resonator_b);
  Operator stark = (0.5 * sw.spec.omega_q_ghz) * Operator::identity(layout) + c.chi_a * na + c.chi_b * nb;
  Operator h = stark * jz;
  h += c.g_ab * (hopping(layout, sw.resonator_a, sw.resonator_b) * jz);
  h += (c.chi_a + c.chi_b) * jpm;
  return kTwoPi * h;
}

const ResonatorSpec& find_resonator(std::span<const ResonatorSpec> resonators, const std::string& label) {
  for (const auto& r : resonators)
    if (r.label == label) return r;
  throw std::invalid_argument("switch endpoint '" + label + "' is not a resonator of this model");
}

}  // namespace

Operator build_dispersive(const LayoutPtr& layout, const ResonatorSpec& a, const ResonatorSpec& b, const SwitchPlacement& sw,
                          CollectiveOptions options) {
  if (sw.resonator_a != a.label || sw.resonator_b != b.label)
    throw std::invalid_argument("switch '" + sw.spec.label + "' does not bridge " + a.label + " and " + b.label);
  const ResonatorSpec pair[] = {a, b};
  return bare_resonators(layout, pair) + switch_dispersive_terms(layout, sw, options);
}

Operator build_network_dispersive(const LayoutPtr& layout, std::span<const ResonatorSpec> resonators,
                                  std::span<const SwitchPlacement> switches, CollectiveOptions options) {
  Operator h = bare_resonators(layout, resonators);
  for (const auto& sw : switches) {
    find_resonator(resonators, sw.resonator_a);
    find_resonator(resonators, sw.resonator_b);
    h += switch_dispersive_terms(layout, sw, options);
  }
  return h;
}

Operator build_chain_dispersive(const LayoutPtr& layout, std::span<const ResonatorSpec> resonators,
                                std::span<const SwitchPlacement> switches, CollectiveOptions options) {
  if (resonators.size() < 2) throw std::invalid_argument("a chain needs at least two resonators");
  if (switches.size() != resonators.size() - 1)
    throw std::invalid_argument("a chain of " + std::to_string(resonators.size()) + " resonators needs " +
                                std::to_string(resonators.size() - 1) + " switches");
  for (std::size_t k = 0; k < switches.size(); ++k) {
    const auto& sw = switches[k];
    const bool forward = sw.resonator_a == resonators[k].label && sw.resonator_b == resonators[k + 1].label;
    const bool backward = sw.resonator_b == resonators[k].label && sw.resonator_a == resonators[k + 1].label;
    if (!forward && !backward)
      throw std::invalid_argument("switch '" + sw.spec.label + "' does not bridge adjacent resonators " +
                                  resonators[k].label + " and " + resonators[k + 1].label);
  }
  return build_network_dispersive(layout, resonators, switches, options);
}

Operator build_jc_reference(const LayoutPtr& layout, std::span<const ResonatorSpec> resonators,
                            std::span<const SwitchPlacement> switches) {
  Operator h = bare_resonators(layout, resonators);
  Operator rest = Operator::zero(layout);
  for (const auto& sw : switches) {
    const Operator a = annihilation(layout, find_resonator(resonators, sw.resonator_a).label);
    const Operator b = annihilation(layout, find_resonator(resonators, sw.resonator_b).label);
    for (const auto& q : sw.qubits.labels()) {
      const Operator sp = pauli(layout, q, PauliAxis::plus);
      const Operator sm = pauli(layout, q, PauliAxis::minus);
      rest += (0.5 * sw.spec.omega_q_ghz) * pauli(layout, q, PauliAxis::z);
      rest += sw.spec.g_a_ghz * (a * sp + a.adjoint() * sm);
      rest += sw.spec.g_b_ghz * (b * sp + b.adjoint() * sm);
    }
    if (sw.spec.pair_coupling_ghz != 0.0)
      for (const auto& [q1, q2] : sw.qubits.pairs()) {
        const Operator s1 = pauli(layout, q1, PauliAxis::plus);
        const Operator s2 = pauli(layout, q2, PauliAxis::plus);
        rest += sw.spec.pair_coupling_ghz * (s1 * s2.adjoint() + s1.adjoint() * s2);
      }
  }
  return h + kTwoPi * rest;
}

Operator build_storage_effective(const LayoutPtr& layout, std::span<const ResonatorSpec> resonators,
                                 std::span<const SwitchPlacement> switches, CollectiveOptions options) {
  if (resonators.size() != 3 || switches.size() != 2)
    throw std::invalid_argument("storage_effective needs exactly three resonators and two switches");
  const ResonatorSpec& s1 = resonators[0];
  const ResonatorSpec& bus = resonators[1];
  const ResonatorSpec& s2 = resonators[2];
  if (s1.role != ResonatorRole::storage || s2.role != ResonatorRole::storage || bus.role != ResonatorRole::bus)
    throw std::invalid_argument("storage_effective expects storage, bus, storage in that order");
  if (std::abs(s1.omega_ghz - s2.omega_ghz) > 1e-12)
    throw std::invalid_argument("storage resonators must be degenerate");
  const double delta_sb = s1.omega_ghz - bus.omega_ghz;
  if (delta_sb == 0.0) throw ResonanceError("storage_effective invalid at Delta_sb = 0");

  Operator h = bare_resonators(layout, resonators);
  Operator rest = Operator::zero(layout);
  std::vector<Operator> jz;
  std::vector<double> g;
  for (std::size_t k = 0; k < 2; ++k) {
    const auto& sw = switches[k];
    const std::string& storage = k == 0 ? s1.label : s2.label;
    double chi_s = 0.0;
    double chi_b = 0.0;
    if (sw.resonator_a == storage && sw.resonator_b == bus.label) {
      chi_s = sw.coeffs.chi_a;
      chi_b = sw.coeffs.chi_b;
    } else if (sw.resonator_b == storage && sw.resonator_a == bus.label) {
      chi_s = sw.coeffs.chi_b;
      chi_b = sw.coeffs.chi_a;
    } else {
      throw std::invalid_argument("switch '" + sw.spec.label + "' must bridge " + storage + " and " + bus.label);
    }
    const Operator j = collective_operator(layout, sw.qubits, CollectiveKind::z, options);
    const double shift = sw.coeffs.g_ab * sw.coeffs.g_ab / delta_sb;
    const Operator id = Operator::identity(layout);
    Operator stark = (0.5 * sw.spec.omega_q_ghz) * id;
    stark += (chi_s * id + shift * j) * number(layout, storage);
    stark += (chi_b * id - shift * j) * number(layout, bus.label);
    rest += stark * j;
    jz.push_back(j);
    g.push_back(sw.coeffs.g_ab);
  }
  const Operator a1 = annihilation(layout, s1.label);
  const Operator a3 = annihilation(layout, s2.label);
  rest += (g[0] * g[1] / delta_sb) * ((a1.adjoint() * a3 + a1 * a3.adjoint()) * jz[0] * jz[1]);
  return h + kTwoPi * rest;
}

Operator build_full_kerr(const LayoutPtr& layout, std::span<const ResonatorSpec> resonators,
                         std::span<const TransmonSpec> transmons, std::span<const PairCoupling> pair_couplings) {
  Operator h = bare_resonators(layout, resonators);
  Operator rest = Operator::zero(layout);
  for (const auto& t : transmons) {
    const Subsystem& sub = layout->subsystem(t.label);
    if (sub.dim != t.levels)
      throw std::invalid_argument("transmon '" + t.label + "' has " + std::to_string(sub.dim) + " levels in the layout, spec says " +
                                  std::to_string(t.levels));
    const Operator c = annihilation(layout, t.label);
    const Operator n = c.adjoint() * c;
    rest += t.omega_ghz * n;
    rest += (0.5 * t.alpha_ghz) * (c.adjoint() * c.adjoint() * c * c);
    if (!t.resonator_a.empty()) rest += t.chi_a_ghz * (number(layout, find_resonator(resonators, t.resonator_a).label) * n);
    if (!t.resonator_b.empty()) rest += t.chi_b_ghz * (number(layout, find_resonator(resonators, t.resonator_b).label) * n);
  }
  for (const auto& k : pair_couplings) {
    const Operator c1 = annihilation(layout, k.first);
    const Operator c2 = annihilation(layout, k.second);
    rest += k.k_ghz * (c1.adjoint() * c2 + c1 * c2.adjoint());
  }
  return h + kTwoPi * rest;
}

double distant_coupling(std::span<const double> g_chain, double delta_sb, int m) {
  if (m < 3) throw std::invalid_argument("distant coupling needs m >= 3 resonators");
  if (static_cast<int>(g_chain.size()) != m - 1)
    throw std::invalid_argument("expected " + std::to_string(m - 1) + " nearest-neighbour couplings, got " +
                                std::to_string(g_chain.size()));
  if (delta_sb == 0.0) throw ResonanceError("distant coupling undefined at Delta_sb = 0");
  double product = 1.0;
  for (double g : g_chain) product *= g;
  return product / std::pow(delta_sb, m - 2);
}

}  // namespace qswitch
