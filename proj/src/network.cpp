#include "qswitch/network.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <set>

#include "qswitch/errors.hpp"
#include "qswitch/units.hpp"

namespace qswitch {

using json = nlohmann::ordered_json;

std::string_view to_string(ModelKind model) {
  switch (model) {
    case ModelKind::dispersive_chain: return "dispersive_chain";
    case ModelKind::full_kerr: return "full_kerr";
    case ModelKind::jc_reference: return "jc_reference";
    case ModelKind::storage_effective: return "storage_effective";
  }
  return "?";
}

std::optional<ModelKind> model_from_string(std::string_view text) {
  for (ModelKind m : {ModelKind::dispersive_chain, ModelKind::full_kerr, ModelKind::jc_reference, ModelKind::storage_effective})
    if (to_string(m) == text) return m;
  return std::nullopt;
}

const ResonatorSpec& NetworkConfig::resonator(std::string_view label) const {
  for (const auto& r : resonators)
    if (r.label == label) return r;
  throw std::out_of_range("no resonator '" + std::string(label) + "'");
}

const SwitchConfig& NetworkConfig::switch_config(std::string_view label) const {
  for (const auto& s : switches)
    if (s.spec.label == label) return s;
  throw std::out_of_range("no switch '" + std::string(label) + "'");
}

SwitchConfig& NetworkConfig::switch_config(std::string_view label) {
  return const_cast<SwitchConfig&>(std::as_const(*this).switch_config(label));
}

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& message) {
  throw ConfigError(path.empty() ? "/" : path, message);
}

std::string child(const std::string& path, std::string_view key) { return path + "/" + std::string(key); }
std::string child(const std::string& path, std::size_t index) { return path + "/" + std::to_string(index); }

void require_object(const json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
}

void check_keys(const json& obj, const std::string& path, std::initializer_list<std::string_view> allowed) {
  for (const auto& [key, value] : obj.items())
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) fail(child(path, key), "unknown key '" + key + "'");
}

const json& require(const json& obj, const std::string& path, std::string_view key) {
  const auto it = obj.find(std::string(key));
  if (it == obj.end()) fail(child(path, key), "missing required field");
  return *it;
}

double number_at(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(path, "expected a finite number");
  return v;
}

double get_number(const json& obj, const std::string& path, std::string_view key, std::optional<double> fallback = {}) {
  const auto it = obj.find(std::string(key));
  if (it == obj.end()) {
    if (fallback) return *fallback;
    fail(child(path, key), "missing required field");
  }
  return number_at(*it, child(path, key));
}

double get_non_negative(const json& obj, const std::string& path, std::string_view key, std::optional<double> fallback = {}) {
  const double v = get_number(obj, path, key, fallback);
  if (v < 0.0) fail(child(path, key), "must be non-negative");
  return v;
}

int int_at(const json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  return j.get<int>();
}

int get_int(const json& obj, const std::string& path, std::string_view key) {
  return int_at(require(obj, path, key), child(path, key));
}

std::string get_string(const json& obj, const std::string& path, std::string_view key) {
  const json& v = require(obj, path, key);
  if (!v.is_string()) fail(child(path, key), "expected a string");
  const auto s = v.get<std::string>();
  if (s.empty()) fail(child(path, key), "must not be empty");
  return s;
}

bool get_bool(const json& obj, const std::string& path, std::string_view key, bool fallback) {
  const auto it = obj.find(std::string(key));
  if (it == obj.end()) return fallback;
  if (!it->is_boolean()) fail(child(path, key), "expected true or false");
  return it->get<bool>();
}

SwitchState parse_state(const json& j, const std::string& path) {
  require_object(j, path);
  check_keys(j, path, {"j", "pattern"});
  const bool has_j = j.contains("j");
  const bool has_pattern = j.contains("pattern");
  if (has_j == has_pattern) fail(path, "state needs exactly one of 'j' or 'pattern'");
  SwitchState s;
  if (has_j) {
    s.j = int_at(j["j"], child(path, "j"));
    return s;
  }
  const json& p = j["pattern"];
  const std::string ppath = child(path, "pattern");
  if (!p.is_array()) fail(ppath, "expected an array of pair states");
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (!p[k].is_string()) fail(child(ppath, k), "expected a pair state string");
    const auto st = pair_state_from_string(p[k].get<std::string>());
    if (!st || (*st != PairState::ground && *st != PairState::singlet && *st != PairState::excited))
      fail(child(ppath, k), "pair state must be one of gg, singlet, ee");
    s.pattern.push_back(*st);
  }
  return s;
}

void check_state_range(const SwitchState& s, int pairs, const std::string& path) {
  if (s.j) {
    if (*s.j < 0 || *s.j > pairs)
      fail(child(path, "j"), "j = " + std::to_string(*s.j) + " outside [0, " + std::to_string(pairs) + "]");
  } else if (static_cast<int>(s.pattern.size()) != pairs) {
    fail(child(path, "pattern"), "pattern has " + std::to_string(s.pattern.size()) + " entries, switch has " +
                                     std::to_string(pairs) + " pairs");
  }
}

json state_to_json(const SwitchState& s) {
  json j = json::object();
  if (s.j) {
    j["j"] = *s.j;
  } else {
    json p = json::array();
    for (PairState st : s.pattern) p.push_back(std::string(to_string(st)));
    j["pattern"] = p;
  }
  return j;
}

std::pair<int, int> line_column(std::string_view text, std::size_t byte) {
  int line = 1, col = 1;
  const std::size_t end = std::min(byte > 0 ? byte - 1 : 0, text.size());
  for (std::size_t k = 0; k < end; ++k) {
    if (text[k] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace

json parse_json_document(std::string_view text) {
  std::vector<std::set<std::string>> keys;
  std::optional<std::string> duplicate;
  json::parser_callback_t cb = [&](int, json::parse_event_t event, json& parsed) {
    if (event == json::parse_event_t::object_start) keys.emplace_back();
    else if (event == json::parse_event_t::object_end && !keys.empty()) keys.pop_back();
    else if (event == json::parse_event_t::key && !keys.empty() && !duplicate) {
      const auto k = parsed.get<std::string>();
      if (!keys.back().insert(k).second) duplicate = k;
    }
    return true;
  };
  json doc;
  try {
    doc = json::parse(text.begin(), text.end(), cb, true, false);
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_column(text, e.byte);
    std::string what = e.what();
    const auto pos = what.find("syntax error");
    fail("line " + std::to_string(line) + ", column " + std::to_string(col),
         pos == std::string::npos ? what : what.substr(pos));
  }
  if (duplicate) fail("", "duplicate key '" + *duplicate + "'");
  return doc;
}

NetworkConfig config_from_json(const json& doc) {
  require_object(doc, "");
  check_keys(doc, "", {"resonators", "switches", "model", "initial", "integrator", "flags"});
  NetworkConfig cfg;
  std::set<std::string> labels;

  const json& res = require(doc, "", "resonators");
  if (!res.is_array()) fail("/resonators", "expected an array");
  if (res.empty()) fail("/resonators", "at least one resonator required");
  for (std::size_t k = 0; k < res.size(); ++k) {
    const std::string path = child("/resonators", k);
    const json& r = res[k];
    require_object(r, path);
    check_keys(r, path, {"label", "omega_ghz", "fock_dim", "kappa_ghz", "role"});
    ResonatorSpec spec;
    spec.label = get_string(r, path, "label");
    if (!labels.insert(spec.label).second) fail(child(path, "label"), "duplicate label '" + spec.label + "'");
    spec.omega_ghz = get_number(r, path, "omega_ghz");
    spec.fock_dim = get_int(r, path, "fock_dim");
    if (spec.fock_dim < 2) fail(child(path, "fock_dim"), "fock_dim must be at least 2");
    spec.kappa_ghz = get_non_negative(r, path, "kappa_ghz", 0.0);
    const std::string role = r.contains("role") ? get_string(r, path, "role") : "storage";
    if (role == "storage") spec.role = ResonatorRole::storage;
    else if (role == "bus") spec.role = ResonatorRole::bus;
    else fail(child(path, "role"), "role must be 'storage' or 'bus'");
    cfg.resonators.push_back(spec);
  }
  auto has_resonator = [&](const std::string& l) {
    return std::any_of(cfg.resonators.begin(), cfg.resonators.end(), [&](const auto& r) { return r.label == l; });
  };

  if (doc.contains("switches")) {
    const json& sws = doc["switches"];
    if (!sws.is_array()) fail("/switches", "expected an array");
    for (std::size_t k = 0; k < sws.size(); ++k) {
      const std::string path = child("/switches", k);
      const json& s = sws[k];
      require_object(s, path);
      check_keys(s, path, {"label", "endpoints", "n_qubits", "omega_q_ghz", "g_ghz", "gamma_ghz", "gamma_phi_ghz",
                           "pair_coupling_ghz", "state", "transmon"});
      SwitchConfig sw;
      sw.spec.label = get_string(s, path, "label");
      if (!labels.insert(sw.spec.label).second) fail(child(path, "label"), "duplicate label '" + sw.spec.label + "'");
      const json& ep = require(s, path, "endpoints");
      const std::string eppath = child(path, "endpoints");
      if (!ep.is_array() || ep.size() != 2) fail(eppath, "endpoints must list exactly two resonators");
      for (std::size_t e = 0; e < 2; ++e) {
        if (!ep[e].is_string()) fail(child(eppath, e), "expected a resonator label");
        sw.endpoints[e] = ep[e].get<std::string>();
        if (!has_resonator(sw.endpoints[e])) fail(child(eppath, e), "unknown resonator '" + sw.endpoints[e] + "'");
      }
      if (sw.endpoints[0] == sw.endpoints[1]) fail(eppath, "a switch cannot connect a resonator to itself");
      sw.spec.qubit_count = get_int(s, path, "n_qubits");
      if (sw.spec.qubit_count < 1) fail(child(path, "n_qubits"), "n_qubits must be at least 1");
      sw.spec.omega_q_ghz = get_number(s, path, "omega_q_ghz");
      const json& g = require(s, path, "g_ghz");
      const std::string gpath = child(path, "g_ghz");
      require_object(g, gpath);
      for (const auto& [key, value] : g.items())
        if (key != sw.endpoints[0] && key != sw.endpoints[1]) fail(child(gpath, key), "'" + key + "' is not an endpoint");
      sw.spec.g_a_ghz = get_number(g, gpath, sw.endpoints[0]);
      sw.spec.g_b_ghz = get_number(g, gpath, sw.endpoints[1]);
      sw.spec.gamma_ghz = get_non_negative(s, path, "gamma_ghz", 0.0);
      sw.spec.gamma_phi_ghz = get_non_negative(s, path, "gamma_phi_ghz", 0.0);
      sw.spec.pair_coupling_ghz = get_number(s, path, "pair_coupling_ghz", 0.0);
      const int pairs = sw.spec.qubit_count / 2;
      if (s.contains("state")) {
        sw.state = parse_state(s["state"], child(path, "state"));
        check_state_range(*sw.state, pairs, child(path, "state"));
      }
      if (s.contains("transmon")) {
        const std::string tpath = child(path, "transmon");
        const json& t = s["transmon"];
        require_object(t, tpath);
        check_keys(t, tpath, {"alpha_ghz", "levels", "chi_ghz"});
        TransmonParams tp;
        tp.alpha_ghz = get_number(t, tpath, "alpha_ghz");
        tp.levels = get_int(t, tpath, "levels");
        if (tp.levels < 2) fail(child(tpath, "levels"), "levels must be at least 2");
        const json& chi = require(t, tpath, "chi_ghz");
        const std::string cpath = child(tpath, "chi_ghz");
        require_object(chi, cpath);
        for (const auto& [key, value] : chi.items()) {
          if (key != sw.endpoints[0] && key != sw.endpoints[1]) fail(child(cpath, key), "'" + key + "' is not an endpoint");
          tp.chi_ghz[key] = number_at(value, child(cpath, key));
        }
        sw.transmon = tp;
      }
      cfg.switches.push_back(std::move(sw));
    }
  }

  if (doc.contains("model")) {
    const std::string m = get_string(doc, "", "model");
    const auto kind = model_from_string(m);
    if (!kind) fail("/model", "unknown model '" + m + "' (dispersive_chain, full_kerr, jc_reference, storage_effective)");
    cfg.model = *kind;
  }

  if (doc.contains("initial")) {
    const json& init = doc["initial"];
    require_object(init, "/initial");
    for (const auto& [key, value] : init.items()) {
      const std::string path = child("/initial", key);
      if (has_resonator(key)) {
        const int n = int_at(value, path);
        if (n < 0) fail(path, "Fock index must be non-negative");
        cfg.initial_fock[key] = n;
      } else if (std::any_of(cfg.switches.begin(), cfg.switches.end(), [&](const auto& s) { return s.spec.label == key; })) {
        const SwitchConfig& sw = cfg.switch_config(key);
        if (sw.state) fail(path, "switch '" + key + "' already has a state in /switches");
        SwitchState st = parse_state(value, path);
        check_state_range(st, sw.spec.qubit_count / 2, path);
        cfg.initial_switch[key] = st;
      } else {
        fail(path, "unknown resonator or switch '" + key + "'");
      }
    }
  }

  if (doc.contains("integrator")) {
    const json& in = doc["integrator"];
    require_object(in, "/integrator");
    check_keys(in, "/integrator", {"dt_ns", "t_final_ns", "sample_every_ns", "check_convergence"});
    IntegratorConfig ic;
    ic.dt_ns = get_number(in, "/integrator", "dt_ns", ic.dt_ns);
    if (!(ic.dt_ns > 0.0)) fail("/integrator/dt_ns", "must be positive");
    ic.t_final_ns = get_non_negative(in, "/integrator", "t_final_ns", ic.t_final_ns);
    ic.sample_every_ns = get_number(in, "/integrator", "sample_every_ns", ic.sample_every_ns);
    if (!(ic.sample_every_ns > 0.0)) fail("/integrator/sample_every_ns", "must be positive");
    ic.check_convergence = get_bool(in, "/integrator", "check_convergence", true);
    cfg.integrator = ic;
  }

  if (doc.contains("flags")) {
    const json& f = doc["flags"];
    require_object(f, "/flags");
    check_keys(f, "/flags", {"odd_qubit_counts_in_Jz"});
    cfg.odd_qubit_counts_in_jz = get_bool(f, "/flags", "odd_qubit_counts_in_Jz", false);
  }
  return cfg;
}

NetworkConfig parse_config(std::string_view text) { return config_from_json(parse_json_document(text)); }

json config_to_json(const NetworkConfig& cfg) {
  json doc = json::object();
  json res = json::array();
  for (const auto& r : cfg.resonators)
    res.push_back({{"label", r.label},
                   {"omega_ghz", r.omega_ghz},
                   {"fock_dim", r.fock_dim},
                   {"kappa_ghz", r.kappa_ghz},
                   {"role", std::string(to_string(r.role))}});
  doc["resonators"] = res;
  json sws = json::array();
  for (const auto& s : cfg.switches) {
    json j = {{"label", s.spec.label},
              {"endpoints", {s.endpoints[0], s.endpoints[1]}},
              {"n_qubits", s.spec.qubit_count},
              {"omega_q_ghz", s.spec.omega_q_ghz},
              {"g_ghz", {{s.endpoints[0], s.spec.g_a_ghz}, {s.endpoints[1], s.spec.g_b_ghz}}},
              {"gamma_ghz", s.spec.gamma_ghz},
              {"gamma_phi_ghz", s.spec.gamma_phi_ghz},
              {"pair_coupling_ghz", s.spec.pair_coupling_ghz}};
    if (s.state) j["state"] = state_to_json(*s.state);
    if (s.transmon) {
      json chi = json::object();
      for (const auto& [k, v] : s.transmon->chi_ghz) chi[k] = v;
      j["transmon"] = {{"alpha_ghz", s.transmon->alpha_ghz}, {"levels", s.transmon->levels}, {"chi_ghz", chi}};
    }
    sws.push_back(j);
  }
  doc["switches"] = sws;
  doc["model"] = std::string(to_string(cfg.model));
  json init = json::object();
  for (const auto& [k, v] : cfg.initial_fock) init[k] = v;
  for (const auto& [k, v] : cfg.initial_switch) init[k] = state_to_json(v);
  doc["initial"] = init;
  doc["integrator"] = {{"dt_ns", cfg.integrator.dt_ns},
                       {"t_final_ns", cfg.integrator.t_final_ns},
                       {"sample_every_ns", cfg.integrator.sample_every_ns},
                       {"check_convergence", cfg.integrator.check_convergence}};
  doc["flags"] = {{"odd_qubit_counts_in_Jz", cfg.odd_qubit_counts_in_jz}};
  return doc;
}

std::string serialize_config(const NetworkConfig& config) { return config_to_json(config).dump(2) + "\n"; }

SwitchState resolved_state(const NetworkConfig& config, std::size_t switch_index) {
  const SwitchConfig& sw = config.switches.at(switch_index);
  if (const auto it = config.initial_switch.find(sw.spec.label); it != config.initial_switch.end()) return it->second;
  if (sw.state) return *sw.state;
  return SwitchState::subradiant(sw.spec.qubit_count / 2);
}

std::vector<PairState> state_pattern(const SwitchState& state, int pairs) {
  if (state.j) {
    if (*state.j < 0 || *state.j > pairs) throw std::out_of_range("j out of range");
    std::vector<PairState> p(static_cast<std::size_t>(pairs), PairState::singlet);
    for (int k = 0; k < *state.j; ++k) p[static_cast<std::size_t>(k)] = PairState::ground;
    return p;
  }
  if (static_cast<int>(state.pattern.size()) != pairs) throw std::invalid_argument("pattern length mismatch");
  return state.pattern;
}

void set_switch_state(NetworkConfig& config, std::string_view label, SwitchState state) {
  SwitchConfig& sw = config.switch_config(label);
  config.initial_switch.erase(sw.spec.label);
  sw.state = std::move(state);
}

std::vector<std::string> qubit_labels(const SwitchConfig& sw) {
  std::vector<std::string> labels;
  for (int k = 1; k <= sw.spec.qubit_count; ++k) labels.push_back(sw.spec.label + ".q" + std::to_string(k));
  return labels;
}

namespace {

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) { return parent[x] == x ? x : parent[x] = find(parent[x]); }
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[a] = b;
    return true;
  }
};

std::size_t resonator_index(const NetworkConfig& cfg, const std::string& label) {
  for (std::size_t k = 0; k < cfg.resonators.size(); ++k)
    if (cfg.resonators[k].label == label) return k;
  throw ConfigError("", "unknown resonator '" + label + "'");
}

void reject_cycles(const NetworkConfig& cfg) {
  UnionFind uf(cfg.resonators.size());
  for (std::size_t k = 0; k < cfg.switches.size(); ++k) {
    const auto& e = cfg.switches[k].endpoints;
    if (!uf.unite(resonator_index(cfg, e[0]), resonator_index(cfg, e[1])))
      fail(child("/switches", k), "switch '" + cfg.switches[k].spec.label + "' closes a cycle; only chains and trees compile");
  }
}

int pattern_jz_value(const SwitchConfig& sw, const std::vector<PairState>& pattern, bool odd_counts) {
  int jz = 0;
  for (PairState p : pattern) jz += pair_jz(p);
  if (odd_counts && sw.spec.qubit_count % 2 == 1) jz -= 1;
  return jz;
}

}  // namespace

CompiledSystem compile(const NetworkConfig& config) {
  reject_cycles(config);
  CollectiveOptions collective;
  collective.odd_qubit_counts_in_jz = config.odd_qubit_counts_in_jz;

  const bool kerr = config.model == ModelKind::full_kerr;
  std::vector<Subsystem> subs;
  for (const auto& r : config.resonators) subs.push_back({r.label, SubsystemKind::boson, r.fock_dim});
  for (std::size_t k = 0; k < config.switches.size(); ++k) {
    const auto& sw = config.switches[k];
    if (kerr && !sw.transmon)
      fail(child("/switches", k), "model full_kerr needs a 'transmon' block (alpha_ghz, levels, chi_ghz)");
    for (const auto& l : qubit_labels(sw)) {
      if (kerr) subs.push_back({l, SubsystemKind::transmon, sw.transmon->levels});
      else subs.push_back({l, SubsystemKind::qubit, 2});
    }
  }
  const LayoutPtr layout = make_layout(std::move(subs));
  std::vector<CompiledSwitch> compiled_switches;

  for (std::size_t k = 0; k < config.switches.size(); ++k) {
    const auto& sw = config.switches[k];
    CompiledSwitch cs;
    cs.label = sw.spec.label;
    QubitCollection qubits(qubit_labels(sw));
    const ResonatorSpec& a = config.resonator(sw.endpoints[0]);
    const ResonatorSpec& b = config.resonator(sw.endpoints[1]);
    try {
      cs.placement = place_switch(sw.spec, qubits, a, b);
    } catch (const ResonanceError& e) {
      if (config.model == ModelKind::dispersive_chain || config.model == ModelKind::storage_effective)
        fail(child("/switches", k), e.what());
      cs.placement.spec = sw.spec;
      cs.placement.qubits = qubits;
      cs.placement.resonator_a = a.label;
      cs.placement.resonator_b = b.label;
    }
    cs.pattern = state_pattern(resolved_state(config, k), qubits.pair_count());
    compiled_switches.push_back(std::move(cs));
  }

  std::vector<SwitchPlacement> placements;
  for (const auto& cs : compiled_switches) placements.push_back(cs.placement);
  auto build = [&]() -> Operator {
    switch (config.model) {
      case ModelKind::dispersive_chain:
        return build_network_dispersive(layout, config.resonators, placements, collective);
      case ModelKind::jc_reference:
        return build_jc_reference(layout, config.resonators, placements);
      case ModelKind::storage_effective:
        return build_storage_effective(layout, config.resonators, placements, collective);
      case ModelKind::full_kerr: {
        std::vector<TransmonSpec> transmons;
        std::vector<PairCoupling> pairs;
        for (const auto& sw : config.switches) {
          const auto labels = qubit_labels(sw);
          for (const auto& l : labels) {
            TransmonSpec t;
            t.label = l;
            t.omega_ghz = sw.spec.omega_q_ghz;
            t.alpha_ghz = sw.transmon->alpha_ghz;
            t.levels = sw.transmon->levels;
            t.resonator_a = sw.endpoints[0];
            t.resonator_b = sw.endpoints[1];
            const auto& chi = sw.transmon->chi_ghz;
            t.chi_a_ghz = chi.count(sw.endpoints[0]) ? chi.at(sw.endpoints[0]) : 0.0;
            t.chi_b_ghz = chi.count(sw.endpoints[1]) ? chi.at(sw.endpoints[1]) : 0.0;
            transmons.push_back(t);
          }
          if (sw.spec.pair_coupling_ghz != 0.0)
            for (std::size_t q = 0; q + 1 < labels.size(); q += 2)
              pairs.push_back({labels[q], labels[q + 1], sw.spec.pair_coupling_ghz});
        }
        return build_full_kerr(layout, config.resonators, transmons, pairs);
      }
    }
    throw std::logic_error("unhandled model");
  };
  std::optional<Operator> hamiltonian;
  try {
    hamiltonian = build();
  } catch (const ResonanceError& e) {
    fail("/model", e.what());
  } catch (const std::invalid_argument& e) {
    fail("/model", std::string(to_string(config.model)) + ": " + e.what());
  }

  std::vector<CollapseTerm> collapses;
  for (const auto& r : config.resonators)
    if (r.kappa_ghz > 0.0) collapses.push_back({annihilation(layout, r.label), r.kappa_ghz, "kappa_" + r.label});
  for (const auto& cs : compiled_switches) {
    const auto& q = cs.placement.qubits;
    for (int p = 0; p < q.pair_count(); ++p) {
      const std::string tag = cs.label + ".pair" + std::to_string(p + 1);
      if (cs.placement.spec.gamma_ghz > 0.0)
        collapses.push_back({pair_operator(layout, q, p, CollectiveKind::minus), 0.5 * cs.placement.spec.gamma_ghz, "gamma_" + tag});
      if (cs.placement.spec.gamma_phi_ghz > 0.0)
        collapses.push_back({pair_operator(layout, q, p, CollectiveKind::z), 0.5 * cs.placement.spec.gamma_phi_ghz, "gamma_phi_" + tag});
    }
  }

  std::vector<LocalFactor> factors;
  for (const auto& [label, n] : config.initial_fock) {
    const ResonatorSpec& r = config.resonator(label);
    if (n >= r.fock_dim)
      fail(child("/initial", label), "Fock index " + std::to_string(n) + " does not fit fock_dim " + std::to_string(r.fock_dim));
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(r.fock_dim);
    v(n) = 1.0;
    factors.push_back({{label}, v});
  }
  for (const auto& cs : compiled_switches) {
    auto f = pair_pattern_factors(*layout, cs.placement.qubits, cs.pattern);
    factors.insert(factors.end(), f.begin(), f.end());
  }
  StateVector psi0 = product_state(layout, factors);
  DensityMatrix rho0 = DensityMatrix::pure(psi0);

  std::vector<Observable> observables;
  for (const auto& r : config.resonators) observables.push_back({"n_" + r.label, number(layout, r.label)});
  for (const auto& cs : compiled_switches)
    observables.push_back({"Jz_" + cs.label, collective_operator(layout, cs.placement.qubits, CollectiveKind::z, collective)});
  return CompiledSystem{layout,          std::move(*hamiltonian),       std::move(collapses),
                        std::move(psi0), std::move(rho0),               std::move(observables),
                        config.resonators, std::move(compiled_switches), config.model,
                        collective};
}

std::vector<CouplingEntry> effective_coupling_table(const NetworkConfig& config) {
  reject_cycles(config);
  const std::size_t n = config.resonators.size();
  // adjacency: resonator -> (neighbour, switch index)
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> adj(n);
  std::vector<double> g(config.switches.size(), 0.0), jz(config.switches.size(), 0.0);
  for (std::size_t k = 0; k < config.switches.size(); ++k) {
    const auto& sw = config.switches[k];
    const std::size_t a = resonator_index(config, sw.endpoints[0]);
    const std::size_t b = resonator_index(config, sw.endpoints[1]);
    adj[a].push_back({b, k});
    adj[b].push_back({a, k});
    const ResonatorSpec& ra = config.resonators[a];
    const ResonatorSpec& rb = config.resonators[b];
    try {
      g[k] = dispersive_coefficients(sw.spec.g_a_ghz, sw.spec.g_b_ghz, sw.spec.omega_q_ghz - ra.omega_ghz,
                                     sw.spec.omega_q_ghz - rb.omega_ghz)
                 .g_ab;
    } catch (const ResonanceError& e) {
      fail(child("/switches", k), e.what());
    }
    jz[k] = pattern_jz_value(sw, state_pattern(resolved_state(config, k), sw.spec.qubit_count / 2),
                             config.odd_qubit_counts_in_jz);
  }

  std::vector<CouplingEntry> table;
  for (std::size_t s = 0; s < n; ++s) {
    // tree paths from s
    std::vector<long> prev_node(n, -1), prev_switch(n, -1);
    std::vector<char> seen(n, 0);
    std::vector<std::size_t> stack{s};
    seen[s] = 1;
    while (!stack.empty()) {
      const std::size_t u = stack.back();
      stack.pop_back();
      for (const auto& [v, k] : adj[u])
        if (!seen[v]) {
          seen[v] = 1;
          prev_node[v] = static_cast<long>(u);
          prev_switch[v] = static_cast<long>(k);
          stack.push_back(v);
        }
    }
    for (std::size_t t = s + 1; t < n; ++t) {
      if (!seen[t]) continue;
      std::vector<std::size_t> nodes{t}, sws;
      for (std::size_t v = t; v != s; v = static_cast<std::size_t>(prev_node[v])) {
        sws.push_back(static_cast<std::size_t>(prev_switch[v]));
        nodes.push_back(static_cast<std::size_t>(prev_node[v]));
      }
      std::reverse(nodes.begin(), nodes.end());
      std::reverse(sws.begin(), sws.end());
      CouplingEntry e;
      e.first = config.resonators[s].label;
      e.second = config.resonators[t].label;
      e.hops = static_cast<int>(sws.size());
      e.first_hop_g_ab_ghz = g[sws[0]];
      if (sws.size() == 1) {
        e.coupling_ghz = g[sws[0]] * jz[sws[0]];
        table.push_back(e);
        continue;
      }
      const ResonatorSpec& rs = config.resonators[s];
      const ResonatorSpec& rt = config.resonators[t];
      bool through_buses = rs.role == ResonatorRole::storage && rt.role == ResonatorRole::storage;
      for (std::size_t k = 1; k + 1 < nodes.size(); ++k) {
        through_buses = through_buses && config.resonators[nodes[k]].role == ResonatorRole::bus;
        e.via.push_back(config.resonators[nodes[k]].label);
      }
      if (!through_buses) continue;
      const double delta_sb = rs.omega_ghz - config.resonators[nodes[1]].omega_ghz;
      if (delta_sb == 0.0) continue;
      std::vector<double> chain;
      double jprod = 1.0;
      for (std::size_t k : sws) {
        chain.push_back(g[k]);
        jprod *= jz[k];
      }
      e.coupling_ghz = distant_coupling(chain, delta_sb, static_cast<int>(nodes.size())) * jprod;
      table.push_back(e);
    }
  }
  return table;
}

std::vector<Diagnostic> physics_diagnostics(const NetworkConfig& config) {
  std::vector<Diagnostic> out;
  auto add = [&](Diagnostic::Severity sev, std::string path, std::string msg) {
    out.push_back({sev, std::move(path), std::move(msg)});
  };
  auto num = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return std::string(buf);
  };
  using S = Diagnostic::Severity;

  for (std::size_t k = 0; k < config.switches.size(); ++k) {
    const auto& sw = config.switches[k];
    const std::string path = child("/switches", k);
    const double gs[2] = {sw.spec.g_a_ghz, sw.spec.g_b_ghz};
    double delta[2];
    for (int e = 0; e < 2; ++e) {
      const ResonatorSpec& r = config.resonator(sw.endpoints[static_cast<std::size_t>(e)]);
      delta[e] = sw.spec.omega_q_ghz - r.omega_ghz;
      if (delta[e] == 0.0) {
        add(S::warning, path, "dispersive model invalid at resonance (" + sw.spec.label + " - " + r.label + ")");
        continue;
      }
      if (gs[e] == 0.0) {
        add(S::info, path, sw.spec.label + " - " + r.label + ": g = 0");
        continue;
      }
      const double ratio = std::abs(delta[e] / gs[e]);
      const std::string msg = sw.spec.label + " - " + r.label + ": Delta/g = " + num(ratio);
      add(ratio < 10.0 - 1e-9 ? S::warning : S::info, path, ratio < 10.0 - 1e-9 ? msg + " (dispersive validity needs >= 10)" : msg);
    }
    if (delta[0] == 0.0 || delta[1] == 0.0) continue;
    const ResonatorSpec& a = config.resonator(sw.endpoints[0]);
    const ResonatorSpec& b = config.resonator(sw.endpoints[1]);
    if (a.role != b.role) {
      const double g_ab = dispersive_coefficients(gs[0], gs[1], delta[0], delta[1]).g_ab;
      const double delta_sb = (a.role == ResonatorRole::storage ? a.omega_ghz - b.omega_ghz : b.omega_ghz - a.omega_ghz);
      if (g_ab == 0.0) continue;
      const double ratio = std::abs(delta_sb / g_ab);
      const std::string msg = sw.spec.label + ": Delta_sb/g_ab = " + num(ratio);
      add(ratio < 10.0 - 1e-9 ? S::warning : S::info, path,
          ratio < 10.0 - 1e-9 ? msg + " (storage elimination needs >= 10)" : msg);
    }
  }
  for (std::size_t k = 0; k < config.resonators.size(); ++k) {
    const auto& r = config.resonators[k];
    const auto it = config.initial_fock.find(r.label);
    const int n0 = it == config.initial_fock.end() ? 0 : it->second;
    const int headroom = r.fock_dim - 1 - n0;
    const std::string path = child("/resonators", k);
    if (headroom < 0) add(S::warning, path, r.label + ": initial Fock index " + std::to_string(n0) + " exceeds the truncation");
    else if (headroom == 0)
      add(S::warning, path, r.label + ": initial Fock index sits on the top truncated level (no headroom)");
    else add(S::info, path, r.label + ": truncation headroom " + std::to_string(headroom) + " level(s) above the initial state");
  }
  return out;
}

NetworkConfig load_preset(std::string_view name) {
  const auto text = preset_text(name);
  if (!text) throw ConfigError("", "unknown preset '" + std::string(name) + "'");
  return parse_config(*text);
}

}  // namespace qswitch
