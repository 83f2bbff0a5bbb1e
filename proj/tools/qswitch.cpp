// qswitch command-line front end.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>
#include <tuple>

#include "CLI11.hpp"
#include "json.hpp"
#include "qswitch/diagnostics.hpp"
#include "qswitch/errors.hpp"
#include "qswitch/experiments.hpp"
#include "qswitch/network.hpp"
#include "qswitch/output.hpp"
#include "qswitch/protocol.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace qswitch;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct Source {
  std::string text;
  std::string preset;  // empty when read from a file
  std::string path;
};

// A config argument is a file path or, when no such file exists, a preset name.
Source load_source(const std::string& arg) {
  if (fs::exists(arg)) {
    std::ifstream f(arg, std::ios::binary);
    if (!f) throw ConfigError("", "cannot read " + arg);
    std::ostringstream s;
    s << f.rdbuf();
    return {s.str(), "", arg};
  }
  if (const auto text = preset_text(arg)) return {std::string(*text), arg, ""};
  std::string names;
  for (auto n : preset_names()) names += (names.empty() ? "" : ", ") + std::string(n);
  throw ConfigError("", "no file or preset named '" + arg + "' (presets: " + names + ")");
}

json scalar_from_text(const std::string& text) {
  if (text == "true") return true;
  if (text == "false") return false;
  try {
    std::size_t used = 0;
    const long long i = std::stoll(text, &used);
    if (used == text.size()) return i;
  } catch (const std::exception&) {
  }
  try {
    std::size_t used = 0;
    const double d = std::stod(text, &used);
    if (used == text.size()) return d;
  } catch (const std::exception&) {
  }
  return text;
}

std::pair<std::string, std::string> split_assignment(const std::string& arg, const char* what) {
  const auto eq = arg.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("", std::string(what) + " expects key=value, got '" + arg + "'");
  return {arg.substr(0, eq), arg.substr(eq + 1)};
}

void apply_set(json& doc, const std::string& assignment) {
  const auto [path, value] = split_assignment(assignment, "--set");
  json::json_pointer ptr;
  try {
    ptr = json::json_pointer(path);
  } catch (const json::exception&) {
    throw ConfigError(path, "not a JSON pointer");
  }
  doc[ptr] = scalar_from_text(value);
}

SwitchState parse_switch_state(const std::string& text, int pairs, const std::string& label) {
  if (text == "on") return SwitchState::subradiant(pairs);
  if (text == "off") return SwitchState::subradiant(0);
  if (text.rfind("j=", 0) == 0) {
    const int j = std::stoi(text.substr(2));
    if (j < 0 || j > pairs) throw ConfigError("--switch", label + ": j = " + std::to_string(j) + " out of range");
    return SwitchState::subradiant(j);
  }
  if (text.rfind("pattern=", 0) == 0) {
    SwitchState s;
    std::stringstream in(text.substr(8));
    std::string item;
    while (std::getline(in, item, ',')) {
      const auto p = pair_state_from_string(item);
      if (!p) throw ConfigError("--switch", label + ": unknown pair state '" + item + "'");
      s.pattern.push_back(*p);
    }
    if (static_cast<int>(s.pattern.size()) != pairs)
      throw ConfigError("--switch", label + ": pattern needs " + std::to_string(pairs) + " entries");
    return s;
  }
  throw ConfigError("--switch", label + ": state must be on, off, j=K or pattern=a,b,...");
}

struct Overrides {
  std::vector<std::string> sets;
  std::vector<std::string> switches;
};

json load_document(const Source& src, const Overrides& ov) {
  json doc = parse_json_document(src.text);
  for (const auto& s : ov.sets) apply_set(doc, s);
  return doc;
}

NetworkConfig finish_config(const json& doc, const Overrides& ov) {
  NetworkConfig cfg = config_from_json(doc);
  for (const auto& s : ov.switches) {
    const auto [label, state] = split_assignment(s, "--switch");
    const auto it = std::find_if(cfg.switches.begin(), cfg.switches.end(), [&](const auto& w) { return w.spec.label == label; });
    if (it == cfg.switches.end()) throw ConfigError("--switch", "unknown switch '" + label + "'");
    set_switch_state(cfg, label, parse_switch_state(state, it->spec.qubit_count / 2, label));
  }
  return cfg;
}

std::string join_command(int argc, char** argv) {
  std::string cmd;
  for (int k = 0; k < argc; ++k) cmd += (k ? " " : "") + std::string(argv[k]);
  return cmd;
}

json manifest(const NetworkConfig& cfg, const Source& src, const std::string& command, const Trajectory& tr,
              double wall_s, const std::vector<std::string>& warnings) {
  json m;
  m["config_hash"] = content_hash(serialize_config(cfg));
  m["preset"] = src.preset.empty() ? json(nullptr) : json(src.preset);
  m["config_path"] = src.path.empty() ? json(nullptr) : json(src.path);
  m["command"] = command;
  m["model"] = std::string(to_string(cfg.model));
  m["integrator"] = {{"method", "rk4"},
                     {"dt_ns", cfg.integrator.dt_ns},
                     {"t_final_ns", cfg.integrator.t_final_ns},
                     {"sample_every_ns", cfg.integrator.sample_every_ns},
                     {"check_convergence", cfg.integrator.check_convergence}};
  m["columns"] = csv_columns(tr);
  json meta = json::object();
  for (const auto& [k, v] : tr.metadata) meta[k] = v;
  m["run"] = meta;
  m["wall_time_s"] = wall_s;
  m["warnings"] = warnings;
  return m;
}

// Collects warnings emitted through qswitch::warn while alive.
class WarningCapture {
 public:
  WarningCapture() {
    previous_ = set_warning_handler([this](std::string_view msg) {
      std::lock_guard lock(mutex_);
      messages_.emplace_back(msg);
      std::cerr << "warning: " << msg << '\n';
    });
  }
  ~WarningCapture() { set_warning_handler(previous_); }
  std::vector<std::string> messages() const {
    std::lock_guard lock(mutex_);
    return messages_;
  }

 private:
  WarningHandler previous_;
  mutable std::mutex mutex_;
  std::vector<std::string> messages_;
};

int cmd_validate(const std::string& arg, const Overrides& ov) {
  const Source src = load_source(arg);
  const NetworkConfig cfg = finish_config(load_document(src, ov), ov);
  const CompiledSystem sys = compile(cfg);
  std::cout << "ok: " << cfg.resonators.size() << " resonator(s), " << cfg.switches.size() << " switch(es), model "
            << to_string(cfg.model) << ", total_dim " << sys.layout->total_dim() << '\n';
  for (const auto& d : physics_diagnostics(cfg))
    std::cout << (d.severity == Diagnostic::Severity::warning ? "warning " : "info ") << d.path << ": " << d.message << '\n';
  return 0;
}

int cmd_simulate(const std::string& arg, const Overrides& ov, const std::string& out, std::optional<double> t_final,
                 const std::string& command) {
  const Source src = load_source(arg);
  NetworkConfig cfg = finish_config(load_document(src, ov), ov);
  if (t_final) cfg.integrator.t_final_ns = *t_final;
  WarningCapture capture;
  const auto start = std::chrono::steady_clock::now();
  const Trajectory tr = simulate(compile(cfg), cfg.integrator);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_file_atomic(out, to_csv(tr));
  write_file_atomic(out + ".manifest.json", manifest(cfg, src, command, tr, wall, capture.messages()).dump(2) + "\n");
  std::cout << "wrote " << out << " (" << tr.times.size() << " rows, integrated dim " << tr.metadata.at("reduced_dim")
            << " of " << tr.metadata.at("full_dim") << ")\n";
  return 0;
}

json schedule_json(const PulseSchedule& s) {
  json steps = json::array();
  for (const auto& st : s.steps) {
    const char* axis = st.axis == PauliAxis::x ? "x" : st.axis == PauliAxis::y ? "y" : "z";
    steps.push_back({{"kind", std::string(to_string(st.kind))},
                     {"targets", st.targets},
                     {"duration_ns", st.duration_ns},
                     {"axis", axis},
                     {"angle", st.angle}});
  }
  return steps;
}

json protocol_json(const ProtocolPlan& plan, const ProtocolResult& r) {
  json out;
  out["direction"] = plan.direction == SwitchDirection::decrease ? "decrease" : "increase";
  out["j_initial"] = plan.j_initial;
  out["j_target"] = plan.j_target;
  out["t2_ns"] = plan.t2_ns;
  out["total_duration_ns"] = plan.schedule.total_duration();
  out["schedule"] = schedule_json(plan.schedule);
  out["step_fidelities"] = r.fidelities;
  out["jz_after_step"] = r.jz_after_step;
  out["final_fidelity"] = r.final_fidelity;
  out["min_closed_form_fidelity"] = r.min_closed_form_fidelity;
  json tl = json::array();
  for (const auto& s : r.timeline)
    tl.push_back({{"t_ns", s.t_ns}, {"step", s.step}, {"jz", s.jz}, {"closed_form_fidelity", s.closed_form_fidelity}});
  out["timeline"] = tl;
  return out;
}

int cmd_protocol(const std::string& arg, const Overrides& ov, std::string target, int j, int jprime, const std::string& out,
                 int samples, bool keep_photons, bool round_trip) {
  const Source src = load_source(arg);
  NetworkConfig cfg = finish_config(load_document(src, ov), ov);
  if (cfg.switches.empty()) throw ConfigError("/switches", "protocol needs at least one switch");
  if (target.empty()) target = cfg.switches.front().spec.label;
  SwitchConfig& sw = [&]() -> SwitchConfig& {
    try {
      return cfg.switch_config(target);
    } catch (const std::out_of_range&) {
      throw ConfigError("--target", "unknown switch '" + target + "'");
    }
  }();
  const int pairs = sw.spec.qubit_count / 2;
  if (j < 0 || j > pairs) throw ConfigError("--j", "j = " + std::to_string(j) + " outside [0, " + std::to_string(pairs) + "]");
  if (jprime < 0 || jprime > j) throw ConfigError("--jprime", "j' must lie in [0, j]");
  set_switch_state(cfg, target, SwitchState::subradiant(j));
  cfg.model = ModelKind::dispersive_chain;
  if (!keep_photons) cfg.initial_fock.clear();

  WarningCapture capture;
  const CompiledSystem sys = compile(cfg);
  const auto it = std::find_if(sys.switches.begin(), sys.switches.end(), [&](const auto& s) { return s.label == target; });
  const ProtocolPlan plan = plan_switch(it->placement.qubits, it->placement.coeffs, j, jprime);
  ProtocolOptions opts;
  opts.free_evolution_samples = samples;
  opts.collective = sys.collective;
  const ProtocolResult res = simulate_protocol(plan, sys.hamiltonian, sys.psi0, opts);

  json doc;
  doc["switch"] = target;
  doc["config_hash"] = content_hash(serialize_config(cfg));
  doc["chi_sum_ghz"] = it->placement.coeffs.chi_a + it->placement.coeffs.chi_b;
  doc["g_ab_ghz"] = it->placement.coeffs.g_ab;
  doc["forward"] = protocol_json(plan, res);
  if (round_trip) {
    const ProtocolPlan back = reverse_plan(plan);
    const StateVector end = res.states.empty() ? sys.psi0 : res.states.back();
    doc["reverse"] = protocol_json(back, simulate_protocol(back, sys.hamiltonian, end, opts));
  }
  doc["warnings"] = capture.messages();
  const std::string text = doc.dump(2) + "\n";
  if (out.empty()) std::cout << text;
  else write_file_atomic(out, text);
  std::cerr << "t2 = " << format_number(plan.t2_ns) << " ns, final fidelity " << format_number(res.final_fidelity) << '\n';
  return 0;
}

int cmd_couplings(const std::string& arg, const Overrides& ov, bool as_json) {
  const Source src = load_source(arg);
  const NetworkConfig cfg = finish_config(load_document(src, ov), ov);
  const auto table = effective_coupling_table(cfg);
  auto ratio = [](const CouplingEntry& e) { return e.first_hop_g_ab_ghz == 0.0 ? 0.0 : std::abs(e.coupling_ghz / e.first_hop_g_ab_ghz); };
  if (as_json) {
    json rows = json::array();
    for (const auto& e : table)
      rows.push_back({{"first", e.first}, {"second", e.second}, {"hops", e.hops}, {"via", e.via}, {"coupling_mhz", e.coupling_ghz * 1e3},
                      {"first_hop_g_ab_mhz", e.first_hop_g_ab_ghz * 1e3}, {"ratio_to_first_hop_g_ab", ratio(e)}});
    std::cout << rows.dump(2) << '\n';
    return 0;
  }
  std::printf("%-12s %-5s %-12s %-14s %s\n", "pair", "hops", "via", "coupling_MHz", "|coupling/g_ab|");
  for (const auto& e : table) {
    std::string via;
    for (const auto& v : e.via) via += (via.empty() ? "" : ",") + v;
    if (via.empty()) via = "-";
    std::printf("%-12s %-5d %-12s %-14s %s\n", (e.first + "-" + e.second).c_str(), e.hops, via.c_str(),
                format_number(e.coupling_ghz * 1e3).c_str(), format_number(ratio(e)).c_str());
  }
  return 0;
}

std::vector<double> parse_range(const std::string& text) {
  std::vector<double> values;
  auto number = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != s.size() || s.empty()) throw ConfigError("--param", "'" + s + "' is not a number");
    return v;
  };
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ':')) parts.push_back(item);
    if (parts.size() != 3) throw ConfigError("--param", "range must be start:stop:step");
    const double a = number(parts[0]), b = number(parts[1]), step = number(parts[2]);
    if (!(step > 0.0) || b < a) throw ConfigError("--param", "empty range '" + text + "'");
    const auto n = static_cast<long>(std::floor((b - a) / step + 1e-9));
    for (long k = 0; k <= n; ++k) values.push_back(a + static_cast<double>(k) * step);
  } else {
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ','))
      if (!item.empty()) values.push_back(number(item));
  }
  if (values.empty()) throw ConfigError("--param", "empty range");
  return values;
}

unsigned sweep_threads(std::size_t points) {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("QSWITCH_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) n = static_cast<unsigned>(v);
  }
  return static_cast<unsigned>(std::min<std::size_t>(n, points));
}

int cmd_sweep(const std::string& arg, const Overrides& ov, const std::vector<std::string>& params, const std::string& out_dir,
              const std::string& command) {
  const Source src = load_source(arg);
  // Sweep fields of the canonical document so defaults are addressable too.
  const json canonical = config_to_json(finish_config(load_document(src, ov), ov));
  struct Axis {
    std::string path;
    json::json_pointer ptr;
    std::vector<double> values;
    bool integral = false;
  };
  std::vector<Axis> axes;
  for (const auto& param : params) {
    Axis a;
    std::string range;
    std::tie(a.path, range) = split_assignment(param, "--param");
    try {
      a.ptr = json::json_pointer(a.path);
    } catch (const json::exception&) {
      throw ConfigError(a.path, "not a JSON pointer");
    }
    if (!canonical.contains(a.ptr) || !canonical[a.ptr].is_number())
      throw ConfigError(a.path, "sweep parameter must address a numeric field");
    a.integral = canonical[a.ptr].is_number_integer();
    a.values = parse_range(range);
    if (!axes.empty() && a.values.size() != axes.front().values.size())
      throw ConfigError("--param", "zipped parameters need the same number of values");
    axes.push_back(std::move(a));
  }
  const std::string& path = axes.front().path;
  const std::vector<double>& values = axes.front().values;
  std::vector<NetworkConfig> configs;
  for (std::size_t k = 0; k < values.size(); ++k) {
    json doc = canonical;
    for (const auto& a : axes) {
      const double v = a.values[k];
      if (a.integral) {
        if (v != std::floor(v)) throw ConfigError(a.path, "integer field swept with non-integer value " + format_number(v));
        doc[a.ptr] = static_cast<long long>(v);
      } else {
        doc[a.ptr] = v;
      }
    }
    configs.push_back(config_from_json(doc));
  }
  fs::create_directories(out_dir);

  struct Row {
    double table = 0.0;
    double table_ratio = 0.0;
    SwapFit swap;
    double decay = 0.0;
    std::string error;
    bool numerical = false;
  };
  std::vector<Row> rows(configs.size());
  WarningCapture capture;
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t k = next++; k < configs.size(); k = next++) {
      const NetworkConfig& cfg = configs[k];
      Row& row = rows[k];
      try {
        const auto start = std::chrono::steady_clock::now();
        const Trajectory tr = simulate(compile(cfg), cfg.integrator);
        const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const fs::path csv = fs::path(out_dir) / ("point_" + std::to_string(k) + ".csv");
        write_file_atomic(csv, to_csv(tr));
        write_file_atomic(csv.string() + ".manifest.json", manifest(cfg, src, command, tr, wall, {}).dump(2) + "\n");
        const auto& first = cfg.resonators.front().label;
        const auto& last = cfg.resonators.back().label;
        for (const auto& e : effective_coupling_table(cfg))
          if (e.first == first && e.second == last) {
            row.table = e.coupling_ghz;
            if (e.first_hop_g_ab_ghz != 0.0) row.table_ratio = std::abs(e.coupling_ghz / e.first_hop_g_ab_ghz);
          }
        if (cfg.resonators.size() > 1 && tr.times.size() > 1)
          row.swap = fit_swap_rate(tr.times, tr.series("n_" + first), tr.series("n_" + last));
        std::vector<double> total(tr.times.size(), 0.0);
        for (const auto& r : cfg.resonators) {
          const auto& n = tr.series("n_" + r.label);
          for (std::size_t i = 0; i < total.size(); ++i) total[i] += n[i];
        }
        if (tr.times.size() > 1) row.decay = fit_exponential_decay(tr.times, total, 1e-9).rate_per_ns;
      } catch (const NumericalError& e) {
        row.error = e.what();
        row.numerical = true;
      } catch (const std::exception& e) {
        row.error = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  const unsigned threads = sweep_threads(configs.size());
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  std::ostringstream summary;
  summary << "point,value,table_first_last_ghz,table_ratio_to_g_ab,swap_coupling_ghz,reached_quarter_swap,decay_rate_per_ns\n";
  int exit_code = 0;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const Row& r = rows[k];
    if (!r.error.empty()) {
      std::cerr << "point " << k << ": " << r.error << '\n';
      exit_code = std::max(exit_code, r.numerical ? kExitNumerical : kExitConfig);
      continue;
    }
    summary << k << ',' << format_number(values[k]) << ',' << format_number(r.table) << ',' << format_number(r.table_ratio)
            << ',' << format_number(r.swap.coupling_ghz)
            << ',' << (r.swap.reached_quarter_swap ? 1 : 0) << ',' << format_number(r.decay) << '\n';
  }
  write_file_atomic(fs::path(out_dir) / "summary.csv", summary.str());
  std::cout << "swept " << path << (axes.size() > 1 ? " (zipped)" : "") << " over " << values.size() << " point(s) with " << threads << " thread(s)\n";
  return exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Resonator networks coupled through collective-qubit switches"};
  app.require_subcommand(1);
  Overrides ov;
  std::string config;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("config", config, "config file or preset name")->required();
    sub->add_option("--set", ov.sets, "override a config field, /json/pointer=value");
  };

  CLI::App* validate = app.add_subcommand("validate", "schema and physics diagnostics");
  add_common(validate);
  validate->add_option("--switch", ov.switches, "switch state override, label=on|off|j=K|pattern=...");

  CLI::App* simulate_cmd = app.add_subcommand("simulate", "integrate the master equation, write CSV and manifest");
  add_common(simulate_cmd);
  std::string out;
  std::optional<double> t_final;
  simulate_cmd->add_option("--out", out, "output CSV")->required();
  simulate_cmd->add_option("--switch", ov.switches, "switch state override, label=on|off|j=K|pattern=...");
  simulate_cmd->add_option("--t-final", t_final, "override integrator t_final_ns");

  CLI::App* protocol = app.add_subcommand("protocol", "run the three-step switching protocol");
  add_common(protocol);
  std::string target;
  int j = 1, jprime = 1, samples = 50;
  bool keep_photons = false, round_trip = false;
  std::string protocol_out;
  protocol->add_option("--target", target, "switch to drive (default: first)");
  protocol->add_option("--j", j, "initial subradiant j");
  protocol->add_option("--jprime", jprime, "decrease j by this much");
  protocol->add_option("--out", protocol_out, "output JSON (default stdout)");
  protocol->add_option("--samples", samples, "samples during free evolution");
  protocol->add_flag("--keep-photons", keep_photons, "keep the config's initial Fock states instead of vacuum");
  protocol->add_flag("--round-trip", round_trip, "also run the reversed schedule");

  CLI::App* couplings = app.add_subcommand("couplings", "effective resonator-resonator couplings in MHz");
  add_common(couplings);
  bool as_json = false;
  couplings->add_option("--switch", ov.switches, "switch state override, label=on|off|j=K|pattern=...");
  couplings->add_flag("--json", as_json, "JSON instead of a table");

  CLI::App* sweep = app.add_subcommand("sweep", "parameter sweep, one CSV per point plus summary.csv");
  add_common(sweep);
  std::vector<std::string> params;
  std::string out_dir;
  sweep->add_option("--param", params, "/json/pointer=start:stop:step or v1,v2,...; repeat to zip several fields")->required();
  sweep->add_option("--out", out_dir, "output directory")->required();
  sweep->add_option("--switch", ov.switches, "switch state override, label=on|off|j=K|pattern=...");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  const std::string command = join_command(argc, argv);
  try {
    if (validate->parsed()) return cmd_validate(config, ov);
    if (simulate_cmd->parsed()) return cmd_simulate(config, ov, out, t_final, command);
    if (protocol->parsed()) return cmd_protocol(config, ov, target, j, jprime, protocol_out, samples, keep_photons, round_trip);
    if (couplings->parsed()) return cmd_couplings(config, ov, as_json);
    if (sweep->parsed()) return cmd_sweep(config, ov, params, out_dir, command);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::out_of_range& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
