// Copyright 2026 The cluster-teleport Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cluster_teleport/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "cluster_teleport/analysis.hpp"

namespace cluster_teleport::cli {
namespace {

using nlohmann::json;
using protocols::AssumptionViolation;
using protocols::BellOutcome;
using protocols::ChannelParams;
using protocols::InputState;
using qcore::Amplitude;
using qcore::PureState;

constexpr double kTable1Tol = 1e-10;
constexpr double kTable2Tol = 1e-12;
constexpr std::uint64_t kRandomInputStream = 0x7a657461;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RawOptions {
  std::string config_path;
  std::string a, b, alpha, beta, gamma, eta;
  double rho = 0.0;
  std::uint64_t seed = 0;
  std::int64_t trials = 0;
  std::int64_t max_tries = 0;
  std::string protocol;
  std::string format;
  std::string out;
  std::vector<double> p_values;
  std::vector<std::int64_t> n_values;
  int inject_fault = -1;
};

// ---------------------------------------------------------------------------
// Config parsing

Amplitude parse_amplitude_text(const std::string& name, const std::string& text) {
  std::istringstream in(text);
  double re = 0.0;
  double im = 0.0;
  in >> re;
  if (!in) throw UsageError("--" + name + ": cannot parse '" + text + "'");
  if (in.peek() == ',') {
    in.get();
    in >> im;
    if (!in) throw UsageError("--" + name + ": cannot parse '" + text + "'");
  }
  in >> std::ws;
  if (!in.eof()) throw UsageError("--" + name + ": cannot parse '" + text + "'");
  return {re, im};
}

Amplitude parse_amplitude_json(const std::string& name, const json& value) {
  if (value.is_number()) return value.get<double>();
  if (value.is_array() && value.size() == 2 && value[0].is_number() && value[1].is_number()) {
    return {value[0].get<double>(), value[1].get<double>()};
  }
  throw UsageError("config '" + name + "': expected a number or [re, im]");
}

OutputFormat parse_format(const std::string& text) {
  if (text == "human") return OutputFormat::Human;
  if (text == "json") return OutputFormat::Json;
  if (text == "csv") return OutputFormat::Csv;
  throw UsageError("unknown format '" + text + "'");
}

InputState random_input(std::uint64_t seed) {
  Rng rng = Rng::for_stream(seed, kRandomInputStream);
  const double cos_theta = 1.0 - 2.0 * rng.uniform();
  const double phi = 2.0 * std::numbers::pi * rng.uniform();
  const double a = std::sqrt((1.0 + cos_theta) / 2.0);
  const double b = std::sqrt((1.0 - cos_theta) / 2.0);
  return {a, std::polar(b, phi)};
}

struct AmplitudeSource {
  std::optional<Amplitude> value;
  bool random = false;
};

RunConfig build_config(const CLI::App& app, const RawOptions& raw) {
  RunConfig cfg;
  AmplitudeSource a;
  AmplitudeSource b;
  std::optional<Amplitude> alpha, beta, gamma, eta;

  if (!raw.config_path.empty()) {
    std::ifstream in(raw.config_path);
    if (!in) throw UsageError("cannot read config '" + raw.config_path + "'");
    json doc;
    try {
      doc = json::parse(in);
    } catch (const json::parse_error& e) {
      throw UsageError("config '" + raw.config_path + "' is not valid JSON: " + e.what());
    }
    if (!doc.is_object()) throw UsageError("config must be a JSON object");
    for (const auto& [key, value] : doc.items()) {
      if (key == "a" || key == "b") {
        auto& target = key == "a" ? a : b;
        if (value.is_string() && value.get<std::string>() == "random") {
          target.random = true;
        } else {
          target.value = parse_amplitude_json(key, value);
        }
      } else if (key == "alpha") {
        alpha = parse_amplitude_json(key, value);
      } else if (key == "beta") {
        beta = parse_amplitude_json(key, value);
      } else if (key == "gamma") {
        gamma = parse_amplitude_json(key, value);
      } else if (key == "eta") {
        eta = parse_amplitude_json(key, value);
      } else if (key == "rho" && value.is_number()) {
        cfg.rho = value.get<double>();
      } else if (key == "seed" && value.is_number_unsigned()) {
        cfg.seed = value.get<std::uint64_t>();
      } else if (key == "trials" && value.is_number_integer()) {
        cfg.trials = value.get<std::int64_t>();
      } else if (key == "max_tries" && value.is_number_integer()) {
        cfg.max_tries = value.get<std::int64_t>();
      } else if (key == "protocol" && value.is_string()) {
        cfg.protocol = value.get<std::string>();
      } else if (key == "format" && value.is_string()) {
        cfg.format = parse_format(value.get<std::string>());
      } else if (key == "out" && value.is_string()) {
        cfg.out_path = value.get<std::string>();
      } else {
        throw UsageError("config: unknown or mistyped key '" + key + "'");
      }
    }
  }

  const auto given = [&](const char* name) { return app.get_option(name)->count() > 0; };
  const auto amplitude_flag = [&](const char* flag, const std::string& text, AmplitudeSource& target) {
    if (!given(flag)) return;
    if (text == "random") {
      target = {std::nullopt, true};
    } else {
      target = {parse_amplitude_text(flag + 2, text), false};
    }
  };
  amplitude_flag("--a", raw.a, a);
  amplitude_flag("--b", raw.b, b);
  if (given("--alpha")) alpha = parse_amplitude_text("alpha", raw.alpha);
  if (given("--beta")) beta = parse_amplitude_text("beta", raw.beta);
  if (given("--gamma")) gamma = parse_amplitude_text("gamma", raw.gamma);
  if (given("--eta")) eta = parse_amplitude_text("eta", raw.eta);
  if (given("--rho")) cfg.rho = raw.rho;
  if (given("--seed")) cfg.seed = raw.seed;
  if (given("--trials")) cfg.trials = raw.trials;
  if (given("--max-tries")) cfg.max_tries = raw.max_tries;
  if (given("--protocol")) cfg.protocol = raw.protocol;
  if (given("--format")) cfg.format = parse_format(raw.format);
  if (given("--out")) cfg.out_path = raw.out;
  cfg.p_values = raw.p_values;
  cfg.n_values = raw.n_values;

  if (cfg.protocol != "proposed" && cfg.protocol != "ramirez") {
    throw UsageError("unknown protocol '" + cfg.protocol + "'");
  }
  if (cfg.trials < 1) throw UsageError("trials must be at least 1");
  if (cfg.max_tries < 1) throw UsageError("max-tries must be at least 1");
  if (cfg.rho && !(*cfg.rho > 0.0 && std::isfinite(*cfg.rho))) throw UsageError("rho must be positive");
  for (double p : cfg.p_values) {
    if (!(p >= 0.0 && p <= 1.0)) throw UsageError("p values must lie in [0, 1]");
  }
  for (std::int64_t n : cfg.n_values) {
    if (n < 1) throw UsageError("N values must be at least 1");
  }

  if (a.random || b.random) {
    cfg.zeta = random_input(cfg.seed);
  } else if (a.value || b.value) {
    cfg.zeta = InputState(a.value.value_or(0.0), b.value.value_or(0.0));
  }
  if (alpha || beta || gamma || eta) {
    cfg.channel = ChannelParams(alpha.value_or(0.0), beta.value_or(0.0), gamma.value_or(0.0), eta.value_or(0.0));
  }
  return cfg;
}

// ---------------------------------------------------------------------------
// Formatting

std::string format_real(double value, int digits) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.*g", digits, value);
  return buffer;
}

std::string format_complex(Amplitude value) {
  if (value.imag() == 0.0) return format_real(value.real(), 12);
  return "(" + format_real(value.real(), 12) + (value.imag() < 0.0 ? "-" : "+") +
         format_real(std::abs(value.imag()), 12) + "i)";
}

std::string format_state(const PureState& state) {
  std::string out = "[";
  for (std::size_t i = 0; i < state.dim(); ++i) {
    if (i) out += ", ";
    out += format_complex(state.amplitude(i));
  }
  return out + "]";
}

json amplitudes_json(const PureState& state) {
  json out = json::array();
  for (const auto& amp : state.amplitudes()) out.push_back({amp.real(), amp.imag()});
  return out;
}

// ---------------------------------------------------------------------------
// verify-tables

struct CellRecord {
  int table = 1;
  std::string alice;  // empty for table 2
  std::string bob;
  double deviation = 0.0;
  double tolerance = 0.0;
  std::optional<PureState> oracle;
  std::optional<PureState> simulated;
  double oracle_probability = 0.0;
  double simulated_probability = 0.0;
  bool pass = false;

  std::string name() const {
    if (table == 1) return "table1 (alice=" + alice + ", bob=" + bob + ")";
    return "table2 (bob=" + bob + ")";
  }
};

// Largest amplitude gap after removing the best global phase.
double phase_aligned_gap(const PureState& x, const PureState& y) {
  Amplitude overlap = 0.0;
  for (std::size_t i = 0; i < x.dim(); ++i) overlap += std::conj(x.amplitude(i)) * y.amplitude(i);
  const Amplitude phase = std::abs(overlap) > 0.0 ? std::conj(overlap) / std::abs(overlap) : Amplitude(1.0);
  double gap = 0.0;
  for (std::size_t i = 0; i < x.dim(); ++i) gap = std::max(gap, std::abs(x.amplitude(i) - phase * y.amplitude(i)));
  return gap;
}

PureState orthogonal_partner(const PureState& s) {
  return PureState(s.labels(), {-std::conj(s.amplitude(1)), std::conj(s.amplitude(0))});
}

std::vector<CellRecord> verify_tables(const RunConfig& cfg, int inject_fault) {
  using namespace protocols;
  std::vector<CellRecord> cells;

  const PureState full = qcore::tensor_product(cfg.zeta.as_state(kInput), make_cluster_channel(cfg.channel));
  const auto alice_outcomes = qcore::bell_measure(full, kInput, kQ1);
  int index = 0;
  for (const auto& alice : alice_outcomes) {
    std::vector<qcore::MeasurementOutcome> bob_outcomes(4);
    if (alice.post_state) bob_outcomes = qcore::bell_measure(*alice.post_state, kQ2, kQ3);
    for (std::size_t j = 0; j < 4; ++j, ++index) {
      CellRecord cell;
      cell.table = 1;
      cell.alice = to_string(kBellOutcomes[alice.index]);
      cell.bob = to_string(kBellOutcomes[j]);
      cell.tolerance = kTable1Tol;
      const RamirezBranch branch = table1_outcome(kBellOutcomes[alice.index], kBellOutcomes[j], cfg.channel);
      try {
        cell.oracle = branch.collapse_state(cfg.zeta);
      } catch (const qcore::InvariantError&) {
      }
      if (cell.oracle && index == inject_fault) cell.oracle = orthogonal_partner(*cell.oracle);
      if (bob_outcomes[j].post_state) cell.simulated = qcore::extract_subsystem(*bob_outcomes[j].post_state, {kQ4});
      if (cell.oracle && cell.simulated) {
        cell.deviation = 1.0 - qcore::fidelity(*cell.simulated, *cell.oracle);
        cell.pass = cell.deviation < cell.tolerance;
      } else {
        cell.deviation = (cell.oracle || cell.simulated) ? 1.0 : 0.0;
        cell.pass = !cell.oracle && !cell.simulated;
      }
      cells.push_back(std::move(cell));
    }
  }

  const auto bob_outcomes = qcore::bell_measure(make_cluster_channel(cfg.channel), kQ2, kQ3);
  for (const auto& bob : bob_outcomes) {
    CellRecord cell;
    cell.table = 2;
    cell.bob = to_string(kBellOutcomes[bob.index]);
    cell.tolerance = kTable2Tol;
    const BranchInfo branch = table2_branch(kBellOutcomes[bob.index], cfg.channel);
    cell.oracle_probability = branch.prob + (index == inject_fault ? 0.25 : 0.0);
    cell.simulated_probability = bob.probability;
    cell.deviation = std::abs(cell.oracle_probability - cell.simulated_probability);
    if (branch.prob > qcore::kNegligibleProbability) cell.oracle = tau_state(branch);
    if (bob.post_state) cell.simulated = qcore::extract_subsystem(*bob.post_state, {kQ1, kQ4});
    if (cell.oracle && cell.simulated) {
      cell.deviation = std::max(cell.deviation, phase_aligned_gap(*cell.simulated, *cell.oracle));
    } else if (cell.oracle || cell.simulated) {
      cell.deviation = std::max(cell.deviation, 1.0);
    }
    cell.pass = cell.deviation < cell.tolerance;
    cells.push_back(std::move(cell));
    ++index;
  }
  return cells;
}

std::string render_verify(const std::vector<CellRecord>& cells, OutputFormat format) {
  std::ostringstream os;
  if (format == OutputFormat::Json) {
    json doc = json::array();
    for (const auto& c : cells) {
      json rec = {{"table", c.table}, {"bob", c.bob}, {"deviation", c.deviation}, {"tolerance", c.tolerance},
                  {"pass", c.pass}};
      if (c.table == 1) rec["alice"] = c.alice;
      if (c.table == 2) {
        rec["oracle_probability"] = c.oracle_probability;
        rec["simulated_probability"] = c.simulated_probability;
      }
      rec["oracle"] = c.oracle ? amplitudes_json(*c.oracle) : json(nullptr);
      rec["simulated"] = c.simulated ? amplitudes_json(*c.simulated) : json(nullptr);
      doc.push_back(std::move(rec));
    }
    os << doc.dump(2) << "\n";
  } else if (format == OutputFormat::Csv) {
    os << "table,alice,bob,deviation,pass\n";
    for (const auto& c : cells) {
      os << c.table << "," << c.alice << "," << c.bob << "," << format_real(c.deviation, 12) << ","
         << (c.pass ? "PASS" : "FAIL") << "\n";
    }
  } else {
    int passed1 = 0, passed2 = 0, total1 = 0, total2 = 0;
    for (const auto& c : cells) {
      (c.table == 1 ? total1 : total2) += 1;
      if (c.pass) (c.table == 1 ? passed1 : passed2) += 1;
      os << (c.pass ? "PASS " : "FAIL ") << c.name() << "  deviation=" << format_real(c.deviation, 3);
      if (c.oracle) os << "  table=" << format_state(*c.oracle);
      if (c.table == 2) os << "  Pr=" << format_probability(c.oracle_probability);
      os << "\n";
    }
    os << "table1: " << passed1 << "/" << total1 << " PASS\n";
    os << "table2: " << passed2 << "/" << total2 << " PASS\n";
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// run

std::string render_run(const RunConfig& cfg, const protocols::TeleportResult& result) {
  std::ostringstream os;
  if (cfg.format == OutputFormat::Json) {
    json doc = {
        {"protocol", cfg.protocol},
        {"seed", cfg.seed},
        {"status", protocols::to_string(result.status)},
        {"target_fidelity", result.target_fidelity},
        {"sender_fidelity_on_fail",
         result.sender_fidelity_on_fail ? json(*result.sender_fidelity_on_fail) : json(nullptr)},
        {"receiver_fail_bit", result.receiver_fail_bit ? json(*result.receiver_fail_bit) : json(nullptr)},
        {"transcript", result.transcript.to_json()},
    };
    os << doc.dump(2) << "\n";
  } else if (cfg.format == OutputFormat::Csv) {
    os << "protocol,seed,status,target_fidelity,sender_fidelity_on_fail\n";
    os << cfg.protocol << "," << cfg.seed << "," << protocols::to_string(result.status) << ","
       << format_probability(result.target_fidelity) << ","
       << (result.sender_fidelity_on_fail ? format_probability(*result.sender_fidelity_on_fail) : "") << "\n";
  } else {
    os << "protocol: " << cfg.protocol << "  seed: " << cfg.seed << "\n";
    for (const auto& line : result.transcript.to_lines()) os << "  " << line << "\n";
    os << "status: " << protocols::to_string(result.status) << "\n";
    os << "target fidelity: " << format_probability(result.target_fidelity) << "\n";
    if (result.sender_fidelity_on_fail) {
      os << "sender fidelity (qubit A): " << format_probability(*result.sender_fidelity_on_fail) << "\n";
    }
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// repeat

std::string render_repeat(const RunConfig& cfg, const analysis::RepeatStats& stats) {
  const auto geom = [&](std::int64_t k) {
    return std::pow(1.0 - stats.p_closed, static_cast<double>(k - 1)) * stats.p_closed;
  };
  std::ostringstream os;
  if (cfg.format == OutputFormat::Json) {
    json hist = json::array();
    for (const auto& [k, count] : stats.first_success_histogram) {
      hist.push_back({{"k", k}, {"count", count}, {"geom_expected", geom(k)}});
    }
    json doc = {{"trials", stats.trials},     {"max_tries", stats.max_tries},
                {"seed", stats.seed},         {"attempts", stats.attempts},
                {"successes", stats.successes}, {"exhausted", stats.exhausted},
                {"p_hat", stats.p_hat},       {"p_closed", stats.p_closed},
                {"min_sender_fidelity", stats.min_sender_fidelity}, {"histogram", hist}};
    os << doc.dump(2) << "\n";
  } else if (cfg.format == OutputFormat::Csv) {
    os << "p_hat,p_closed,k,count,geom_expected\n";
    for (const auto& [k, count] : stats.first_success_histogram) {
      os << format_probability(stats.p_hat) << "," << format_probability(stats.p_closed) << "," << k << "," << count
         << "," << format_probability(geom(k)) << "\n";
    }
  } else {
    os << "trials: " << stats.trials << "  max_tries: " << stats.max_tries << "  seed: " << stats.seed << "\n";
    os << "attempts: " << stats.attempts << "  successes: " << stats.successes << "  exhausted: " << stats.exhausted
       << "\n";
    os << "p_hat: " << format_probability(stats.p_hat) << "  p_closed: " << format_probability(stats.p_closed) << "\n";
    os << "min sender fidelity over failures: " << format_probability(stats.min_sender_fidelity) << "\n";
    os << "k  count  empirical  geom_expected\n";
    for (const auto& [k, count] : stats.first_success_histogram) {
      os << k << "  " << count << "  " << format_probability(static_cast<double>(count) / stats.trials) << "  "
         << format_probability(geom(k)) << "\n";
    }
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// fig2

std::string render_fig2(const RunConfig& cfg) {
  std::vector<analysis::Fig2Row> rows;
  if (cfg.p_values.empty() && cfg.n_values.empty()) {
    rows = analysis::figure2_panel_a();
    const auto b = analysis::figure2_panel_b();
    rows.insert(rows.end(), b.begin(), b.end());
  } else {
    std::vector<double> ps = cfg.p_values;
    std::vector<std::int64_t> ns = cfg.n_values;
    if (ps.empty()) ps = {0.1, 0.2, 0.3, 0.4, 0.5};
    if (ns.empty()) ns = {2, 10, 50, 100};
    rows = analysis::figure2_data(ps, ns);
  }
  std::ostringstream os;
  if (cfg.format == OutputFormat::Json) {
    json doc = json::array();
    for (const auto& r : rows) doc.push_back({{"p", r.p}, {"N", r.n}, {"prob", r.prob}});
    os << doc.dump(2) << "\n";
  } else {
    os << "p,N,prob\n";
    for (const auto& r : rows) os << format_probability(r.p) << "," << r.n << "," << format_probability(r.prob) << "\n";
  }
  return os.str();
}

}  // namespace

std::string format_probability(double value) { return format_real(value, 12); }

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Controlled probabilistic teleportation over a four-qubit cluster channel", "teleport"};
  app.require_subcommand(1);
  app.fallthrough();

  RawOptions raw;
  app.add_option("--config", raw.config_path, "Flat JSON config; complex values as [re, im]");
  app.add_option("--seed", raw.seed, "Generator seed");
  app.add_option("--trials", raw.trials, "Monte Carlo trials");
  app.add_option("--max-tries", raw.max_tries, "Attempts per trial");
  app.add_option("--protocol", raw.protocol, "ramirez | proposed");
  app.add_option("--format", raw.format, "human | json | csv");
  app.add_option("--out", raw.out, "Write output to PATH");
  app.add_option("--rho", raw.rho, "POVM rho (ramirez)");
  app.add_option("--alpha", raw.alpha, "Channel coefficient (re or re,im)");
  app.add_option("--beta", raw.beta, "Channel coefficient");
  app.add_option("--gamma", raw.gamma, "Channel coefficient");
  app.add_option("--eta", raw.eta, "Channel coefficient");
  app.add_option("--a", raw.a, "Input amplitude on |0> or 'random'");
  app.add_option("--b", raw.b, "Input amplitude on |1> or 'random'");
  app.add_option("--p", raw.p_values, "fig2 p grid")->delimiter(',');
  app.add_option("--n", raw.n_values, "fig2 N grid")->delimiter(',');
  app.add_option("--inject-fault", raw.inject_fault)->group("");

  auto* verify = app.add_subcommand("verify-tables", "Check both outcome tables against simulation");
  auto* run_cmd = app.add_subcommand("run", "Single protocol run with transcript");
  auto* repeat = app.add_subcommand("repeat", "Repeat-until-success Monte Carlo");
  auto* fig2 = app.add_subcommand("fig2", "Cumulative success probability grid");

  try {
    app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "teleport: " << e.what() << "\n";
    return kExitUsage;
  }

  RunConfig cfg;
  try {
    cfg = build_config(app, raw);
  } catch (const UsageError& e) {
    err << "teleport: " << e.what() << "\n";
    return kExitUsage;
  } catch (const qcore::InvariantError& e) {
    err << "teleport: invalid configuration: " << e.what() << "\n";
    return kExitUsage;
  }

  std::string text;
  int code = kExitOk;
  try {
    if (verify->parsed()) {
      const auto cells = verify_tables(cfg, raw.inject_fault);
      text = render_verify(cells, cfg.format);
      for (const auto& cell : cells) {
        if (!cell.pass) {
          err << "teleport: verification failed at " << cell.name() << " (deviation "
              << format_real(cell.deviation, 3) << ")\n";
          code = kExitVerificationFailed;
          break;
        }
      }
    } else if (run_cmd->parsed()) {
      const auto result = cfg.protocol == "ramirez"
                              ? protocols::ramirez_teleport(cfg.zeta, cfg.channel, cfg.seed, {cfg.rho})
                              : protocols::proposed_teleport(cfg.zeta, cfg.channel, cfg.seed);
      text = render_run(cfg, result);
    } else if (repeat->parsed()) {
      const unsigned workers = std::max(1u, std::thread::hardware_concurrency());
      const auto stats =
          analysis::monte_carlo_repeat(cfg.zeta, cfg.channel, cfg.trials, cfg.max_tries, cfg.seed, workers);
      text = render_repeat(cfg, stats);
    } else if (fig2->parsed()) {
      text = render_fig2(cfg);
    }
  } catch (const AssumptionViolation& e) {
    err << "teleport: " << e.what() << "\n";
    return kExitAssumption;
  } catch (const std::invalid_argument& e) {
    err << "teleport: " << e.what() << "\n";
    return kExitUsage;
  }

  if (cfg.out_path) {
    std::ofstream file(*cfg.out_path, std::ios::binary);
    if (!file) {
      err << "teleport: cannot write '" << *cfg.out_path << "'\n";
      return kExitUsage;
    }
    file << text;
  } else {
    out << text;
  }
  return code;
}

}  // namespace cluster_teleport::cli
