#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "kbad/dynamics.hpp"

namespace kbad::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string resolve(const std::string& base, const std::string& path) {
  if (path.empty() || fs::path(path).is_absolute() || base.empty()) return path;
  return (fs::path(base) / path).string();
}

AliceKind parse_alice_kind(const std::string& s) {
  if (s == "strategy") return AliceKind::Strategy;
  if (s == "center_slab") return AliceKind::CenterSlab;
  if (s == "empty") return AliceKind::Empty;
  throw ConfigError("unknown alice '" + s + "'");
}

void validate(const RunConfig& c) {
  if (c.game == GameKind::Absolute) {
    if (!(c.beta > 0 && c.beta < 1.0 / 3.0)) throw ConfigError("absolute game needs 0 < beta < 1/3");
    if (c.alice == AliceKind::Strategy) throw ConfigError("the strategy plays the potential game; use alice = center_slab");
  } else {
    if (!(c.beta > 0 && c.beta < 1)) throw ConfigError("potential game needs 0 < beta < 1");
    if (!c.gamma || !(*c.gamma > 0)) throw ConfigError("potential game needs gamma > 0");
  }
  if (!(c.shrink >= c.beta && c.shrink <= 1)) throw ConfigError("shrink must lie in [beta, 1]");
  if (!(c.rho0 > 0)) throw ConfigError("rho0 must be positive");
  if (c.eps && !(*c.eps > 0)) throw ConfigError("eps must be positive");
  if (!(c.height_bound > 0)) throw ConfigError("height_bound must be positive");
  if (!(c.pool_height > 0)) throw ConfigError("pool_height must be positive");
  if (c.strategy.k_cut && *c.strategy.k_cut < 0) throw ConfigError("k_cut must be nonnegative");
  if (c.strategy.coord_bound && *c.strategy.coord_bound <= 0) throw ConfigError("coord_bound must be positive");
  for (std::size_t i = 1; i < c.t_grid.size(); ++i)
    if (!(c.t_grid[i] > c.t_grid[i - 1])) throw ConfigError("t_grid must be ascending");
}

struct Loaded {
  FieldSpec field;
  WeightVector w;
};

Loaded load_field_and_weights(const RunConfig& c) {
  if (c.field_path.empty()) throw ConfigError("missing key 'field'");
  const FieldDefinition def = load_field_definition(c.field_path);
  FieldSpec field = make_field(def.min_poly, def.basis);
  std::optional<WeightVector> w;
  if (c.weights) w = WeightVector::parse(*c.weights);
  else if (def.weights) w = def.weights;
  if (!w) throw ConfigError("no weights in the config or the field file");
  if (static_cast<int>(w->size()) != field.degree()) throw ConfigError("weights do not match the field degree");
  return {std::move(field), std::move(*w)};
}

void echo_config(const RunConfig& c) {
  fs::create_directories(c.out_dir);
  std::ofstream(fs::path(c.out_dir) / "config.cfg") << c.text;
}

std::string interval_text(const Interval& v) {
  return "[" + format_double(v.lo) + ", " + format_double(v.hi) + "]";
}

// Pins a relative path key to its absolute location so that the echoed
// config still works from the output directory.
void pin_path(RunConfig& c, const std::string& key, std::string& path, const std::optional<std::string>& raw) {
  if (!raw || fs::path(*raw).is_absolute()) return;
  path = fs::absolute(path).lexically_normal().string();
  if (!c.text.empty() && c.text.back() != '\n') c.text += '\n';
  c.text += key + " = " + path + "\n";
}

std::vector<double> parse_vector_key(const KeyValueFile& kv, const std::string& key) {
  if (auto v = kv.get(key)) return parse_double_list(*v);
  return {};
}

// ---- commands ----

int cmd_field(const std::string& path, double precision, std::ostream& out) {
  const FieldDefinition def = load_field_definition(path);
  const FieldSpec field = make_field(def.min_poly, def.basis);
  out << field.describe() << '\n';
  const auto d = static_cast<std::size_t>(field.degree());
  out << "roots:";
  for (const auto& r : field.roots()) out << ' ' << interval_text(to_interval(r));
  out << "\nintegral basis over 1, a, a^2, ...:\n";
  for (const auto& row : field.integral_basis()) {
    out << " ";
    for (const auto& x : row) out << ' ' << to_string(x);
    out << '\n';
  }
  out << "embeddings sigma_i(omega_j):\n";
  for (std::size_t i = 0; i < d; ++i) {
    out << " ";
    for (std::size_t j = 0; j < d; ++j) {
      std::vector<std::int64_t> coords(d, 0);
      coords[j] = 1;
      out << ' ' << interval_text(embed(field, FieldElement{coords}, precision)[i]);
    }
    out << '\n';
  }
  json j{{"command", "field"}, {"degree", field.degree()}, {"disc", field.disc().str()}, {"exit", kOk}};
  out << j.dump() << '\n';
  return kOk;
}

double resolve_eps(const RunConfig& c, int degree) {
  if (c.eps) return *c.eps;
  if (c.gamma && c.rho0 < 1) return compute_constants(c.beta, *c.gamma, degree, c.rho0).eps;
  throw ConfigError("missing key 'eps'");
}

int cmd_enumerate(const RunConfig& c, std::ostream& out) {
  auto [field, w] = load_field_and_weights(c);
  const double eps = resolve_eps(c, field.degree());
  const auto list = enumerate_denominators(field, w, eps, c.height_bound);
  std::optional<StrategyConstants> constants;
  if (c.gamma && c.rho0 < 1 && !c.eps) constants = compute_constants(c.beta, *c.gamma, field.degree(), c.rho0);
  echo_config(c);
  const fs::path csv = fs::path(c.out_dir) / "denominators.csv";
  std::ofstream os(csv);
  write_denominators_csv(os, field, list, [&](const Denominator& q) -> std::optional<std::pair<int, int>> {
    if (!constants) return std::nullopt;
    const auto cell = partition_index(field, w, *constants, q);
    if (!cell) return std::nullopt;
    return std::make_pair(cell->n, cell->k);
  });
  out << list.size() << " denominators with H(q) < " << format_double(c.height_bound) << " and eps = " << format_double(eps)
      << " written to " << csv.string() << '\n';
  json j{{"command", "enumerate"}, {"count", list.size()}, {"eps", eps}, {"height_bound", c.height_bound}, {"exit", kOk}};
  out << j.dump() << '\n';
  return kOk;
}

int cmd_bad(const RunConfig& c, std::ostream& out) {
  auto [field, w] = load_field_and_weights(c);
  if (c.x.size() != static_cast<std::size_t>(field.degree())) throw ConfigError("x must have one entry per embedding");
  const double eps = resolve_eps(c, field.degree());
  const Membership m = membership(field, w, c.x, eps, c.height_bound);
  const BadnessReport report = badness_constant(field, w, c.x, c.height_bound);
  json j{{"command", "bad"}, {"eps", eps}, {"height_bound", c.height_bound}};
  if (auto* e = std::get_if<Excluded>(&m)) {
    out << "excluded by the box of p = " << to_string(e->p) << ", q = " << to_string(e->q) << '\n';
    j["membership"] = "excluded";
    j["p"] = e->p.coords;
    j["q"] = e->q.coords;
  } else {
    out << "survives every box with H(q) < " << format_double(c.height_bound) << '\n';
    j["membership"] = "survives";
  }
  out << "badness below the bound: " << interval_text(report.value);
  if (report.witness) out << " at p = " << to_string(report.witness->first) << ", q = " << to_string(report.witness->second);
  out << '\n';
  j["badness"] = report.value.mid();
  j["exit"] = kOk;
  echo_config(c);
  out << j.dump() << '\n';
  return kOk;
}

int cmd_play(const RunConfig& c, std::ostream& out) {
  auto [field, w] = load_field_and_weights(c);
  const auto d = static_cast<std::size_t>(field.degree());
  std::vector<double> center = c.center.empty() ? std::vector<double>(d, 0.0) : c.center;
  if (center.size() != d) throw ConfigError("center must have one entry per embedding");
  Ball b0{center, c.rho0};

  std::unique_ptr<AliceStrategy> alice;
  PotentialStrategy* strategy = nullptr;
  if (c.alice == AliceKind::Strategy) {
    auto s = std::make_unique<PotentialStrategy>(field, w, c.strategy, c.rounds);
    strategy = s.get();
    alice = std::move(s);
  } else if (c.alice == AliceKind::CenterSlab) {
    alice = std::make_unique<CenterSlabStrategy>();
  } else {
    alice = std::make_unique<EmptyStrategy>();
  }

  std::unique_ptr<BobPlayer> bob;
  BobPolicy policy{c.bob, c.seed, c.shrink, std::nullopt};
  if (c.bob == BobKind::Random) {
    bob = std::make_unique<RandomBob>(policy);
  } else if (c.bob == BobKind::GreedyRational) {
    const double pool_eps = std::max(resolve_eps(c, field.degree()), 1.0);
    std::vector<double> lo(d), hi(d);
    for (std::size_t i = 0; i < d; ++i) {
      lo[i] = center[i] - c.rho0;
      hi[i] = center[i] + c.rho0;
    }
    policy.target_pool = target_pool(field, w, pool_eps, c.pool_height, lo, hi);
    if (policy.target_pool->empty()) throw ConfigError("greedy bob found no targets below pool_height");
    bob = std::make_unique<GreedyRationalBob>(policy);
  } else {
    auto scripted = std::make_unique<ScriptedBob>(load_transcript(c.transcript));
    b0 = scripted->record().balls.front();
    bob = std::move(scripted);
  }

  GameTranscript t = new_game(c.game, c.beta, c.game == GameKind::Potential ? c.gamma : std::nullopt, b0);
  for (std::size_t round = 0; round < c.rounds; ++round) {
    try {
      alice_move(t, alice->respond(t));
      bob_move(t, bob->move(t));
    } catch (const IllegalMove& e) {
      throw IllegalMove("round " + std::to_string(round) + ": " + e.detail());
    }
  }
  t.finish();
  const Verdict verdict = win_check_potential(t, [&](std::span<const double> x) {
    return strategy != nullptr && strategy->survives(x);
  });

  echo_config(c);
  {
    std::ofstream os(fs::path(c.out_dir) / "transcript.txt");
    write_transcript(os, t);
  }
  if (strategy) {
    std::ofstream os(fs::path(c.out_dir) / "emissions.csv");
    write_emission_log(os, strategy->emissions());
  }
  const Outcome o = outcome(t);
  out << "verdict: " << describe(verdict) << " after " << t.rounds() << " rounds; final radius "
      << format_double(o.radius_bound) << '\n';
  const int code = alice_wins(verdict) ? kOk : kUndetermined;
  json j{{"command", "play"}, {"verdict", describe(verdict)}, {"rounds", t.rounds()},
         {"final_radius", o.radius_bound}, {"point", o.point}, {"exit", code}};
  if (strategy) {
    j["covered_height"] = strategy->covered_height_bound();
    j["emissions"] = strategy->emissions().size();
  }
  out << j.dump() << '\n';
  return code;
}

int cmd_flow(const RunConfig& c, std::ostream& out) {
  auto [field, w] = load_field_and_weights(c);
  const auto d = static_cast<std::size_t>(field.degree());
  if (c.x.size() != d) throw ConfigError("x must have one entry per embedding");
  const auto samples = trajectory(field, w, c.x, c.t_grid);
  echo_config(c);
  {
    std::ofstream os(fs::path(c.out_dir) / "trajectory.csv");
    write_trajectory_csv(os, 2 * d, samples);
  }
  json j{{"command", "flow"}, {"samples", samples.size()}, {"exit", kOk}};
  if (!samples.empty()) {
    const auto [lo, hi] = std::minmax_element(samples.begin(), samples.end(),
                                              [](const SystoleSample& a, const SystoleSample& b) { return a.lambda1 < b.lambda1; });
    out << "lambda1 over the grid: min " << format_double(lo->lambda1) << " at t = " << format_double(lo->t) << ", max "
        << format_double(hi->lambda1) << " at t = " << format_double(hi->t) << '\n';
    j["min_lambda1"] = lo->lambda1;
    j["max_lambda1"] = hi->lambda1;
  } else {
    out << "empty t grid\n";
  }
  out << j.dump() << '\n';
  return kOk;
}

int cmd_replay(const std::string& path, std::ostream& out) {
  const GameTranscript t = replay(load_transcript(path));
  out << "transcript accepted: " << to_string(t.kind()) << " game, " << t.rounds() << " rounds\n";
  json j{{"command", "replay"}, {"rounds", t.rounds()}, {"exit", kOk}};
  out << j.dump() << '\n';
  return kOk;
}

}  // namespace

std::vector<double> parse_t_grid(const std::string& text) {
  if (text.find(':') == std::string::npos) return parse_double_list(text);
  std::vector<double> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(parse_double_list(item).at(0));
  if (parts.size() != 3 || !(parts[2] > 0)) throw ConfigError("t_grid must be start:stop:step with step > 0");
  std::vector<double> out;
  for (long i = 0;; ++i) {
    const double t = parts[0] + static_cast<double>(i) * parts[2];
    if (t > parts[1] + 1e-9 * parts[2]) break;
    out.push_back(t);
  }
  return out;
}

RunConfig load_run_config(const std::string& path, const std::optional<std::uint64_t>& seed_override) {
  RunConfig c;
  c.text = read_file(path);
  if (seed_override) {
    if (!c.text.empty() && c.text.back() != '\n') c.text += '\n';
    c.text += "seed = " + std::to_string(*seed_override) + "\n";
  }
  c.base_dir = fs::path(path).parent_path().string();
  std::istringstream in(c.text);
  const KeyValueFile kv = KeyValueFile::parse(in);
  static const std::vector<std::string> known = {
      "field", "weights", "game", "beta", "gamma", "rounds", "alice", "bob", "seed", "shrink", "pool_height",
      "transcript", "rho0", "center", "k_cut", "coord_bound", "precision_cap", "eps", "height_bound", "t_grid", "x", "out"};
  for (const auto& [k, v] : kv.entries())
    if (std::find(known.begin(), known.end(), k) == known.end()) throw ConfigError("unknown key '" + k + "'");

  if (auto v = kv.get("field")) c.field_path = resolve(c.base_dir, *v);
  c.weights = kv.get("weights");
  if (auto v = kv.get("game")) c.game = parse_game_kind(*v);
  c.beta = kv.get_double("beta", c.beta);
  if (c.game == GameKind::Absolute) c.gamma.reset();
  if (kv.get("gamma")) c.gamma = kv.get_double("gamma", 0);
  const long long rounds = kv.get_int("rounds", static_cast<long long>(c.rounds));
  if (rounds < 0) throw ConfigError("rounds must be nonnegative");
  c.rounds = static_cast<std::size_t>(rounds);
  if (auto v = kv.get("alice")) c.alice = parse_alice_kind(*v);
  if (auto v = kv.get("bob")) c.bob = parse_bob_kind(*v);
  c.seed = static_cast<std::uint64_t>(kv.get_int("seed", static_cast<long long>(c.seed)));
  c.shrink = kv.get_double("shrink", c.shrink);
  c.pool_height = kv.get_double("pool_height", c.pool_height);
  if (auto v = kv.get("transcript")) c.transcript = resolve(c.base_dir, *v);
  if (c.bob == BobKind::Scripted && c.transcript.empty()) throw ConfigError("scripted bob needs a transcript");
  c.rho0 = kv.get_double("rho0", c.rho0);
  c.center = parse_vector_key(kv, "center");
  if (kv.get("k_cut")) c.strategy.k_cut = static_cast<int>(kv.get_int("k_cut", 0));
  if (kv.get("coord_bound")) c.strategy.coord_bound = kv.get_int("coord_bound", 0);
  c.strategy.precision_cap = kv.get_double("precision_cap", c.strategy.precision_cap);
  if (kv.get("eps")) c.eps = kv.get_double("eps", 0);
  c.height_bound = kv.get_double("height_bound", c.height_bound);
  if (auto v = kv.get("t_grid")) c.t_grid = parse_t_grid(*v);
  c.x = parse_vector_key(kv, "x");
  if (auto v = kv.get("out")) c.out_dir = resolve(c.base_dir, *v);
  pin_path(c, "field", c.field_path, kv.get("field"));
  pin_path(c, "transcript", c.transcript, kv.get("transcript"));
  validate(c);
  return c;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Badly approximable vectors over totally real fields: games, strategies and flows"};
  app.require_subcommand(1);
  std::string config, out_dir, positional;
  std::optional<std::uint64_t> seed;
  double precision = 1e-12;
  auto add_common = [&](CLI::App* sub, bool takes_path) {
    if (takes_path) sub->add_option("path", positional, "input file");
    sub->add_option("--config", config, "run configuration file");
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--seed", seed, "seed override");
    sub->add_option("--precision", precision, "embedding enclosure width");
  };
  auto* field = app.add_subcommand("field", "print a field report");
  auto* enumerate = app.add_subcommand("enumerate", "list admissible denominators");
  auto* bad = app.add_subcommand("bad", "truncated membership and badness of a point");
  auto* play = app.add_subcommand("play", "run a refereed game");
  auto* flow = app.add_subcommand("flow", "systole trajectory of the diagonal flow");
  auto* rep = app.add_subcommand("replay", "re-validate a transcript");
  add_common(field, true);
  add_common(enumerate, false);
  add_common(bad, false);
  add_common(play, false);
  add_common(flow, false);
  add_common(rep, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInputError;
  }

  auto fail = [&](const std::string& name, const std::string& what, int code) {
    err << "error: " << what << '\n';
    json j{{"error", name}, {"message", what}, {"exit", code}};
    out << j.dump() << '\n';
    return code;
  };

  try {
    if (!(precision > 0)) throw ConfigError("--precision must be positive");
    if (field->parsed()) {
      std::string path = positional;
      if (path.empty() && !config.empty()) path = load_run_config(config, seed).field_path;
      if (path.empty()) throw ConfigError("field needs a path or a config with a field key");
      return cmd_field(path, precision, out);
    }
    if (rep->parsed()) {
      std::string path = positional;
      if (path.empty() && !config.empty()) path = load_run_config(config, seed).transcript;
      if (path.empty()) throw ConfigError("replay needs a transcript path");
      return cmd_replay(path, out);
    }
    if (config.empty()) throw ConfigError("--config is required");
    RunConfig c = load_run_config(config, seed);
    if (!out_dir.empty()) c.out_dir = out_dir;
    if (enumerate->parsed()) return cmd_enumerate(c, out);
    if (bad->parsed()) return cmd_bad(c, out);
    if (play->parsed()) return cmd_play(c, out);
    if (flow->parsed()) return cmd_flow(c, out);
  } catch (const UniquenessViolation& e) {
    return fail(e.name(), std::string("ratio-point uniqueness falsified: ") + e.what(), kUniquenessViolation);
  } catch (const ConditionTooHigh& e) {
    return fail(e.name(), e.what(), kConditionTooHigh);
  } catch (const Error& e) {
    return fail(e.name(), e.what(), kInputError);
  } catch (const std::exception& e) {
    return fail("Error", e.what(), kInputError);
  }
  return kInputError;
}

}  // namespace kbad::cli
