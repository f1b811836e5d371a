#include "hadp/config.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#ifndef HADP_VERSION
#define HADP_VERSION "0.0.0"
#endif

namespace hadp {

using nlohmann::json;

namespace {

[[noreturn]] void schema_error(const std::string& path, const std::string& what) {
  throw ConfigError("config: '" + path + "' " + what);
}

void check_keys(const json& obj, const std::string& path,
                const std::set<std::string>& allowed) {
  if (!obj.is_object()) schema_error(path.empty() ? "<root>" : path, "must be an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key())) {
      throw ConfigError("config: unknown key '" + (path.empty() ? "" : path + ".") +
                        it.key() + "'");
    }
  }
}

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

double as_number(const json& v, const std::string& path) {
  if (!v.is_number()) schema_error(path, "must be a number");
  return v.get<double>();
}

std::uint64_t as_seed(const json& v, const std::string& path) {
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
    schema_error(path, "must be a non-negative integer");
  return v.get<std::uint64_t>();
}

int as_int(const json& v, const std::string& path) {
  if (!v.is_number_integer()) schema_error(path, "must be an integer");
  return v.get<int>();
}

bool as_bool(const json& v, const std::string& path) {
  if (!v.is_boolean()) schema_error(path, "must be a boolean");
  return v.get<bool>();
}

std::string as_string(const json& v, const std::string& path) {
  if (!v.is_string()) schema_error(path, "must be a string");
  return v.get<std::string>();
}

Vector as_vector(const json& v, const std::string& path) {
  if (!v.is_array()) schema_error(path, "must be an array of numbers");
  Vector out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t k = 0; k < v.size(); ++k)
    out(static_cast<Eigen::Index>(k)) = as_number(v[k], path + "[" + std::to_string(k) + "]");
  return out;
}

std::vector<double> as_doubles(const json& v, const std::string& path) {
  const Vector x = as_vector(v, path);
  return {x.data(), x.data() + x.size()};
}

/// Row-major nested arrays; a bare number is a 1x1 matrix.
Matrix as_matrix(const json& v, const std::string& path) {
  if (v.is_number()) return Matrix::Constant(1, 1, v.get<double>());
  if (!v.is_array() || v.empty() || !v[0].is_array())
    schema_error(path, "must be a matrix (array of row arrays)");
  const std::size_t rows = v.size();
  const std::size_t cols = v[0].size();
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    const std::string rp = path + "[" + std::to_string(r) + "]";
    if (!v[r].is_array() || v[r].size() != cols) schema_error(rp, "rows must have equal length");
    for (std::size_t c = 0; c < cols; ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          as_number(v[r][c], rp + "[" + std::to_string(c) + "]");
  }
  return m;
}

json matrix_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

json vector_json(const Vector& v) {
  json a = json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) a.push_back(v(k));
  return a;
}

std::vector<Monomial> as_terms(const json& v, const std::string& path) {
  if (v.is_string()) return builtin_basis_terms(v.get<std::string>());
  if (!v.is_array()) schema_error(path, "must be a basis name or a list of exponent lists");
  std::vector<Monomial> terms;
  for (std::size_t k = 0; k < v.size(); ++k) {
    const std::string tp = path + "[" + std::to_string(k) + "]";
    if (!v[k].is_array()) schema_error(tp, "must be an exponent list");
    Monomial m;
    for (std::size_t e = 0; e < v[k].size(); ++e) {
      const int p = as_int(v[k][e], tp + "[" + std::to_string(e) + "]");
      if (p < 0) schema_error(tp, "exponents must be >= 0");
      m.push_back(p);
    }
    terms.push_back(std::move(m));
  }
  return terms;
}

json terms_json(const PolyBasis& b) {
  json a = json::array();
  for (const Monomial& m : b.terms()) a.push_back(m);
  return a;
}

template <typename Enum>
Enum as_enum(const json& v, const std::string& path,
             const std::vector<std::pair<std::string, Enum>>& names) {
  const std::string s = as_string(v, path);
  std::string known;
  for (const auto& [name, value] : names) {
    if (name == s) return value;
    known += (known.empty() ? "" : ", ") + name;
  }
  schema_error(path, "must be one of: " + known);
}

template <typename Enum>
std::string enum_name(Enum e, const std::vector<std::pair<std::string, Enum>>& names) {
  for (const auto& [name, value] : names)
    if (value == e) return name;
  return "?";
}

const std::vector<std::pair<std::string, ProbingCutoff>> kCutoffs = {
    {"on-until-converged", ProbingCutoff::kOnUntilConverged},
    {"always", ProbingCutoff::kAlways},
    {"off", ProbingCutoff::kOff}};
const std::vector<std::pair<std::string, DisturbanceConfig::Kind>> kDisturbances = {
    {"uniform", DisturbanceConfig::Kind::kUniform}, {"none", DisturbanceConfig::Kind::kNone}};
const std::vector<std::pair<std::string, InitWeights::Kind>> kInits = {
    {"uniform", InitWeights::Kind::kUniform}, {"explicit", InitWeights::Kind::kExplicit}};
const std::vector<std::pair<std::string, WnuMode>> kWnuModes = {
    {"analytic", WnuMode::kAnalytic}, {"numeric", WnuMode::kNumeric}};
const std::vector<std::pair<std::string, ActorSum>> kActorSums = {
    {"all-players", ActorSum::kAllPlayers}, {"followers-only", ActorSum::kFollowersOnly}};
const std::vector<std::pair<std::string, LeaderApply>> kApply = {
    {"neural-network", LeaderApply::kNeuralNetwork}, {"fixed-point", LeaderApply::kFixedPoint}};

void read_game(const json& j, GameSpec& spec) {
  const std::string p = "game";
  check_keys(j, p, {"gamma2", "R", "S", "vartheta", "vartheta_radius"});
  if (j.contains("gamma2")) spec.gamma2 = as_number(j["gamma2"], join(p, "gamma2"));
  if (j.contains("R")) {
    const json& r = j["R"];
    if (!r.is_array()) schema_error("game.R", "must be an array of rows of matrices");
    spec.R.clear();
    for (std::size_t i = 0; i < r.size(); ++i) {
      const std::string rp = "game.R[" + std::to_string(i) + "]";
      if (!r[i].is_array()) schema_error(rp, "must be an array of matrices");
      std::vector<Matrix> row;
      for (std::size_t k = 0; k < r[i].size(); ++k)
        row.push_back(as_matrix(r[i][k], rp + "[" + std::to_string(k) + "]"));
      spec.R.push_back(std::move(row));
    }
  }
  if (j.contains("S")) {
    const json& s = j["S"];
    if (!s.is_array()) schema_error("game.S", "must be an array of matrices");
    spec.S.clear();
    for (std::size_t i = 0; i < s.size(); ++i)
      spec.S.push_back(as_matrix(s[i], "game.S[" + std::to_string(i) + "]"));
  }
  if (j.contains("vartheta")) spec.vartheta = as_doubles(j["vartheta"], "game.vartheta");
  if (j.contains("vartheta_radius"))
    spec.vartheta_radius = as_number(j["vartheta_radius"], "game.vartheta_radius");
}

void read_bases(const json& j, Game& game) {
  check_keys(j, "bases", {"value", "leader"});
  if (j.contains("value")) {
    const json& v = j["value"];
    if (!v.is_array()) schema_error("bases.value", "must list one basis per player");
    game.value_bases.clear();
    for (std::size_t i = 0; i < v.size(); ++i) {
      const std::string bp = "bases.value[" + std::to_string(i) + "]";
      game.value_bases.emplace_back(game.spec.n, game.spec.alpha, as_terms(v[i], bp));
    }
  }
  if (j.contains("leader"))
    game.leader_basis = PolyBasis(game.spec.n, 0, as_terms(j["leader"], "bases.leader"));
}

void read_tuning(const json& j, TuningParams& t) {
  check_keys(j, "tuning", {"tau", "theta", "varrho", "F1", "F2"});
  if (j.contains("tau")) t.tau = as_doubles(j["tau"], "tuning.tau");
  if (j.contains("theta")) t.theta = as_doubles(j["theta"], "tuning.theta");
  if (j.contains("varrho")) t.varrho = as_number(j["varrho"], "tuning.varrho");
  if (j.contains("F2")) t.F2 = as_doubles(j["F2"], "tuning.F2");
  if (j.contains("F1")) {
    const json& f = j["F1"];
    if (!f.is_array()) schema_error("tuning.F1", "must list one vector per player");
    t.F1.clear();
    for (std::size_t i = 0; i < f.size(); ++i)
      t.F1.push_back(as_vector(f[i], "tuning.F1[" + std::to_string(i) + "]"));
  }
}

LearnerState read_explicit_weights(const json& j, const std::string& p) {
  LearnerState s;
  for (const char* key : {"Wv", "Wa"}) {
    if (!j.contains(key)) schema_error(join(p, key), "is required for explicit weights");
    const json& a = j[key];
    if (!a.is_array()) schema_error(join(p, key), "must list one vector per player");
    auto& dst = std::string(key) == "Wv" ? s.Wv : s.Wa;
    for (std::size_t i = 0; i < a.size(); ++i)
      dst.push_back(as_vector(a[i], join(p, key) + "[" + std::to_string(i) + "]"));
  }
  if (!j.contains("Wnu")) schema_error(join(p, "Wnu"), "is required for explicit weights");
  s.Wnu = as_matrix(j["Wnu"], join(p, "Wnu"));
  return s;
}

void read_sim(const json& j, SimConfig& c) {
  const std::string p = "sim";
  check_keys(j, p, {"dt", "t_end", "x0", "init", "probing", "disturbance", "convergence",
                    "record_every", "progress_every", "learning"});
  if (j.contains("dt")) c.dt = as_number(j["dt"], "sim.dt");
  if (j.contains("t_end")) c.t_end = as_number(j["t_end"], "sim.t_end");
  if (j.contains("x0")) c.x0 = as_vector(j["x0"], "sim.x0");
  if (j.contains("record_every")) c.record_every = as_int(j["record_every"], "sim.record_every");
  if (j.contains("progress_every"))
    c.progress_every = as_number(j["progress_every"], "sim.progress_every");
  if (j.contains("learning")) c.learning = as_bool(j["learning"], "sim.learning");
  if (j.contains("init")) {
    const json& i = j["init"];
    check_keys(i, "sim.init", {"kind", "low", "high", "seed", "Wv", "Wa", "Wnu"});
    if (i.contains("kind")) c.init.kind = as_enum(i["kind"], "sim.init.kind", kInits);
    if (i.contains("low")) c.init.low = as_number(i["low"], "sim.init.low");
    if (i.contains("high")) c.init.high = as_number(i["high"], "sim.init.high");
    if (i.contains("seed")) c.init.seed = as_seed(i["seed"], "sim.init.seed");
    if (c.init.kind == InitWeights::Kind::kExplicit) {
      c.init.values = read_explicit_weights(i, "sim.init");
    } else if (i.contains("Wv") || i.contains("Wa") || i.contains("Wnu")) {
      schema_error("sim.init", "weight values require kind \"explicit\"");
    }
  }
  if (j.contains("probing")) {
    const json& q = j["probing"];
    check_keys(q, "sim.probing", {"amplitude", "seed", "cutoff"});
    if (q.contains("amplitude")) c.probing.amplitude = as_number(q["amplitude"], "sim.probing.amplitude");
    if (q.contains("seed")) c.probing.seed = as_seed(q["seed"], "sim.probing.seed");
    if (q.contains("cutoff")) c.probing.cutoff = as_enum(q["cutoff"], "sim.probing.cutoff", kCutoffs);
  }
  if (j.contains("disturbance")) {
    const json& d = j["disturbance"];
    check_keys(d, "sim.disturbance", {"kind", "bound", "seed"});
    if (d.contains("kind"))
      c.disturbance.kind = as_enum(d["kind"], "sim.disturbance.kind", kDisturbances);
    if (d.contains("bound")) c.disturbance.bound = as_number(d["bound"], "sim.disturbance.bound");
    if (d.contains("seed")) c.disturbance.seed = as_seed(d["seed"], "sim.disturbance.seed");
  }
  if (j.contains("convergence")) {
    const json& v = j["convergence"];
    check_keys(v, "sim.convergence", {"window", "threshold", "settle", "stop_after_settle"});
    if (v.contains("window")) c.convergence.window = as_number(v["window"], "sim.convergence.window");
    if (v.contains("threshold"))
      c.convergence.threshold = as_number(v["threshold"], "sim.convergence.threshold");
    if (v.contains("settle")) c.convergence.settle = as_number(v["settle"], "sim.convergence.settle");
    if (v.contains("stop_after_settle"))
      c.convergence.stop_after_settle =
          as_bool(v["stop_after_settle"], "sim.convergence.stop_after_settle");
  }
}

void read_leader(const json& j, LeaderConfig& l) {
  check_keys(j, "leader", {"fp_tol", "fp_max_iter", "wnu_mode", "actor_sum", "apply"});
  if (j.contains("fp_tol")) l.fp_tol = as_number(j["fp_tol"], "leader.fp_tol");
  if (j.contains("fp_max_iter")) l.fp_max_iter = as_int(j["fp_max_iter"], "leader.fp_max_iter");
  if (j.contains("wnu_mode")) l.wnu_mode = as_enum(j["wnu_mode"], "leader.wnu_mode", kWnuModes);
  if (j.contains("actor_sum")) l.actor_sum = as_enum(j["actor_sum"], "leader.actor_sum", kActorSums);
  if (j.contains("apply")) l.apply = as_enum(j["apply"], "leader.apply", kApply);
}

RunConfig from_json(const json& root) {
  if (root.is_null()) throw ConfigError("config: empty document");
  check_keys(root, "", {"model", "game", "bases", "tuning", "sim", "leader", "region", "diag"});
  if (!root.contains("model")) schema_error("model", "is required (a built-in model name)");
  RunConfig c;
  c.model = as_string(root["model"], "model");
  ModelDefaults d = builtin_model(c.model);
  c.game = std::move(d.game);
  c.tuning = std::move(d.tuning);
  c.sim = std::move(d.sim);

  if (root.contains("game")) read_game(root["game"], c.game.spec);
  if (root.contains("region")) {
    const json& r = root["region"];
    check_keys(r, "region", {"low", "high"});
    if (r.contains("low")) c.game.region.low = as_vector(r["low"], "region.low");
    if (r.contains("high")) c.game.region.high = as_vector(r["high"], "region.high");
  }
  if (root.contains("bases")) read_bases(root["bases"], c.game);
  if (root.contains("tuning")) read_tuning(root["tuning"], c.tuning);
  if (root.contains("sim")) read_sim(root["sim"], c.sim);
  if (root.contains("leader")) read_leader(root["leader"], c.sim.leader);
  if (root.contains("diag")) {
    const json& d = root["diag"];
    check_keys(d, "diag", {"samples", "seed"});
    if (d.contains("samples")) c.diag.samples = as_int(d["samples"], "diag.samples");
    if (d.contains("seed")) c.diag.seed = as_seed(d["seed"], "diag.seed");
  }
  require(c.diag.samples >= 1, "diag.samples must be >= 1");

  validate_game(c.game);
  c.tuning.validate(c.game);
  c.sim.validate(c.game);
  return c;
}

json to_json(const RunConfig& c) {
  const GameSpec& s = c.game.spec;
  json game;
  game["gamma2"] = s.gamma2;
  json R = json::array();
  for (const auto& row : s.R) {
    json r = json::array();
    for (const Matrix& m : row) r.push_back(matrix_json(m));
    R.push_back(r);
  }
  game["R"] = R;
  json S = json::array();
  for (const Matrix& m : s.S) S.push_back(matrix_json(m));
  game["S"] = S;
  game["vartheta"] = s.vartheta;
  game["vartheta_radius"] = s.vartheta_radius;

  json bases;
  bases["value"] = json::array();
  for (const PolyBasis& b : c.game.value_bases) bases["value"].push_back(terms_json(b));
  bases["leader"] = terms_json(c.game.leader_basis);

  json tuning;
  tuning["tau"] = c.tuning.tau;
  tuning["theta"] = c.tuning.theta;
  tuning["varrho"] = c.tuning.varrho;
  tuning["F2"] = c.tuning.F2;
  tuning["F1"] = json::array();
  for (const Vector& f : c.tuning.F1) tuning["F1"].push_back(vector_json(f));

  const SimConfig& sc = c.sim;
  json sim;
  sim["dt"] = sc.dt;
  sim["t_end"] = sc.t_end;
  sim["x0"] = vector_json(sc.x0);
  sim["record_every"] = sc.record_every;
  sim["progress_every"] = sc.progress_every;
  sim["learning"] = sc.learning;
  json init;
  init["kind"] = enum_name(sc.init.kind, kInits);
  if (sc.init.kind == InitWeights::Kind::kUniform) {
    init["low"] = sc.init.low;
    init["high"] = sc.init.high;
    init["seed"] = sc.init.seed;
  } else {
    const LearnerState& w = *sc.init.values;
    init["Wv"] = json::array();
    init["Wa"] = json::array();
    for (const Vector& v : w.Wv) init["Wv"].push_back(vector_json(v));
    for (const Vector& v : w.Wa) init["Wa"].push_back(vector_json(v));
    init["Wnu"] = matrix_json(w.Wnu);
  }
  sim["init"] = init;
  sim["probing"] = {{"amplitude", sc.probing.amplitude},
                    {"seed", sc.probing.seed},
                    {"cutoff", enum_name(sc.probing.cutoff, kCutoffs)}};
  sim["disturbance"] = {{"kind", enum_name(sc.disturbance.kind, kDisturbances)},
                        {"bound", sc.disturbance.bound},
                        {"seed", sc.disturbance.seed}};
  sim["convergence"] = {{"window", sc.convergence.window},
                        {"threshold", sc.convergence.threshold},
                        {"settle", sc.convergence.settle},
                        {"stop_after_settle", sc.convergence.stop_after_settle}};

  json leader = {{"fp_tol", sc.leader.fp_tol},
                 {"fp_max_iter", sc.leader.fp_max_iter},
                 {"wnu_mode", enum_name(sc.leader.wnu_mode, kWnuModes)},
                 {"actor_sum", enum_name(sc.leader.actor_sum, kActorSums)},
                 {"apply", enum_name(sc.leader.apply, kApply)}};

  json root;
  root["model"] = c.model;
  root["game"] = game;
  root["bases"] = bases;
  root["tuning"] = tuning;
  root["sim"] = sim;
  root["leader"] = leader;
  root["region"] = {{"low", vector_json(c.game.region.low)},
                    {"high", vector_json(c.game.region.high)}};
  root["diag"] = {{"samples", c.diag.samples}, {"seed", c.diag.seed}};
  return root;
}

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: not valid JSON (") + e.what() + ")");
  }
  if (root.is_object() && root.contains("config") && root.contains("config_hash")) {
    return from_json(root["config"]);
  }
  return from_json(root);
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string resolved_json(const RunConfig& config) { return to_json(config).dump(2); }

std::string config_hash(const RunConfig& config) {
  const std::string text = to_json(config).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char out[17];
  std::snprintf(out, sizeof out, "%016" PRIx64, h);
  return out;
}

void apply_seed(RunConfig& config, std::uint64_t seed) {
  config.sim.init.seed = splitmix64(seed * 3 + 0);
  config.sim.probing.seed = splitmix64(seed * 3 + 1);
  config.sim.disturbance.seed = splitmix64(seed * 3 + 2);
}

std::string manifest_json(const RunConfig& config, const ManifestInfo& info) {
  json m;
  m["config"] = to_json(config);
  m["config_hash"] = config_hash(config);
  m["seeds"] = {{"init", config.sim.init.seed},
                {"probing", config.sim.probing.seed},
                {"disturbance", config.sim.disturbance.seed}};
  m["version"] = info.version.empty() ? library_version() : info.version;
  m["runtime_seconds"] = info.runtime_seconds;
  m["status"] = info.status;
  m["detector_time"] = info.detector_time ? json(*info.detector_time) : json(nullptr);
  m["fp_failures"] = info.fp_failures;
  return m.dump(2);
}

std::string library_version() { return HADP_VERSION; }

}  // namespace hadp
