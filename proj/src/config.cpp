#include "robeq/config.hpp"

#include <filesystem>
#include <fstream>
#include <set>

namespace robeq {
namespace {

using nlohmann::json;

std::string join(const std::string& a, const std::string& b) { return a.empty() ? b : a + "." + b; }

[[noreturn]] void fail(const std::string& code, const std::string& key, const std::string& msg) {
  throw ConfigError(code, key, msg);
}

void check_keys(const json& j, const std::string& path, const std::set<std::string>& allowed) {
  if (!j.is_object()) fail("config.type", path, "expected an object");
  for (const auto& [k, v] : j.items()) {
    if (!allowed.count(k)) fail("config.unknown_key", join(path, k), "unknown key");
  }
}

double get_number(const json& j, const std::string& key) {
  if (!j.is_number()) fail("config.type", key, "expected a number");
  return j.get<double>();
}

long get_integer(const json& j, const std::string& key) {
  if (!j.is_number_integer()) fail("config.type", key, "expected an integer");
  return j.get<long>();
}

std::string get_string(const json& j, const std::string& key) {
  if (!j.is_string()) fail("config.type", key, "expected a string");
  return j.get<std::string>();
}

Eigen::VectorXd get_vector(const json& j, const std::string& key) {
  if (j.is_number()) return Eigen::VectorXd::Constant(1, j.get<double>());
  if (!j.is_array() || j.empty()) fail("config.type", key, "expected a nonempty array of numbers");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t k = 0; k < j.size(); ++k) {
    v[static_cast<Eigen::Index>(k)] = get_number(j[k], key + "[" + std::to_string(k) + "]");
  }
  return v;
}

Eigen::MatrixXd get_matrix(const json& j, const std::string& key) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) fail("config.type", key, "expected a matrix");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const Eigen::VectorXd row = get_vector(j[static_cast<std::size_t>(r)], key + "[" + std::to_string(r) + "]");
    if (row.size() != cols) fail("config.value", key, "ragged matrix");
    m.row(r) = row.transpose();
  }
  return m;
}

json vec_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

json mat_json(const Eigen::MatrixXd& m) {
  json a = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) a.push_back(vec_json(m.row(r).transpose()));
  return a;
}

PlayerDomain parse_player_domain(const json& j, const std::string& key) {
  if (!j.is_object() || !j.contains("kind")) fail("config.missing", join(key, "kind"), "missing domain kind");
  const std::string kind = get_string(j["kind"], join(key, "kind"));
  try {
    if (kind == "interval") {
      check_keys(j, key, {"kind", "lo", "hi"});
      return PlayerDomain::interval(get_number(j.value("lo", json(0.0)), join(key, "lo")),
                                    get_number(j.value("hi", json(1.0)), join(key, "hi")));
    }
    if (kind == "box") {
      check_keys(j, key, {"kind", "lo", "hi"});
      return PlayerDomain::box(get_vector(j.at("lo"), join(key, "lo")),
                               get_vector(j.at("hi"), join(key, "hi")));
    }
    if (kind == "simplex") {
      check_keys(j, key, {"kind", "dim"});
      return PlayerDomain::simplex(static_cast<int>(get_integer(j.at("dim"), join(key, "dim"))));
    }
    if (kind == "polytope") {
      check_keys(j, key, {"kind", "A", "b", "nonneg"});
      const Eigen::MatrixXd A = get_matrix(j.at("A"), join(key, "A"));
      std::vector<bool> nonneg(static_cast<std::size_t>(A.cols()), true);
      if (j.contains("nonneg")) nonneg = j["nonneg"].get<std::vector<bool>>();
      return PlayerDomain::polytope(A, get_vector(j.at("b"), join(key, "b")), nonneg);
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    fail("config.value", key, e.what());
  }
  fail("config.value", join(key, "kind"), "unknown domain kind '" + kind + "'");
}

ProductDomain parse_domain(const json& j) {
  if (!j.is_array() || j.empty()) fail("config.type", "domain", "expected a nonempty array of player domains");
  std::vector<PlayerDomain> players;
  for (std::size_t i = 0; i < j.size(); ++i) {
    players.push_back(parse_player_domain(j[i], "domain[" + std::to_string(i) + "]"));
  }
  return ProductDomain(std::move(players));
}

void parse_game(const json& j, const std::string& base_dir, ExperimentConfig& cfg) {
  check_keys(j, "game", {"catalog", "params", "bimatrix"});
  if (j.contains("catalog") == j.contains("bimatrix")) {
    fail("config.value", "game", "give exactly one of 'catalog' or 'bimatrix'");
  }
  if (j.contains("catalog")) {
    CatalogSpec c;
    c.id = get_string(j["catalog"], "game.catalog");
    const auto ids = catalog_ids();
    if (std::find(ids.begin(), ids.end(), c.id) == ids.end()) {
      fail("config.value", "game.catalog", "unknown catalog game '" + c.id + "'");
    }
    if (j.contains("params")) {
      if (!j["params"].is_object()) fail("config.type", "game.params", "expected an object");
      for (const auto& [k, v] : j["params"].items()) c.params[k] = get_number(v, "game.params." + k);
    }
    cfg.game = c;
    return;
  }
  if (j.contains("params")) fail("config.unknown_key", "game.params", "only catalog games take params");
  const json& b = j["bimatrix"];
  if (b.is_string()) {
    cfg.bimatrix_path = b.get<std::string>();
    std::filesystem::path p(cfg.bimatrix_path);
    if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
    try {
      cfg.game = load_bimatrix(p.string());
    } catch (const std::exception& e) {
      fail("config.io", "game.bimatrix", e.what());
    }
    return;
  }
  check_keys(b, "game.bimatrix", {"A1", "A2"});
  if (!b.contains("A1") || !b.contains("A2")) fail("config.missing", "game.bimatrix", "needs A1 and A2");
  cfg.game = BimatrixSpec{get_matrix(b["A1"], "game.bimatrix.A1"), get_matrix(b["A2"], "game.bimatrix.A2")};
}

void parse_oracle(const json& j, OracleConfig& o) {
  if (!j.is_object()) fail("config.type", "oracle", "expected an object");
  if (!j.contains("kind")) fail("config.missing", "oracle.kind", "missing oracle kind");
  o.kind = get_string(j["kind"], "oracle.kind");
  if (o.kind == "perfect") {
    check_keys(j, "oracle", {"kind"});
  } else if (o.kind == "sfo") {
    check_keys(j, "oracle", {"kind", "noise"});
    if (!j.contains("noise")) fail("config.missing", "oracle.noise", "sfo needs a noise model");
    const json& n = j["noise"];
    check_keys(n, "oracle.noise", {"gaussian", "rademacher", "covariance"});
    if (n.size() != 1) fail("config.value", "oracle.noise", "give exactly one noise model");
    if (n.contains("gaussian")) {
      o.noise = "gaussian";
      o.sigma = get_number(n["gaussian"], "oracle.noise.gaussian");
    } else if (n.contains("rademacher")) {
      o.noise = "rademacher";
      o.sigma = get_number(n["rademacher"], "oracle.noise.rademacher");
    } else {
      o.noise = "covariance";
      o.covariance = get_matrix(n["covariance"], "oracle.noise.covariance");
    }
    if (o.noise != "covariance" && !(o.sigma >= 0)) {
      fail("config.value", "oracle.noise." + o.noise, "sigma must be nonnegative");
    }
  } else if (o.kind == "spsa") {
    check_keys(j, "oracle", {"kind", "delta0", "rho", "pivots", "radii"});
    if (j.contains("delta0")) o.delta0 = get_number(j["delta0"], "oracle.delta0");
    if (j.contains("rho")) o.rho = get_number(j["rho"], "oracle.rho");
    if (!(o.delta0 > 0)) fail("config.value", "oracle.delta0", "must be positive");
    if (!(o.rho > 0 && o.rho < 0.5)) fail("config.value", "oracle.rho", "must lie in (0, 1/2)");
    if (j.contains("pivots")) {
      if (!j["pivots"].is_array()) fail("config.type", "oracle.pivots", "expected one array per player");
      std::vector<Eigen::VectorXd> ps;
      for (std::size_t i = 0; i < j["pivots"].size(); ++i) {
        ps.push_back(get_vector(j["pivots"][i], "oracle.pivots[" + std::to_string(i) + "]"));
      }
      o.pivots = ps;
    }
    if (j.contains("radii")) {
      const Eigen::VectorXd r = get_vector(j["radii"], "oracle.radii");
      o.radii = std::vector<double>(r.data(), r.data() + r.size());
    }
  } else {
    fail("config.value", "oracle.kind", "expected perfect, sfo or spsa, got '" + o.kind + "'");
  }
}

void parse_run(const json& j, RunConfig& r) {
  check_keys(j, "run", {"algorithm", "step", "horizon", "init", "seed", "thinning", "norm"});
  if (j.contains("algorithm")) {
    const std::string a = get_string(j["algorithm"], "run.algorithm");
    if (a == "ftrl") r.algorithm = Algorithm::FTRL;
    else if (a == "md") r.algorithm = Algorithm::MD;
    else fail("config.value", "run.algorithm", "expected ftrl or md, got '" + a + "'");
  }
  if (j.contains("step")) {
    const json& s = j["step"];
    check_keys(s, "run.step", {"constant", "power"});
    if (s.size() != 1) fail("config.value", "run.step", "give exactly one of constant or power");
    if (s.contains("constant")) {
      const double g = get_number(s["constant"], "run.step.constant");
      if (!(g > 0)) fail("config.value", "run.step.constant", "gamma must be positive");
      r.step = ConstantStep{g};
    } else {
      const json& p = s["power"];
      check_keys(p, "run.step.power", {"gamma0", "p"});
      PowerStep ps;
      if (p.contains("gamma0")) ps.gamma0 = get_number(p["gamma0"], "run.step.power.gamma0");
      if (p.contains("p")) ps.p = get_number(p["p"], "run.step.power.p");
      if (!(ps.gamma0 > 0)) fail("config.value", "run.step.power.gamma0", "must be positive");
      if (!(ps.p >= 0 && ps.p <= 1)) fail("config.value", "run.step.power.p", "must lie in [0, 1]");
      r.step = ps;
    }
  }
  if (j.contains("horizon")) {
    r.horizon = get_integer(j["horizon"], "run.horizon");
    if (r.horizon < 1) fail("config.value", "run.horizon", "must be >= 1");
  }
  if (j.contains("init")) {
    const json& i = j["init"];
    check_keys(i, "run.init", {"dual", "primal"});
    if (i.size() != 1) fail("config.value", "run.init", "give exactly one of dual or primal");
    if (i.contains("dual")) r.init = DualInit{get_vector(i["dual"], "run.init.dual")};
    else r.init = PrimalInit{get_vector(i["primal"], "run.init.primal")};
  } else {
    fail("config.missing", "run.init", "an initial dual or primal point is required");
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) fail("config.type", "run.seed", "expected a nonnegative integer");
    r.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("thinning")) {
    r.thinning = get_integer(j["thinning"], "run.thinning");
    if (r.thinning < 1) fail("config.value", "run.thinning", "must be >= 1");
  }
  if (j.contains("norm")) {
    const std::string n = get_string(j["norm"], "run.norm");
    if (n == "l1") r.norm = DistanceNorm::L1;
    else if (n == "l2") r.norm = DistanceNorm::L2;
    else if (n == "linf") r.norm = DistanceNorm::Linf;
    else fail("config.value", "run.norm", "expected l1, l2 or linf");
  }
}

void parse_analysis(const json& j, AnalysisConfig& a) {
  check_keys(j, "analysis", {"eps_conv", "window_frac", "runs", "min_fraction", "max_fraction",
                             "rate_model", "burn_in", "recurrence_level"});
  if (j.contains("eps_conv")) a.eps_conv = get_number(j["eps_conv"], "analysis.eps_conv");
  if (j.contains("window_frac")) a.window_frac = get_number(j["window_frac"], "analysis.window_frac");
  if (j.contains("runs")) a.runs = get_integer(j["runs"], "analysis.runs");
  if (j.contains("min_fraction")) a.min_fraction = get_number(j["min_fraction"], "analysis.min_fraction");
  if (j.contains("max_fraction")) a.max_fraction = get_number(j["max_fraction"], "analysis.max_fraction");
  if (j.contains("rate_model")) {
    try {
      a.rate_model = rate_model_from_string(get_string(j["rate_model"], "analysis.rate_model"));
    } catch (const std::invalid_argument&) {
      fail("config.value", "analysis.rate_model", "expected geometric_log or power_log");
    }
  }
  if (j.contains("burn_in")) a.burn_in = get_integer(j["burn_in"], "analysis.burn_in");
  if (j.contains("recurrence_level")) {
    a.recurrence_level = get_number(j["recurrence_level"], "analysis.recurrence_level");
  }
  if (!(a.eps_conv >= 0)) fail("config.value", "analysis.eps_conv", "must be nonnegative");
  if (!(a.window_frac > 0 && a.window_frac <= 1)) fail("config.value", "analysis.window_frac", "must lie in (0, 1]");
  if (a.runs < 1) fail("config.value", "analysis.runs", "must be >= 1");
  for (const auto& [key, v] : {std::pair{"analysis.min_fraction", a.min_fraction},
                               std::pair{"analysis.max_fraction", a.max_fraction}}) {
    if (v && !(*v >= 0 && *v <= 1)) fail("config.value", key, "must lie in [0, 1]");
  }
  if (a.burn_in && *a.burn_in < 0) fail("config.value", "analysis.burn_in", "must be >= 0");
}

}  // namespace

void apply_override(json& j, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    fail("config.value", assignment, "override must have the form key=value");
  }
  const std::string key = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);
  json value = json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;
  json* node = &j;
  std::size_t pos = 0;
  while (true) {
    const auto dot = key.find('.', pos);
    const std::string part = key.substr(pos, dot == std::string::npos ? std::string::npos : dot - pos);
    if (part.empty()) fail("config.value", key, "empty path component in override");
    if (!node->is_object()) {
      if (!node->is_null()) fail("config.type", key, "override path crosses a non-object");
      *node = json::object();
    }
    if (dot == std::string::npos) {
      (*node)[part] = value;
      return;
    }
    node = &(*node)[part];
    pos = dot + 1;
  }
}

ExperimentConfig parse_config(const json& j, const std::string& base_dir) {
  check_keys(j, "", {"game", "domain", "regularizer", "oracle", "run", "reference", "analysis",
                     "tolerances", "output"});
  ExperimentConfig cfg;
  if (!j.contains("game")) fail("config.missing", "game", "a game is required");
  parse_game(j["game"], base_dir, cfg);
  if (j.contains("domain")) {
    parse_domain(j["domain"]);
    cfg.domain = j["domain"];
  }
  if (j.contains("regularizer")) {
    const json& r = j["regularizer"];
    if (r.is_string()) {
      cfg.regularizer = {r.get<std::string>()};
    } else if (r.is_array() && !r.empty()) {
      for (std::size_t i = 0; i < r.size(); ++i) {
        cfg.regularizer.push_back(get_string(r[i], "regularizer[" + std::to_string(i) + "]"));
      }
    } else {
      fail("config.type", "regularizer", "expected a name or an array of names");
    }
    for (std::size_t i = 0; i < cfg.regularizer.size(); ++i) {
      try {
        PlayerRegularizer::named(cfg.regularizer[i]);
      } catch (const std::exception&) {
        fail("config.value", r.is_string() ? "regularizer" : "regularizer[" + std::to_string(i) + "]",
             "unknown regularizer '" + cfg.regularizer[i] + "'");
      }
    }
  } else {
    cfg.regularizer = {"entropic"};
  }
  if (j.contains("oracle")) parse_oracle(j["oracle"], cfg.oracle);
  if (!j.contains("run")) fail("config.missing", "run", "a run section is required");
  parse_run(j["run"], cfg.run);
  if (j.contains("reference") && !j["reference"].is_null()) {
    cfg.reference = get_vector(j["reference"], "reference");
  }
  if (j.contains("analysis")) parse_analysis(j["analysis"], cfg.analysis);
  if (j.contains("tolerances")) {
    const json& t = j["tolerances"];
    check_keys(t, "tolerances", {"stat", "robust", "membership"});
    if (t.contains("stat")) cfg.tolerances.stat_tol = get_number(t["stat"], "tolerances.stat");
    if (t.contains("robust")) cfg.tolerances.robust_tol = get_number(t["robust"], "tolerances.robust");
    if (t.contains("membership")) {
      cfg.tolerances.membership_tol = get_number(t["membership"], "tolerances.membership");
    }
    for (const auto& [key, v] : {std::pair{"tolerances.stat", cfg.tolerances.stat_tol},
                                 std::pair{"tolerances.robust", cfg.tolerances.robust_tol},
                                 std::pair{"tolerances.membership", cfg.tolerances.membership_tol}}) {
      if (!(v >= 0)) fail("config.value", key, "must be nonnegative");
    }
  }
  if (j.contains("output")) {
    const json& o = j["output"];
    check_keys(o, "output", {"dir", "formats"});
    if (o.contains("dir")) cfg.output.dir = get_string(o["dir"], "output.dir");
    if (o.contains("formats")) {
      cfg.output.formats.clear();
      if (!o["formats"].is_array()) fail("config.type", "output.formats", "expected an array");
      for (const auto& f : o["formats"]) {
        const std::string s = get_string(f, "output.formats");
        if (s != "csv" && s != "json") fail("config.value", "output.formats", "expected csv or json, got '" + s + "'");
        cfg.output.formats.push_back(s);
      }
    }
  }
  validate_config(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) fail("config.io", "", "cannot open config file '" + path + "'");
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) fail("config.parse", "", "'" + path + "' is not valid JSON");
  for (const auto& o : overrides) apply_override(j, o);
  const auto dir = std::filesystem::path(path).parent_path();
  return parse_config(j, dir.empty() ? "." : dir.string());
}

json to_json(const ExperimentConfig& cfg) {
  json j;
  if (const auto* c = std::get_if<CatalogSpec>(&cfg.game)) {
    j["game"] = {{"catalog", c->id}};
    if (!c->params.empty()) j["game"]["params"] = c->params;
  } else if (!cfg.bimatrix_path.empty()) {
    j["game"] = {{"bimatrix", cfg.bimatrix_path}};
  } else {
    const auto& b = std::get<BimatrixSpec>(cfg.game);
    j["game"] = {{"bimatrix", {{"A1", mat_json(b.A1)}, {"A2", mat_json(b.A2)}}}};
  }
  if (cfg.domain) j["domain"] = *cfg.domain;
  if (cfg.regularizer.size() == 1) j["regularizer"] = cfg.regularizer[0];
  else j["regularizer"] = cfg.regularizer;

  const auto& o = cfg.oracle;
  json oj{{"kind", o.kind}};
  if (o.kind == "sfo") {
    if (o.noise == "covariance") oj["noise"] = {{"covariance", mat_json(o.covariance)}};
    else oj["noise"] = {{o.noise, o.sigma}};
  } else if (o.kind == "spsa") {
    oj["delta0"] = o.delta0;
    oj["rho"] = o.rho;
    if (o.pivots) {
      json ps = json::array();
      for (const auto& p : *o.pivots) ps.push_back(vec_json(p));
      oj["pivots"] = ps;
    }
    if (o.radii) oj["radii"] = *o.radii;
  }
  j["oracle"] = oj;

  const auto& r = cfg.run;
  json rj;
  rj["algorithm"] = r.algorithm == Algorithm::FTRL ? "ftrl" : "md";
  if (const auto* c = std::get_if<ConstantStep>(&r.step)) rj["step"] = {{"constant", c->gamma}};
  else {
    const auto& p = std::get<PowerStep>(r.step);
    rj["step"] = {{"power", {{"gamma0", p.gamma0}, {"p", p.p}}}};
  }
  rj["horizon"] = r.horizon;
  if (const auto* d = std::get_if<DualInit>(&r.init)) rj["init"] = {{"dual", vec_json(d->y)}};
  else rj["init"] = {{"primal", vec_json(std::get<PrimalInit>(r.init).x)}};
  rj["seed"] = r.seed;
  rj["thinning"] = r.thinning;
  rj["norm"] = r.norm == DistanceNorm::L1 ? "l1" : r.norm == DistanceNorm::L2 ? "l2" : "linf";
  j["run"] = rj;

  if (cfg.reference) j["reference"] = vec_json(*cfg.reference);
  const auto& a = cfg.analysis;
  json aj{{"eps_conv", a.eps_conv}, {"window_frac", a.window_frac}, {"runs", a.runs},
          {"rate_model", to_string(a.rate_model)}};
  if (a.min_fraction) aj["min_fraction"] = *a.min_fraction;
  if (a.max_fraction) aj["max_fraction"] = *a.max_fraction;
  if (a.burn_in) aj["burn_in"] = *a.burn_in;
  if (a.recurrence_level) aj["recurrence_level"] = *a.recurrence_level;
  j["analysis"] = aj;
  j["tolerances"] = {{"stat", cfg.tolerances.stat_tol},
                     {"robust", cfg.tolerances.robust_tol},
                     {"membership", cfg.tolerances.membership_tol}};
  j["output"] = {{"dir", cfg.output.dir}, {"formats", cfg.output.formats}};
  return j;
}

Game build_game(const ExperimentConfig& cfg) {
  try {
    return make_game(cfg.game);
  } catch (const std::exception& e) {
    fail("config.value", "game", e.what());
  }
}

RegularizerSpec build_regularizer(const ExperimentConfig& cfg, const ProductDomain& domain) {
  const int n = domain.num_players();
  RegularizerSpec reg;
  if (cfg.regularizer.size() == 1) {
    reg = RegularizerSpec::uniform(PlayerRegularizer::named(cfg.regularizer[0]), n);
  } else if (static_cast<int>(cfg.regularizer.size()) == n) {
    std::vector<PlayerRegularizer> rs;
    for (const auto& name : cfg.regularizer) rs.push_back(PlayerRegularizer::named(name));
    reg = RegularizerSpec(rs);
  } else {
    fail("config.value", "regularizer", "expected one name or one per player (" + std::to_string(n) + ")");
  }
  try {
    validate_pairs(reg, domain);
  } catch (const std::exception& e) {
    fail("config.value", "regularizer", e.what());
  }
  return reg;
}

OracleSpec build_oracle(const ExperimentConfig& cfg, const ProductDomain& domain) {
  const auto& o = cfg.oracle;
  try {
    if (o.kind == "perfect") return PerfectOracle{};
    if (o.kind == "sfo") {
      if (o.noise == "gaussian") return SfoOracle::gaussian(o.sigma);
      if (o.noise == "rademacher") return SfoOracle::rademacher(o.sigma);
      if (o.covariance.rows() != domain.total_dim() || o.covariance.cols() != domain.total_dim()) {
        fail("config.value", "oracle.noise.covariance", "dimension does not match the action space");
      }
      return SfoOracle::gaussian_covariance(o.covariance);
    }
    if (o.pivots && static_cast<int>(o.pivots->size()) != domain.num_players()) {
      fail("config.value", "oracle.pivots", "one pivot per player required");
    }
    if (o.radii && static_cast<int>(o.radii->size()) != domain.num_players()) {
      fail("config.value", "oracle.radii", "one radius per player required");
    }
    return make_spsa(domain, o.delta0, o.rho, o.pivots, o.radii);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    fail("config.value", "oracle", e.what());
  }
}

void validate_config(const ExperimentConfig& cfg) {
  const Game g = build_game(cfg);
  const auto& dom = g.domain();
  if (cfg.domain && !(parse_domain(*cfg.domain) == dom)) {
    fail("config.value", "domain", "declared domain differs from the game's action space");
  }
  build_regularizer(cfg, dom);
  build_oracle(cfg, dom);
  if (cfg.reference) {
    if (cfg.reference->size() != dom.total_dim()) {
      fail("config.value", "reference", "expected " + std::to_string(dom.total_dim()) + " coordinates");
    }
    if (!dom.contains(*cfg.reference, cfg.tolerances.membership_tol)) {
      fail("config.value", "reference", "point lies outside the action space");
    }
  }
  if (const auto* d = std::get_if<DualInit>(&cfg.run.init)) {
    if (d->y.size() != dom.total_dim()) {
      fail("config.value", "run.init.dual", "expected " + std::to_string(dom.total_dim()) + " coordinates");
    }
    if (cfg.run.algorithm == Algorithm::MD) {
      fail("config.value", "run.init", "mirror descent needs a primal initial point");
    }
  } else {
    const auto& x = std::get<PrimalInit>(cfg.run.init).x;
    if (x.size() != dom.total_dim() || !dom.contains(x, cfg.tolerances.membership_tol)) {
      fail("config.value", "run.init.primal", "point must lie in the action space");
    }
  }
  if (cfg.analysis.recurrence_level && dom.total_dim() != 1) {
    fail("config.value", "analysis.recurrence_level", "recurrence statistics need a scalar dual state");
  }
}

Experiment build_experiment(const ExperimentConfig& cfg) {
  const Game g = build_game(cfg);
  if (!cfg.reference) fail("config.missing", "reference", "a reference point is required");
  Experiment e{g,
               build_regularizer(cfg, g.domain()),
               build_oracle(cfg, g.domain()),
               cfg.run,
               ConvergenceCriterion{*cfg.reference, cfg.analysis.eps_conv, cfg.analysis.window_frac},
               cfg.analysis.recurrence_level};
  e.run.reference = *cfg.reference;
  return e;
}

}  // namespace robeq
