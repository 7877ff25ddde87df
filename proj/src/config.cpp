#include "bouss/config.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace bouss {

namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>> kKeys = {
    {"grid", {"kmax", "n2"}},
    {"scenario", {"kind", "eps", "seed", "sigma", "lambda", "initial"}},
    {"profile", {"kind", "alpha", "file"}},
    {"time", {"dt", "cfl_target", "t_final", "output_every", "checkpoint_every"}},
    {"output", {"dir"}},
    {"analysis", {"c1", "fit_t_lo", "fit_t_hi", "t_burn", "window"}},
};

template <class T>
T number(const pt::ptree& sec, const std::string& section, const std::string& key, T fallback) {
  const auto v = sec.get_optional<std::string>(key);
  if (!v) return fallback;
  std::istringstream is(*v);
  T out{};
  is >> out;
  if (is.fail() || !(is >> std::ws).eof())
    throw ConfigError("[" + section + "] " + key + ": cannot parse '" + *v + "'");
  return out;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

std::string resolve(const std::string& path, const std::string& base) {
  if (path.empty() || std::filesystem::path(path).is_absolute()) return path;
  return (std::filesystem::path(base) / path).lexically_normal().string();
}

}  // namespace

std::int64_t RunConfig::total_steps() const { return std::llround(t_final / dt); }

std::string to_string(Scenario s) {
  switch (s) {
    case Scenario::stable: return "stable";
    case Scenario::bubble: return "bubble";
    case Scenario::custom: return "custom";
  }
  return "?";
}

std::string to_string(ProfileKind p) { return p == ProfileKind::linear ? "linear" : "tabulated"; }

RunConfig parse_config(const std::string& text, const std::string& base_dir) {
  pt::ptree tree;
  std::istringstream is(text);
  try {
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config syntax: ") + e.what());
  }

  for (const auto& [section, body] : tree) {
    const auto known = kKeys.find(section);
    if (known == kKeys.end()) throw ConfigError("unknown section or top-level key '" + section + "'");
    for (const auto& kv : body)
      if (!known->second.count(kv.first)) throw ConfigError("unknown key '" + kv.first + "' in [" + section + "]");
  }

  auto sec = [&](const std::string& name) -> const pt::ptree& {
    static const pt::ptree empty;
    const auto it = tree.find(name);
    return it == tree.not_found() ? empty : it->second;
  };

  RunConfig c;
  const auto& grid = sec("grid");
  c.kmax = number(grid, "grid", "kmax", c.kmax);
  c.n2 = number(grid, "grid", "n2", c.n2);

  const auto& sc = sec("scenario");
  const std::string kind = sc.get("kind", std::string("stable"));
  if (kind == "stable") c.scenario = Scenario::stable;
  else if (kind == "bubble") c.scenario = Scenario::bubble;
  else if (kind == "custom") c.scenario = Scenario::custom;
  else throw ConfigError("[scenario] kind: expected stable, bubble or custom, got '" + kind + "'");
  c.eps = number(sc, "scenario", "eps", c.eps);
  c.seed = number(sc, "scenario", "seed", c.seed);
  c.bubble.sigma = number(sc, "scenario", "sigma", c.bubble.sigma);
  c.bubble.lambda = number(sc, "scenario", "lambda", c.bubble.lambda);
  c.initial_file = resolve(sc.get("initial", std::string()), base_dir);

  const auto& pr = sec("profile");
  const std::string pk = pr.get("kind", std::string("linear"));
  if (pk == "linear") c.profile = ProfileKind::linear;
  else if (pk == "tabulated") c.profile = ProfileKind::tabulated;
  else throw ConfigError("[profile] kind: expected linear or tabulated, got '" + pk + "'");
  c.alpha = number(pr, "profile", "alpha", c.alpha);
  c.profile_file = resolve(pr.get("file", std::string()), base_dir);

  const auto& tm = sec("time");
  c.dt = number(tm, "time", "dt", c.dt);
  c.cfl_target = number(tm, "time", "cfl_target", c.cfl_target);
  c.t_final = number(tm, "time", "t_final", c.t_final);
  c.output_every = number(tm, "time", "output_every", c.output_every);
  c.checkpoint_every = number(tm, "time", "checkpoint_every", c.checkpoint_every);

  c.out_dir = resolve(sec("output").get("dir", c.out_dir), base_dir);

  const auto& an = sec("analysis");
  if (an.get_optional<std::string>("c1")) c.c1 = number(an, "analysis", "c1", 0.0);
  c.fit_t_lo = number(an, "analysis", "fit_t_lo", c.fit_t_lo);
  c.fit_t_hi = number(an, "analysis", "fit_t_hi", c.fit_t_hi);
  c.t_burn = number(an, "analysis", "t_burn", c.t_burn);
  c.window = number(an, "analysis", "window", c.window);

  require(c.kmax >= 1, "[grid] kmax must be >= 1");
  require(c.n2 >= 9, "[grid] n2 must be >= 9");
  require(c.eps >= 0.0, "[scenario] eps must be >= 0");
  require(c.bubble.sigma > 0.0 && c.bubble.lambda > 0.0, "[scenario] sigma and lambda must be positive");
  require(c.dt > 0.0, "[time] dt must be positive");
  require(c.cfl_target > 0.0 && c.cfl_target <= 0.9, "[time] cfl_target must lie in (0, 0.9]");
  require(c.t_final > 0.0, "[time] t_final must be positive");
  require(c.output_every >= 1, "[time] output_every must be >= 1");
  require(c.checkpoint_every >= 0, "[time] checkpoint_every must be >= 0");
  require(std::abs(c.total_steps() * c.dt - c.t_final) <= 1e-9 * c.t_final, "[time] t_final must be a multiple of dt");
  require(!c.c1 || *c.c1 > 0.0, "[analysis] c1 must be positive");
  require(c.window > 0.0, "[analysis] window must be positive");
  if (c.profile == ProfileKind::linear && c.scenario != Scenario::custom)
    require(c.alpha > 0.0, "[profile] alpha must be positive for the stable and bubble scenarios");
  if (c.profile == ProfileKind::tabulated) require(!c.profile_file.empty(), "[profile] tabulated needs file");
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), std::filesystem::path(path).parent_path().string());
}

std::string config_to_ini(const RunConfig& c) {
  std::ostringstream os;
  os.precision(17);
  os << "[grid]\nkmax = " << c.kmax << "\nn2 = " << c.n2 << "\n\n";
  os << "[scenario]\nkind = " << to_string(c.scenario) << "\neps = " << c.eps << "\nseed = " << c.seed
     << "\nsigma = " << c.bubble.sigma << "\nlambda = " << c.bubble.lambda << "\n";
  if (!c.initial_file.empty()) os << "initial = " << c.initial_file << "\n";
  os << "\n[profile]\nkind = " << to_string(c.profile) << "\nalpha = " << c.alpha << "\n";
  if (!c.profile_file.empty()) os << "file = " << c.profile_file << "\n";
  os << "\n[time]\ndt = " << c.dt << "\ncfl_target = " << c.cfl_target << "\nt_final = " << c.t_final
     << "\noutput_every = " << c.output_every << "\ncheckpoint_every = " << c.checkpoint_every << "\n\n";
  os << "[output]\ndir = " << c.out_dir << "\n\n";
  os << "[analysis]\n";
  if (c.c1) os << "c1 = " << *c.c1 << "\n";
  os << "fit_t_lo = " << c.fit_t_lo << "\nfit_t_hi = " << c.fit_t_hi << "\nt_burn = " << c.t_burn
     << "\nwindow = " << c.window << "\n";
  return os.str();
}

}  // namespace bouss
