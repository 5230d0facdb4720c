#include <charconv>
#include <functional>
#include <fstream>
#include <map>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "sem/error.hpp"
#include "sem/pipeline.hpp"
#include "sem/text.hpp"

namespace sem {

namespace {

namespace pt = boost::property_tree;

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> list(const std::string& v) {
  std::vector<std::string> out;
  for (auto part : text::split(v, ',')) {
    auto t = trim(part);
    if (!t.empty()) out.push_back(std::move(t));
  }
  return out;
}

bool parse_bool(const std::string& v, std::string_view what) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw Error(ErrorKind::parse, "invalid boolean '" + v + "' for " + std::string(what));
}

std::uint64_t parse_u64(const std::string& v, std::string_view what) {
  std::uint64_t out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size() || v.empty())
    throw Error(ErrorKind::parse, "invalid unsigned integer '" + v + "' for " + std::string(what));
  return out;
}

std::string join(const auto& items, auto&& fmt) {
  std::string s;
  for (const auto& x : items) {
    if (!s.empty()) s += ", ";
    s += fmt(x);
  }
  return s;
}

}  // namespace

void RunConfig::validate() const {
  params.validate();
  auto fail = [](const std::string& m) { throw Error(ErrorKind::validation, "config: " + m); };
  if (!synthetic && inputs.empty()) fail("[paths] input is required unless [data] synthetic = true");
  if (first_cohort >= last_cohort) fail("need m ≥ 2 training cohorts (first_cohort < last_cohort)");
  if (last_cohort + params.terminal_age > last_data_year)
    fail("training cohorts must be fully observed: last_cohort + w > last_data_year");
  if (order < 2 || basis_size < order) fail("need basis_size >= order >= 2");
  if (!(theta > 0.0 && theta <= 1.0)) fail("theta must lie in (0, 1]");
  if (deltas.empty()) fail("at least one delta is required");
  for (double d : deltas)
    if (!(d > 0.0 && d < 1.0)) fail("deltas must lie in (0, 1)");
  for (int t : targets)
    if (t <= last_cohort) fail("target cohort " + std::to_string(t) + " is not after last_cohort");
  if (targets.empty()) fail("at least one target cohort is required");
  if (eval_age < params.cond_age || eval_age >= params.terminal_age) fail("eval_age must lie in [S, w)");
  if (kinds.empty()) fail("at least one kind is required");
  if (search.max_p < 0 || search.max_d < 0 || search.max_q < 0) fail("ARIMA bounds must be nonnegative");
  if (verify_paths < 1) fail("verify n_paths must be positive");
  if (verify_fault != "none" && verify_fault != "ig_sign") fail("verify fault must be none or ig_sign");
}

RunConfig parse_config(std::istream& in, const std::filesystem::path& base_dir) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw Error(ErrorKind::parse, std::string("config: ") + e.what());
  }

  RunConfig cfg;
  using Setter = std::function<void(const std::string&)>;
  auto dbl = [](double& dst, const char* what) -> Setter {
    return [&dst, what](const std::string& v) { dst = text::parse_double(v, what); };
  };
  auto integer = [](int& dst, const char* what) -> Setter {
    return [&dst, what](const std::string& v) { dst = text::parse_int(v, what); };
  };
  auto resolve = [&](const std::string& v) {
    std::filesystem::path p(v);
    return p.is_absolute() ? p : base_dir / p;
  };

  std::map<std::string, std::map<std::string, Setter>> keys;
  keys["paths"]["input"] = [&](const std::string& v) {
    cfg.inputs.clear();
    for (const auto& f : list(v)) cfg.inputs.push_back(resolve(f));
  };
  keys["paths"]["output"] = [&](const std::string& v) { cfg.output_dir = resolve(v); };
  keys["data"]["synthetic"] = [&](const std::string& v) { cfg.synthetic = parse_bool(v, "synthetic"); };
  keys["data"]["first_cohort"] = integer(cfg.first_cohort, "first_cohort");
  keys["data"]["last_cohort"] = integer(cfg.last_cohort, "last_cohort");
  keys["data"]["last_data_year"] = integer(cfg.last_data_year, "last_data_year");
  keys["sem"]["x"] = dbl(cfg.params.x, "x");
  keys["sem"]["kappa"] = dbl(cfg.params.kappa, "kappa");
  keys["sem"]["sigma"] = dbl(cfg.params.sigma, "sigma");
  keys["sem"]["S"] = integer(cfg.params.cond_age, "S");
  keys["sem"]["w"] = integer(cfg.params.terminal_age, "w");
  keys["pipeline"]["basis_size"] = integer(cfg.basis_size, "basis_size");
  keys["pipeline"]["order"] = integer(cfg.order, "order");
  keys["pipeline"]["theta"] = dbl(cfg.theta, "theta");
  keys["pipeline"]["deltas"] = [&](const std::string& v) {
    cfg.deltas.clear();
    for (const auto& d : list(v)) cfg.deltas.push_back(text::parse_double(d, "deltas"));
  };
  keys["pipeline"]["max_p"] = integer(cfg.search.max_p, "max_p");
  keys["pipeline"]["max_d"] = integer(cfg.search.max_d, "max_d");
  keys["pipeline"]["max_q"] = integer(cfg.search.max_q, "max_q");
  keys["pipeline"]["eval_age"] = integer(cfg.eval_age, "eval_age");
  keys["pipeline"]["targets"] = [&](const std::string& v) {
    cfg.targets.clear();
    for (const auto& t : list(v)) cfg.targets.push_back(text::parse_int(t, "targets"));
  };
  keys["pipeline"]["mse_lower"] = [&](const std::string& v) {
    if (v == "displayed") cfg.mse_lower = MseLowerLimit::displayed;
    else if (v == "first_forecast") cfg.mse_lower = MseLowerLimit::first_forecast;
    else throw Error(ErrorKind::parse, "mse_lower must be displayed or first_forecast");
  };
  keys["pipeline"]["kinds"] = [&](const std::string& v) {
    cfg.kinds.clear();
    for (const auto& k : list(v)) cfg.kinds.push_back(key_kind_from_string(k));
  };
  auto& sy = cfg.synth;
  keys["synthetic"]["family"] = [&](const std::string& v) { sy.family = key_kind_from_string(v); };
  keys["synthetic"]["last_cohort"] = integer(sy.last_cohort, "synthetic last_cohort");
  keys["synthetic"]["ig_a"] = dbl(sy.ig_a, "ig_a");
  keys["synthetic"]["ig_a_slope"] = dbl(sy.ig_a_slope, "ig_a_slope");
  keys["synthetic"]["ig_b"] = dbl(sy.ig_b, "ig_b");
  keys["synthetic"]["ig_b_slope"] = dbl(sy.ig_b_slope, "ig_b_slope");
  keys["synthetic"]["id_alpha"] = dbl(sy.id_alpha, "id_alpha");
  keys["synthetic"]["id_alpha_slope"] = dbl(sy.id_alpha_slope, "id_alpha_slope");
  keys["synthetic"]["id_beta"] = dbl(sy.id_beta, "id_beta");
  keys["synthetic"]["id_gamma"] = dbl(sy.id_gamma, "id_gamma");
  keys["synthetic"]["id_change_point"] = dbl(sy.id_change_point, "id_change_point");
  keys["synthetic"]["cohort_size"] = [&](const std::string& v) { sy.cohort_size = parse_u64(v, "cohort_size"); };
  keys["verify"]["n_paths"] = [&](const std::string& v) { cfg.verify_paths = parse_u64(v, "n_paths"); };
  keys["verify"]["fault"] = [&](const std::string& v) { cfg.verify_fault = v; };
  keys["run"]["seed"] = [&](const std::string& v) { cfg.seed = parse_u64(v, "seed"); };

  for (const auto& [section, body] : tree) {
    if (section == "manifest") continue;
    const auto sec = keys.find(section);
    if (sec == keys.end()) throw Error(ErrorKind::parse, "config: unknown section [" + section + "]");
    if (!body.data().empty() && body.empty())
      throw Error(ErrorKind::parse, "config: key '" + section + "' outside any section");
    for (const auto& [key, value] : body) {
      const auto k = sec->second.find(key);
      if (k == sec->second.end()) throw Error(ErrorKind::parse, "config: unknown key [" + section + "] " + key);
      k->second(trim(value.data()));
    }
  }
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open config " + path.string());
  return parse_config(in, std::filesystem::absolute(path).parent_path());
}

std::string RunConfig::echo() const {
  std::ostringstream o;
  auto f = [](double v) { return text::fmt(v); };
  auto path = [](const std::filesystem::path& p) { return std::filesystem::absolute(p).lexically_normal().string(); };
  o << "[paths]\n";
  if (!inputs.empty()) o << "input = " << join(inputs, path) << "\n";
  o << "output = " << path(output_dir) << "\n\n";
  o << "[data]\nsynthetic = " << (synthetic ? "true" : "false") << "\nfirst_cohort = " << first_cohort
    << "\nlast_cohort = " << last_cohort << "\nlast_data_year = " << last_data_year << "\n\n";
  o << "[sem]\nx = " << f(params.x) << "\nkappa = " << f(params.kappa) << "\nsigma = " << f(params.sigma)
    << "\nS = " << params.cond_age << "\nw = " << params.terminal_age << "\n\n";
  o << "[pipeline]\nbasis_size = " << basis_size << "\norder = " << order << "\ntheta = " << f(theta)
    << "\ndeltas = " << join(deltas, f) << "\nmax_p = " << search.max_p << "\nmax_d = " << search.max_d
    << "\nmax_q = " << search.max_q << "\neval_age = " << eval_age
    << "\ntargets = " << join(targets, [](int t) { return std::to_string(t); })
    << "\nmse_lower = " << (mse_lower == MseLowerLimit::displayed ? "displayed" : "first_forecast")
    << "\nkinds = " << join(kinds, [](KeyKind k) { return std::string(to_string(k)); }) << "\n\n";
  o << "[synthetic]\nfamily = " << to_string(synth.family) << "\nlast_cohort = " << synth.last_cohort
    << "\nig_a = " << f(synth.ig_a) << "\nig_a_slope = " << f(synth.ig_a_slope) << "\nig_b = " << f(synth.ig_b)
    << "\nig_b_slope = " << f(synth.ig_b_slope) << "\nid_alpha = " << f(synth.id_alpha)
    << "\nid_alpha_slope = " << f(synth.id_alpha_slope) << "\nid_beta = " << f(synth.id_beta)
    << "\nid_gamma = " << f(synth.id_gamma) << "\nid_change_point = " << f(synth.id_change_point)
    << "\ncohort_size = " << synth.cohort_size << "\n\n";
  o << "[verify]\nn_paths = " << verify_paths << "\nfault = " << verify_fault << "\n\n";
  o << "[run]\nseed = " << seed << "\n";
  return o.str();
}

}  // namespace sem
