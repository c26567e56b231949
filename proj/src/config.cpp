#include "gpsim/config.hpp"

#include "gpsim/rng.hpp"

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

namespace gpsim {

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::coverage: return "coverage";
    case ExperimentKind::pointwise_coverage: return "pointwise_coverage";
    case ExperimentKind::rate: return "rate";
    case ExperimentKind::oracle: return "oracle";
    case ExperimentKind::hb_concentration: return "hb_concentration";
    case ExperimentKind::prior_polished: return "prior_polished";
    case ExperimentKind::d2_asymptotics: return "d2_asymptotics";
  }
  return "unknown";
}

ExperimentKind experiment_kind_from_string(const std::string& s) {
  for (auto k : {ExperimentKind::coverage, ExperimentKind::pointwise_coverage, ExperimentKind::rate,
                 ExperimentKind::oracle, ExperimentKind::hb_concentration,
                 ExperimentKind::prior_polished, ExperimentKind::d2_asymptotics})
    if (to_string(k) == s) return k;
  throw std::invalid_argument("unknown experiment '" + s + "'");
}

std::string to_string(TruthKind kind) {
  switch (kind) {
    case TruthKind::zero: return "zero";
    case TruthKind::power: return "power";
    case TruthKind::self_similar: return "self_similar";
    case TruthKind::prior_draw: return "prior_draw";
    case TruthKind::fourier: return "fourier";
    case TruthKind::custom_csv: return "custom_csv";
  }
  return "unknown";
}

TruthKind truth_kind_from_string(const std::string& s) {
  for (auto k : {TruthKind::zero, TruthKind::power, TruthKind::self_similar, TruthKind::prior_draw,
                 TruthKind::fourier, TruthKind::custom_csv})
    if (to_string(k) == s) return k;
  throw std::invalid_argument("unknown truth kind '" + s + "'");
}

namespace {

std::string join_problems(const std::vector<std::string>& problems) {
  std::string out = "invalid configuration:";
  for (const auto& p : problems) out += "\n  " + p;
  return out;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : std::runtime_error(join_problems(problems)), problems_(std::move(problems)) {}

void ExperimentConfig::validate() const {
  std::vector<std::string> bad;
  auto need = [&](bool ok, const std::string& msg) {
    if (!ok) bad.push_back(msg);
  };
  need(replications >= 1, "replications: must be >= 1");
  need(!n_list.empty(), "n_list: must not be empty");
  for (std::size_t k = 0; k < n_list.size(); ++k) {
    need(n_list[k] >= 2, fmt::format("n_list[{}]: must be >= 2", k));
    if (k > 0) need(n_list[k] > n_list[k - 1], fmt::format("n_list[{}]: must be strictly ascending", k));
  }
  need(!methods.empty() || experiment == ExperimentKind::prior_polished ||
           experiment == ExperimentKind::d2_asymptotics,
       "methods: must not be empty");
  need(eta > 0.0 && eta < 1.0, "eta: must lie in (0, 1)");
  need(eta_scale > 0.0 && eta_scale < 1.0, "hb.eta_scale: must lie in (0, 1)");
  for (std::size_t k = 0; k < M_list.size(); ++k)
    need(M_list[k] >= 0.0 && std::isfinite(M_list[k]), fmt::format("M_list[{}]: must be >= 0", k));
  need(!M_list.empty(), "M_list: must not be empty");
  need(grid_points >= 200, "scale.grid_points: must be >= 200");
  need(hb_kappa > 0.0, "hb.kappa: must be > 0");
  need(hb_lambda > 0.0, "hb.lambda: must be > 0");
  need(hb_subgrid >= 2, "hb.subgrid: must be >= 2");
  need(interval_C >= 0.0, "intervals.C: must be >= 0");
  need(fraction_level >= 0.0 && fraction_level <= 1.0, "intervals.fraction_level: must lie in [0, 1]");
  need(mass_level >= 0.0 && mass_level <= 1.0, "concentration.mass_level: must lie in [0, 1]");
  for (std::size_t k = 0; k < K_list.size(); ++k)
    need(K_list[k] > 1.0, fmt::format("concentration.K_list[{}]: must be > 1", k));
  for (std::size_t k = 0; k < epsilons.size(); ++k)
    need(epsilons[k] > 0.0, fmt::format("oracle.epsilons[{}]: must be > 0", k));
  need(pt_L >= 1.0, "polished_tail.L: must be >= 1");
  need(pt_rho > 1.0, "polished_tail.rho: must be > 1");
  need(pt_m_min >= 2, "polished_tail.m_min: must be >= 2");
  need(d2_scales >= 2, "d2.scales: must be >= 2");
  need(jobs >= 1, "jobs: must be >= 1");
  need(prior.m >= 1.0, "prior.m: must be >= 1");
  need(prior.delta > 0.0, "prior.delta: must be > 0");
  need(prior.family != PriorFamily::custom, "prior.family: custom priors cannot be configured");
  need(!(prior.family == PriorFamily::laplacian && prior.boundary == Boundary::neumann),
       "prior.boundary: the Neumann Laplacian is singular and has no covariance");
  const bool two_d = prior.family == PriorFamily::tensor || prior.family == PriorFamily::sobolev_2d;
  if (two_d)
    for (std::size_t k = 0; k < n_list.size(); ++k)
      need(n_list[k] * n_list[k] <= kDenseCap,
           fmt::format("n_list[{}]: n^2 exceeds the dimension cap {}", k, kDenseCap));
  need(truth.alpha > 0.0, "truth.alpha: must be > 0");
  need(truth.delta > -1.0, "truth.params.delta: must be > -1");
  need(truth.kind != TruthKind::custom_csv || !truth.path.empty(), "truth.params.path: required for custom_csv");
  need(truth.kind != TruthKind::prior_draw || prior.family != PriorFamily::laplacian ||
           prior.boundary == Boundary::mixed_dn,
       "truth.kind: prior_draw needs the sine basis");
  need(truth.kind != TruthKind::fourier || !two_d, "truth.kind: fourier truths are 1-D only");
  need(truth.kind != TruthKind::prior_draw || !two_d, "truth.kind: prior_draw truths are 1-D only");
  need(truth.function == "identity" || truth.function == "sine" || truth.function == "kink",
       "truth.params.function: expected identity, sine or kink");
  if (radius_method.kind == RadiusKind::monte_carlo)
    need(radius_method.mc_draws >= 10000, "radius.mc_draws: must be >= 10000");
  if (!bad.empty()) throw ConfigError(std::move(bad));
}

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json j;
  j["experiment"] = to_string(experiment);
  j["seed"] = seed;
  j["replications"] = replications;
  j["n_list"] = n_list;
  std::vector<std::string> ms;
  for (auto m : methods) ms.push_back(to_string(m));
  j["methods"] = ms;
  j["eta"] = eta;
  j["M_list"] = M_list;
  j["prior"] = {{"family", to_string(prior.family)}, {"m", prior.m}, {"delta", prior.delta},
                {"boundary", to_string(prior.boundary)}, {"factor", to_string(prior.factor)}};
  j["truth"] = {{"kind", to_string(truth.kind)}, {"alpha", truth.alpha}, {"scale", truth.scale},
                {"seed", truth.seed},
                {"params", {{"delta", truth.delta}, {"M", truth.M}, {"rho", truth.rho},
                            {"L", truth.L}, {"function", truth.function}, {"path", truth.path}}}};
  j["radius"] = {{"method", to_string(radius_method.kind)}, {"mc_draws", radius_method.mc_draws},
                 {"mc_seed", radius_method.mc_seed}};
  j["scale"] = {{"grid_points", grid_points}};
  j["hb"] = {{"kappa", hb_kappa}, {"lambda", hb_lambda}, {"subgrid", hb_subgrid}, {"eta_scale", eta_scale}};
  j["intervals"] = {{"C", interval_C}, {"fraction_level", fraction_level}};
  j["oracle"] = {{"epsilons", epsilons}};
  j["concentration"] = {{"K_list", K_list}, {"mass_level", mass_level}};
  j["polished_tail"] = {{"L", pt_L}, {"rho", pt_rho}, {"m_min", pt_m_min}};
  j["d2"] = {{"scales", d2_scales}};
  return j;
}

std::string ExperimentConfig::hash() const {
  return fmt::format("{:016x}", fnv1a64(to_json().dump()));
}

namespace {

/// Walks a YAML mapping, converting values and collecting errors with their paths.
class Reader {
public:
  Reader(const YAML::Node& node, std::string path, std::vector<std::string>& errors)
      : node_(node), path_(std::move(path)), errors_(errors) {
    if (node_ && !node_.IsMap()) errors_.push_back(where("") + "expected a mapping");
  }

  ~Reader() {
    if (!node_ || !node_.IsMap()) return;
    for (const auto& kv : node_) {
      const auto key = kv.first.as<std::string>();
      if (!seen_.count(key)) errors_.push_back(where(key) + "unknown key");
    }
  }

  template <class T>
  void get(const std::string& key, T& out) {
    seen_.insert(key);
    const YAML::Node& node = node_;
    if (!node || !node.IsMap() || !node[key]) return;
    try {
      out = node[key].as<T>();
    } catch (const YAML::Exception&) {
      errors_.push_back(where(key) + "has the wrong type");
    }
  }

  template <class T>
  void get_enum(const std::string& key, T& out, const std::function<T(const std::string&)>& parse) {
    std::string s;
    const YAML::Node& node = node_;
    bool present = node && node.IsMap() && node[key];
    get(key, s);
    if (!present) return;
    try {
      out = parse(s);
    } catch (const std::invalid_argument& e) {
      errors_.push_back(where(key) + e.what());
    }
  }

  YAML::Node child(const std::string& key) {
    seen_.insert(key);
    const YAML::Node& node = node_;
    if (!node || !node.IsMap()) return YAML::Node(YAML::NodeType::Undefined);
    return node[key];
  }

  std::string sub(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

private:
  std::string where(const std::string& key) const {
    const std::string p = key.empty() ? path_ : sub(key);
    return (p.empty() ? std::string("<root>") : p) + ": ";
  }

  YAML::Node node_;
  std::string path_;
  std::vector<std::string>& errors_;
  std::set<std::string> seen_;
};

PriorFamily factor_from_string(const std::string& s) {
  if (s == "bm") return PriorFamily::brownian_motion;
  if (s == "power_law") return PriorFamily::power_law;
  throw std::invalid_argument("expected bm or power_law");
}

}  // namespace

ExperimentConfig load_config(const std::string& text) {
  YAML::Node loaded;
  try {
    loaded = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError({std::string("<root>: YAML parse error: ") + e.what()});
  }
  ExperimentConfig cfg;
  const YAML::Node& root = loaded;
  std::vector<std::string> errors;
  {
    Reader r(root, "", errors);
    r.get_enum<ExperimentKind>("experiment", cfg.experiment, experiment_kind_from_string);
    r.get("seed", cfg.seed);
    r.get("replications", cfg.replications);
    r.get("n_list", cfg.n_list);
    std::vector<std::string> methods;
    const bool has_methods = root.IsMap() && root["methods"];
    r.get("methods", methods);
    if (has_methods) {
      cfg.methods.clear();
      for (std::size_t k = 0; k < methods.size(); ++k) {
        try {
          cfg.methods.push_back(scale_method_from_string(methods[k]));
        } catch (const std::invalid_argument& e) {
          errors.push_back(fmt::format("methods[{}]: {}", k, e.what()));
        }
      }
    }
    r.get("eta", cfg.eta);
    r.get("M_list", cfg.M_list);
    r.get("jobs", cfg.jobs);
    r.get("trace", cfg.trace);
    std::string output;
    r.get("output", output);
    if (!output.empty()) cfg.output = output;

    {
      Reader p(r.child("prior"), r.sub("prior"), errors);
      p.get_enum<PriorFamily>("family", cfg.prior.family, prior_family_from_string);
      p.get("m", cfg.prior.m);
      p.get("delta", cfg.prior.delta);
      p.get_enum<Boundary>("boundary", cfg.prior.boundary, boundary_from_string);
      p.get_enum<PriorFamily>("factor", cfg.prior.factor, factor_from_string);
    }
    if (cfg.prior.family == PriorFamily::brownian_motion || cfg.prior.family == PriorFamily::laplacian)
      cfg.prior.m = 2.0;
    if (cfg.prior.family == PriorFamily::tensor && cfg.prior.factor == PriorFamily::brownian_motion)
      cfg.prior.m = 2.0;
    {
      Reader t(r.child("truth"), r.sub("truth"), errors);
      t.get_enum<TruthKind>("kind", cfg.truth.kind, truth_kind_from_string);
      t.get("alpha", cfg.truth.alpha);
      t.get("scale", cfg.truth.scale);
      t.get("seed", cfg.truth.seed);
      Reader q(t.child("params"), t.sub("params"), errors);
      q.get("delta", cfg.truth.delta);
      q.get("M", cfg.truth.M);
      q.get("rho", cfg.truth.rho);
      q.get("L", cfg.truth.L);
      q.get("function", cfg.truth.function);
      q.get("path", cfg.truth.path);
    }
    {
      Reader q(r.child("radius"), r.sub("radius"), errors);
      q.get_enum<RadiusKind>("method", cfg.radius_method.kind, radius_kind_from_string);
      q.get("mc_draws", cfg.radius_method.mc_draws);
      q.get("mc_seed", cfg.radius_method.mc_seed);
    }
    {
      Reader q(r.child("scale"), r.sub("scale"), errors);
      q.get("grid_points", cfg.grid_points);
    }
    {
      Reader q(r.child("hb"), r.sub("hb"), errors);
      q.get("kappa", cfg.hb_kappa);
      q.get("lambda", cfg.hb_lambda);
      q.get("subgrid", cfg.hb_subgrid);
      q.get("eta_scale", cfg.eta_scale);
    }
    {
      Reader q(r.child("intervals"), r.sub("intervals"), errors);
      q.get("C", cfg.interval_C);
      q.get("fraction_level", cfg.fraction_level);
    }
    {
      Reader q(r.child("oracle"), r.sub("oracle"), errors);
      q.get("epsilons", cfg.epsilons);
    }
    {
      Reader q(r.child("concentration"), r.sub("concentration"), errors);
      q.get("K_list", cfg.K_list);
      q.get("mass_level", cfg.mass_level);
    }
    {
      Reader q(r.child("polished_tail"), r.sub("polished_tail"), errors);
      q.get("L", cfg.pt_L);
      q.get("rho", cfg.pt_rho);
      q.get("m_min", cfg.pt_m_min);
    }
    {
      Reader q(r.child("d2"), r.sub("d2"), errors);
      q.get("scales", cfg.d2_scales);
    }
  }
  if (!errors.empty()) throw ConfigError(std::move(errors));
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"cannot open config file " + path.string()});
  std::stringstream ss;
  ss << in.rdbuf();
  return load_config(ss.str());
}

}  // namespace gpsim
