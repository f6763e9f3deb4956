#include "switchvol/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "switchvol/error.hpp"

namespace switchvol {

using nlohmann::json;

ModelKind parse_model(const std::string& name) {
  if (name == "jump") return ModelKind::jump;
  if (name == "stable") return ModelKind::stable;
  throw Error(ErrorKind::config, "unknown model '" + name + "' (expected jump or stable)");
}

std::string model_name(ModelKind kind) { return kind == ModelKind::jump ? "jump" : "stable"; }

void RunConfig::resize_defaults(int m) {
  states = m;
  jump.u = JumpPriors::defaults(m).u;
  jump.dirichlet_rows = default_dirichlet_rows(m);
  stable.dirichlet_rows = default_dirichlet_rows(m);
  pi0.clear();
}

void RunConfig::validate() const {
  if (states < 1 || states > 12) throw Error(ErrorKind::config, "states must lie in 1..12");
  if (sampler.iterations < 1) throw Error(ErrorKind::config, "iterations must be >= 1");
  if (sampler.burn_in < 0 || sampler.burn_in >= sampler.iterations)
    throw Error(ErrorKind::config, "burn_in must satisfy 0 <= burn_in < iterations");
  if (!(b > 0.0)) throw Error(ErrorKind::config, "b must be > 0");
  if (!(alpha > 1.0 && alpha < 2.0)) throw Error(ErrorKind::config, "alpha must lie in (1, 2)");
  jump.validate(states);
  stable.validate(states);
  if (!pi0.empty()) {
    try {
      InitialDistribution{pi0}.validate(states);
    } catch (const Error& e) {
      throw Error(ErrorKind::config, e.what());
    }
  }
  if (!sampler.seed) throw Error(ErrorKind::config, "a seed is required (config 'seed' or --seed)");
}

std::uint64_t RunConfig::seed() const {
  if (!sampler.seed) throw Error(ErrorKind::config, "a seed is required (config 'seed' or --seed)");
  return *sampler.seed;
}

namespace {

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw Error(ErrorKind::config, where + " must be a JSON object");
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.count(key))
      throw Error(ErrorKind::config, "unknown key '" + key + "' in " + where);
  }
}

InvGammaParams read_inv_gamma(const json& j, InvGammaParams base, const std::string& where) {
  reject_unknown(j, {"shape", "rate"}, where);
  if (j.contains("shape")) base.shape = j.at("shape").get<double>();
  if (j.contains("rate")) base.rate = j.at("rate").get<double>();
  return base;
}

FrechetParams read_frechet(const json& j, FrechetParams base, const std::string& where) {
  reject_unknown(j, {"shape", "scale"}, where);
  if (j.contains("shape")) base.shape = j.at("shape").get<double>();
  if (j.contains("scale")) base.scale = j.at("scale").get<double>();
  return base;
}

std::vector<DirichletParams> read_dirichlet(const json& j) {
  std::vector<DirichletParams> rows;
  for (const auto& row : j) rows.push_back({row.get<std::vector<double>>()});
  return rows;
}

RunConfig build(const json* file, const ConfigOverrides& flags) {
  int states = 4;
  if (file && file->contains("states")) states = file->at("states").get<int>();
  if (flags.states) states = *flags.states;
  if (states < 1 || states > 12) throw Error(ErrorKind::config, "states must lie in 1..12");

  RunConfig cfg;
  cfg.resize_defaults(states);

  if (file) {
    const json& f = *file;
    reject_unknown(f, {"model", "states", "iterations", "burn_in", "seed", "data", "reference", "out",
                       "initial_distribution", "jump", "stable"},
                   "configuration");
    if (f.contains("model")) cfg.model = parse_model(f.at("model").get<std::string>());
    if (f.contains("iterations")) cfg.sampler.iterations = f.at("iterations").get<int>();
    if (f.contains("burn_in")) cfg.sampler.burn_in = f.at("burn_in").get<int>();
    if (f.contains("seed")) cfg.sampler.seed = f.at("seed").get<std::uint64_t>();
    if (f.contains("data")) cfg.data_path = f.at("data").get<std::string>();
    if (f.contains("reference")) cfg.reference_path = f.at("reference").get<std::string>();
    if (f.contains("out")) cfg.out_dir = f.at("out").get<std::string>();
    if (f.contains("initial_distribution"))
      cfg.pi0 = f.at("initial_distribution").get<std::vector<double>>();
    if (f.contains("jump")) {
      const json& j = f.at("jump");
      reject_unknown(j, {"b", "k", "sigma_prior", "frechet", "u", "dirichlet", "fix_mean_zero"}, "jump");
      if (j.contains("b")) cfg.b = j.at("b").get<double>();
      if (j.contains("k")) cfg.jump.k = j.at("k").get<double>();
      if (j.contains("sigma_prior"))
        cfg.jump.sigma_prior = read_inv_gamma(j.at("sigma_prior"), cfg.jump.sigma_prior, "jump.sigma_prior");
      if (j.contains("frechet"))
        cfg.jump.frechet = read_frechet(j.at("frechet"), cfg.jump.frechet, "jump.frechet");
      if (j.contains("u")) cfg.jump.u = j.at("u").get<std::vector<double>>();
      if (j.contains("dirichlet")) cfg.jump.dirichlet_rows = read_dirichlet(j.at("dirichlet"));
      if (j.contains("fix_mean_zero")) cfg.jump.fix_mean_zero = j.at("fix_mean_zero").get<bool>();
    }
    if (f.contains("stable")) {
      const json& s = f.at("stable");
      reject_unknown(s, {"alpha", "k", "scale_prior", "frechet", "dirichlet", "lambda_floor", "fix_mean_zero"},
                     "stable");
      if (s.contains("alpha")) cfg.alpha = s.at("alpha").get<double>();
      if (s.contains("k")) cfg.stable.k = s.at("k").get<double>();
      if (s.contains("scale_prior"))
        cfg.stable.scale_prior = read_inv_gamma(s.at("scale_prior"), cfg.stable.scale_prior, "stable.scale_prior");
      if (s.contains("frechet"))
        cfg.stable.frechet = read_frechet(s.at("frechet"), cfg.stable.frechet, "stable.frechet");
      if (s.contains("dirichlet")) cfg.stable.dirichlet_rows = read_dirichlet(s.at("dirichlet"));
      if (s.contains("lambda_floor")) cfg.stable.lambda_floor = s.at("lambda_floor").get<double>();
      if (s.contains("fix_mean_zero")) cfg.stable.fix_mean_zero = s.at("fix_mean_zero").get<bool>();
    }
  }

  if (flags.model) cfg.model = parse_model(*flags.model);
  if (flags.iterations) cfg.sampler.iterations = *flags.iterations;
  if (flags.burn_in) cfg.sampler.burn_in = *flags.burn_in;
  if (flags.seed) cfg.sampler.seed = *flags.seed;
  if (flags.data) cfg.data_path = *flags.data;
  if (flags.reference) cfg.reference_path = *flags.reference;
  if (flags.out) cfg.out_dir = *flags.out;
  if (flags.b) cfg.b = *flags.b;
  if (flags.alpha) cfg.alpha = *flags.alpha;
  return cfg;
}

}  // namespace

RunConfig parse_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::config, std::string("configuration is not valid JSON: ") + e.what());
  }
  try {
    return build(&doc, {});
  } catch (const json::exception& e) {
    throw Error(ErrorKind::config, std::string("configuration has a wrongly typed value: ") + e.what());
  }
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open configuration " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

RunConfig resolve_config(const std::optional<std::filesystem::path>& file,
                         const ConfigOverrides& flags) {
  json doc;
  if (file) {
    std::ifstream in(*file);
    if (!in) throw Error(ErrorKind::io, "cannot open configuration " + file->string());
    try {
      doc = json::parse(in);
    } catch (const json::exception& e) {
      throw Error(ErrorKind::config, std::string("configuration is not valid JSON: ") + e.what());
    }
  }
  try {
    return build(file ? &doc : nullptr, flags);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::config, std::string("configuration has a wrongly typed value: ") + e.what());
  }
}

std::string config_to_json(const RunConfig& cfg) {
  auto rows = [](const std::vector<DirichletParams>& d) {
    json out = json::array();
    for (const auto& r : d) out.push_back(r.concentration);
    return out;
  };
  json j;
  j["model"] = model_name(cfg.model);
  j["states"] = cfg.states;
  j["iterations"] = cfg.sampler.iterations;
  j["burn_in"] = cfg.sampler.burn_in;
  if (cfg.sampler.seed) j["seed"] = *cfg.sampler.seed;
  j["data"] = cfg.data_path;
  j["reference"] = cfg.reference_path;
  j["initial_distribution"] = cfg.pi0;
  j["jump"] = {{"b", cfg.b},
               {"k", cfg.jump.k},
               {"sigma_prior", {{"shape", cfg.jump.sigma_prior.shape}, {"rate", cfg.jump.sigma_prior.rate}}},
               {"frechet", {{"shape", cfg.jump.frechet.shape}, {"scale", cfg.jump.frechet.scale}}},
               {"u", cfg.jump.u},
               {"dirichlet", rows(cfg.jump.dirichlet_rows)},
               {"fix_mean_zero", cfg.jump.fix_mean_zero}};
  j["stable"] = {{"alpha", cfg.alpha},
                 {"k", cfg.stable.k},
                 {"scale_prior", {{"shape", cfg.stable.scale_prior.shape}, {"rate", cfg.stable.scale_prior.rate}}},
                 {"frechet", {{"shape", cfg.stable.frechet.shape}, {"scale", cfg.stable.frechet.scale}}},
                 {"dirichlet", rows(cfg.stable.dirichlet_rows)},
                 {"lambda_floor", cfg.stable.lambda_floor},
                 {"fix_mean_zero", cfg.stable.fix_mean_zero}};
  return j.dump(2);
}

}  // namespace switchvol
