#include "occsel/run_config.hpp"

#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "occsel/errors.hpp"

namespace occsel {

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& where, const std::string& what) {
  throw ConfigError("config " + where + ": " + what);
}

void require_keys(const json& object, const std::string& where,
                  const std::set<std::string>& known) {
  if (!object.is_object()) bad(where, "expected an object");
  for (const auto& item : object.items())
    if (!known.count(item.key())) bad(where, "unknown key '" + item.key() + "'");
}

template <typename T>
void read_into(const json& object, const std::string& where, const std::string& key, T* out) {
  if (!object.contains(key)) return;
  try {
    *out = object.at(key).get<T>();
  } catch (const json::exception& e) {
    bad(where + "." + key, e.what());
  }
}

std::vector<std::string> string_list(const json& object, const std::string& where,
                                     const std::string& key,
                                     std::vector<std::string> fallback) {
  if (!object.contains(key)) return fallback;
  const json& value = object.at(key);
  if (!value.is_array()) bad(where + "." + key, "expected an array of strings");
  std::vector<std::string> out;
  for (const json& item : value) {
    if (!item.is_string()) bad(where + "." + key, "expected an array of strings");
    out.push_back(item.get<std::string>());
  }
  return out;
}

SpaceConfig parse_space(const json& object, const std::string& where) {
  require_keys(object, where,
               {"covariates", "max_degree", "interactions", "degree_overrides", "extra_base"});
  SpaceConfig space;
  space.covariates = string_list(object, where, "covariates", {});
  if (space.covariates.empty()) bad(where, "needs at least one covariate");
  read_into(object, where, "max_degree", &space.max_degree);
  read_into(object, where, "interactions", &space.interactions);
  if (object.contains("degree_overrides")) {
    const json& overrides = object.at("degree_overrides");
    if (!overrides.is_object()) bad(where + ".degree_overrides", "expected an object");
    for (const auto& item : overrides.items()) {
      if (!item.value().is_number_integer())
        bad(where + ".degree_overrides." + item.key(), "expected an integer");
      space.degree_overrides[item.key()] = item.value().get<int>();
    }
  }
  space.extra_base = string_list(object, where, "extra_base", {});
  return space;
}

Heredity heredity_of(const std::string& name, const std::string& where) {
  if (name == "strong") return Heredity::kStrong;
  if (name == "weak") return Heredity::kWeak;
  if (name == "none") return Heredity::kNone;
  bad(where, "unknown heredity '" + name + "' (strong, weak, none)");
}

std::string heredity_name(Heredity mode) {
  switch (mode) {
    case Heredity::kStrong: return "strong";
    case Heredity::kWeak: return "weak";
    case Heredity::kNone: return "none";
  }
  return "strong";
}

json space_json(const SpaceConfig& space) {
  json out;
  out["covariates"] = space.covariates;
  out["max_degree"] = space.max_degree;
  out["interactions"] = space.interactions;
  out["degree_overrides"] = json::object();
  for (const auto& [name, degree] : space.degree_overrides)
    out["degree_overrides"][name] = degree;
  out["extra_base"] = space.extra_base;
  return out;
}

}  // namespace

PolyDag build_space(const SpaceConfig& space) {
  const PolyDag plain =
      build_poly_dag(space.covariates, space.max_degree, space.interactions, {},
                     space.degree_overrides);
  if (space.extra_base.empty()) return plain;
  std::vector<PolyTerm> pinned;
  for (const std::string& name : space.extra_base) {
    const int term = plain.term_of_name(name);
    pinned.push_back(plain.terms[std::size_t(term)]);
  }
  return build_poly_dag(space.covariates, space.max_degree, space.interactions, pinned,
                        space.degree_overrides);
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json root;
  try {
    root = json::parse(in, nullptr, true, true);  // allow comments
  } catch (const json::exception& e) {
    throw ConfigError("config '" + path + "': " + e.what());
  }
  require_keys(root, "root",
               {"command", "data", "model_space", "prior", "search", "estimators", "chib",
                "threshold", "standardize", "enumeration_cap", "aic", "simulate", "seed",
                "threads", "out"});

  RunConfig config;
  read_into(root, "root", "command", &config.command);
  if (!config.command.empty() && config.command != "simulate" && config.command != "select" &&
      config.command != "aic" && config.command != "report")
    bad("root.command", "expected simulate, select, aic or report");

  if (root.contains("data")) {
    const json& data = root.at("data");
    const std::string where = "data";
    require_keys(data, where,
                 {"sites", "surveys", "site_id", "survey_site_id", "survey_index", "response",
                  "site_covariates", "survey_covariates"});
    read_into(data, where, "sites", &config.sites_path);
    read_into(data, where, "surveys", &config.surveys_path);
    read_into(data, where, "site_id", &config.schema.site_id);
    config.schema.survey_site_id = config.schema.site_id;
    read_into(data, where, "survey_site_id", &config.schema.survey_site_id);
    read_into(data, where, "survey_index", &config.schema.survey_index);
    read_into(data, where, "response", &config.schema.detection);
    config.schema.site_covariates = string_list(data, where, "site_covariates", {});
    config.schema.survey_covariates = string_list(data, where, "survey_covariates", {});
  }

  if (root.contains("model_space")) {
    const json& space = root.at("model_space");
    require_keys(space, "model_space", {"presence", "detection", "heredity"});
    if (space.contains("presence"))
      config.presence = parse_space(space.at("presence"), "model_space.presence");
    if (space.contains("detection"))
      config.detection = parse_space(space.at("detection"), "model_space.detection");
    if (space.contains("heredity")) {
      if (!space.at("heredity").is_string()) bad("model_space.heredity", "expected a string");
      config.prior.heredity =
          heredity_of(space.at("heredity").get<std::string>(), "model_space.heredity");
    }
  }

  if (root.contains("prior")) {
    const json& prior = root.at("prior");
    require_keys(prior, "prior", {"kind", "theta"});
    if (prior.contains("kind")) {
      if (!prior.at("kind").is_string()) bad("prior.kind", "expected a string");
      config.prior.kind = model_prior_kind_of(prior.at("kind").get<std::string>());
    }
    read_into(prior, "prior", "theta", &config.prior.theta);
  }

  if (root.contains("search")) {
    const json& search = root.at("search");
    require_keys(search, "search",
                 {"iterations", "burn_in", "thin", "init_presence", "init_detection"});
    read_into(search, "search", "iterations", &config.search_iterations);
    read_into(search, "search", "burn_in", &config.search_burn_in);
    read_into(search, "search", "thin", &config.search_thin);
    config.init_presence = string_list(search, "search", "init_presence", {});
    config.init_detection = string_list(search, "search", "init_detection", {});
  }

  config.estimators = string_list(root, "root", "estimators", config.estimators);
  for (const std::string& name : config.estimators)
    if (name != "epe" && name != "rpe" && name != "fpe")
      bad("root.estimators", "unknown estimator '" + name + "' (epe, rpe, fpe)");

  if (root.contains("chib")) {
    const json& chib = root.at("chib");
    require_keys(chib, "chib", {"rel_tol", "max_iterations", "burn_in", "pilot"});
    read_into(chib, "chib", "rel_tol", &config.chib.rel_tol);
    read_into(chib, "chib", "max_iterations", &config.chib.max_iterations);
    read_into(chib, "chib", "burn_in", &config.chib.burn_in);
    read_into(chib, "chib", "pilot", &config.chib.pilot);
  }

  read_into(root, "root", "threshold", &config.threshold);
  read_into(root, "root", "standardize", &config.standardize);
  read_into(root, "root", "enumeration_cap", &config.enumeration_cap);

  if (root.contains("aic")) {
    const json& aic = root.at("aic");
    require_keys(aic, "aic", {"heredity", "restarts"});
    if (aic.contains("heredity")) {
      if (!aic.at("heredity").is_string()) bad("aic.heredity", "expected a string");
      config.aic_heredity = heredity_of(aic.at("heredity").get<std::string>(), "aic.heredity");
    }
    read_into(aic, "aic", "restarts", &config.aic_restarts);
  }

  if (root.contains("simulate")) {
    const json& grid = root.at("simulate");
    require_keys(grid, "simulate",
                 {"levels", "n_sites", "surveys_per_site", "n_datasets", "coef_scale",
                  "search_iterations", "search_burn_in", "search_thin", "ml_restarts"});
    if (grid.contains("levels")) {
      if (!grid.at("levels").is_array()) bad("simulate.levels", "expected an array of numbers");
      config.grid.levels.clear();
      for (const json& level : grid.at("levels")) {
        if (!level.is_number()) bad("simulate.levels", "expected an array of numbers");
        config.grid.levels.push_back(level.get<double>());
      }
    }
    read_into(grid, "simulate", "n_sites", &config.grid.n_sites);
    read_into(grid, "simulate", "surveys_per_site", &config.grid.surveys_per_site);
    read_into(grid, "simulate", "n_datasets", &config.grid.n_datasets);
    read_into(grid, "simulate", "coef_scale", &config.grid.coef_scale);
    read_into(grid, "simulate", "search_iterations", &config.grid.search_iterations);
    read_into(grid, "simulate", "search_burn_in", &config.grid.search_burn_in);
    read_into(grid, "simulate", "search_thin", &config.grid.search_thin);
    read_into(grid, "simulate", "ml_restarts", &config.grid.ml.restarts);
  }

  read_into(root, "root", "seed", &config.seed);
  read_into(root, "root", "threads", &config.threads);
  read_into(root, "root", "out", &config.out_dir);
  if (config.threads < 1) bad("root.threads", "must be at least 1");
  if (!(config.threshold > 0.0 && config.threshold <= 1.0))
    bad("root.threshold", "must lie in (0,1]");
  return config;
}

std::string effective_config_json(const RunConfig& config) {
  json root;
  root["command"] = config.command;
  root["data"] = {{"sites", config.sites_path},
                  {"surveys", config.surveys_path},
                  {"site_id", config.schema.site_id},
                  {"survey_site_id", config.schema.survey_site_id},
                  {"survey_index", config.schema.survey_index},
                  {"response", config.schema.detection},
                  {"site_covariates", config.schema.site_covariates},
                  {"survey_covariates", config.schema.survey_covariates}};
  root["model_space"] = {{"presence", space_json(config.presence)},
                         {"detection", space_json(config.detection)},
                         {"heredity", heredity_name(config.prior.heredity)}};
  root["prior"] = {{"kind", model_prior_kind_name(config.prior.kind)},
                   {"theta", config.prior.theta}};
  root["search"] = {{"iterations", config.search_iterations},
                    {"burn_in", config.search_burn_in},
                    {"thin", config.search_thin},
                    {"init_presence", config.init_presence},
                    {"init_detection", config.init_detection}};
  root["estimators"] = config.estimators;
  root["chib"] = {{"rel_tol", config.chib.rel_tol},
                  {"max_iterations", config.chib.max_iterations},
                  {"burn_in", config.chib.burn_in},
                  {"pilot", config.chib.pilot}};
  root["threshold"] = config.threshold;
  root["standardize"] = config.standardize;
  root["enumeration_cap"] = config.enumeration_cap;
  root["aic"] = {{"heredity", heredity_name(config.aic_heredity)},
                 {"restarts", config.aic_restarts}};
  root["simulate"] = {{"levels", config.grid.levels},
                      {"n_sites", config.grid.n_sites},
                      {"surveys_per_site", config.grid.surveys_per_site},
                      {"n_datasets", config.grid.n_datasets},
                      {"coef_scale", config.grid.coef_scale},
                      {"search_iterations", config.grid.search_iterations},
                      {"search_burn_in", config.grid.search_burn_in},
                      {"search_thin", config.grid.search_thin},
                      {"ml_restarts", config.grid.ml.restarts}};
  root["seed"] = config.seed;
  root["threads"] = config.threads;
  root["out"] = config.out_dir;
  return root.dump(2) + "\n";
}

}  // namespace occsel
