#include "occsel/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>

#include <nlohmann/json.hpp>

#include "occsel/aic.hpp"
#include "occsel/errors.hpp"
#include "occsel/estimators.hpp"
#include "occsel/rjmcmc.hpp"
#include "occsel/sim_study.hpp"
#include "occsel/tabular.hpp"

namespace occsel {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct NamedReport {
  std::string name;
  PosteriorReport report;
};

std::string mask_terms(const PolyDag& dag, std::uint64_t mask) { return dag.mask_name(mask); }

// One row per candidate term (canonical order), one column per estimator.
Table mpip_table(const PolyDag& dag, const std::vector<NamedReport>& reports,
                 const std::vector<std::vector<double>>& mpip) {
  Table table;
  table.columns = {"term"};
  for (const NamedReport& named : reports) table.columns.push_back(named.name);
  for (int b = 0; b < dag.n_candidates(); ++b) {
    std::vector<std::string> row = {dag.term_name(dag.candidates[std::size_t(b)])};
    for (std::size_t r = 0; r < reports.size(); ++r)
      row.push_back(format_double(mpip[r][std::size_t(b)]));
    table.add_row(std::move(row));
  }
  return table;
}

void write_selection_reports(const fs::path& out, const std::vector<NamedReport>& reports,
                             const PolyDag& dag_y, const PolyDag& dag_z, double threshold,
                             std::vector<std::string>* files) {
  std::vector<SelectionSummary> summaries;
  std::vector<std::vector<double>> mpip_y, mpip_z;
  for (const NamedReport& named : reports) {
    summaries.push_back(summarize_selection(named.report, dag_y, dag_z, threshold));
    mpip_y.push_back(summaries.back().mpip_detection);
    mpip_z.push_back(summaries.back().mpip_presence);
  }

  write_delimited((out / "mpip_presence.tsv").string(), mpip_table(dag_z, reports, mpip_z));
  files->push_back("mpip_presence.tsv");
  write_delimited((out / "mpip_detection.tsv").string(), mpip_table(dag_y, reports, mpip_y));
  files->push_back("mpip_detection.tsv");

  Table selection;
  selection.columns = {"estimator", "component", "threshold", "mpm", "mpm_raw",
                       "repaired",  "hpm"};
  for (std::size_t r = 0; r < reports.size(); ++r) {
    const SelectionSummary& s = summaries[r];
    selection.add_row({reports[r].name, "presence", format_double(threshold),
                       mask_terms(dag_z, s.mpm.presence), mask_terms(dag_z, s.mpm_raw.presence),
                       s.mpm_repaired_presence ? "1" : "0", mask_terms(dag_z, s.hpm.presence)});
    selection.add_row({reports[r].name, "detection", format_double(threshold),
                       mask_terms(dag_y, s.mpm.detection), mask_terms(dag_y, s.mpm_raw.detection),
                       s.mpm_repaired_detection ? "1" : "0", mask_terms(dag_y, s.hpm.detection)});
  }
  write_delimited((out / "selection.tsv").string(), selection);
  files->push_back("selection.tsv");
}

std::vector<std::string> deduped(const std::vector<std::string>& names) {
  std::vector<std::string> out;
  for (const std::string& name : names)
    if (std::find(out.begin(), out.end(), name) == out.end()) out.push_back(name);
  return out;
}

// Exact first, then renormalized, then frequencies: the column order of the
// published tables, applied everywhere so select and report agree byte for
// byte.
int estimator_rank(const std::string& name) {
  if (name == "epe") return 0;
  if (name == "rpe") return 1;
  if (name == "fpe") return 2;
  return 3;
}

void sort_reports(std::vector<NamedReport>* reports) {
  std::stable_sort(reports->begin(), reports->end(),
                   [](const NamedReport& a, const NamedReport& b) {
                     const int ra = estimator_rank(a.name);
                     const int rb = estimator_rank(b.name);
                     return ra != rb ? ra < rb : a.name < b.name;
                   });
}

json run_select(const RunConfig& config, const fs::path& out, std::vector<std::string>* files) {
  const SurveyData data =
      load_survey_data(config.sites_path, config.surveys_path, config.schema);
  const PolyDag dag_z = build_space(config.presence);
  const PolyDag dag_y = build_space(config.detection);

  ModelSearch search(data, dag_y, dag_z, config.prior, config.standardize);
  SearchConfig search_config;
  search_config.iterations = config.search_iterations;
  search_config.burn_in = config.search_burn_in;
  search_config.thin = config.search_thin;
  search_config.seed = config.seed;
  search_config.standardize = config.standardize;
  search_config.prior = config.prior;
  search_config.init.presence = dag_z.mask_of_names(config.init_presence);
  search_config.init.detection = dag_y.mask_of_names(config.init_detection);
  const SearchTrace trace = search.run(search_config);

  Table trace_table;
  trace_table.columns = {"sweep", "presence", "detection"};
  std::map<ModelId, std::pair<std::string, std::string>> names;
  for (std::size_t i = 0; i < trace.visits.size(); ++i) {
    auto [it, fresh] = names.try_emplace(trace.visits[i]);
    if (fresh)
      it->second = {mask_terms(dag_z, trace.visits[i].presence),
                    mask_terms(dag_y, trace.visits[i].detection)};
    trace_table.add_row({std::to_string(i), it->second.first, it->second.second});
  }
  write_delimited((out / "trace.tsv").string(), trace_table);
  files->push_back("trace.tsv");

  const std::vector<ModelId> models =
      default_model_set(trace, dag_y, dag_z, config.prior.heredity, config.enumeration_cap);

  std::vector<NamedReport> reports;
  for (const std::string& name : deduped(config.estimators)) {
    NamedReport named;
    named.name = name;
    if (name == "fpe") {
      named.report = estimate_fpe(trace, models);
    } else if (name == "rpe") {
      named.report = estimate_rpe(trace, search, models);
    } else {
      std::vector<ModelId> full;
      try {
        full = enumerate_models(dag_y, dag_z, config.prior.heredity, config.enumeration_cap);
      } catch (const ConfigError& e) {
        throw ConfigError(std::string("estimator epe needs an enumerable model space: ") +
                          e.what());
      }
      named.report = estimate_epe(data, dag_y, dag_z, full, config.prior, config.chib,
                                  config.seed, config.threads, config.standardize);
    }
    write_posterior_scores((out / ("scores_" + name + ".tsv")).string(), named.report, dag_y,
                           dag_z);
    files->push_back("scores_" + name + ".tsv");
    reports.push_back(std::move(named));
  }
  sort_reports(&reports);
  write_selection_reports(out, reports, dag_y, dag_z, config.threshold, files);

  json extra;
  extra["search"] = {{"accept_rate_presence", trace.accept_rate_z},
                     {"accept_rate_detection", trace.accept_rate_y},
                     {"post_burn_in_sweeps", trace.visits.size()},
                     {"kept_draws", trace.kept_models.size()},
                     {"model_set_size", models.size()}};
  return extra;
}

json run_aic(const RunConfig& config, const fs::path& out, std::vector<std::string>* files) {
  const SurveyData data =
      load_survey_data(config.sites_path, config.surveys_path, config.schema);
  const PolyDag dag_z = build_space(config.presence);
  const PolyDag dag_y = build_space(config.detection);
  const std::vector<ModelId> models =
      enumerate_models(dag_y, dag_z, config.aic_heredity, config.enumeration_cap);
  MlOptions ml;
  ml.restarts = config.aic_restarts;
  ml.seed = config.seed;
  const AicSelection aic = aic_selection(data, dag_y, dag_z, models, ml, config.threads);

  Table table;
  table.columns = {"presence", "detection", "loglik",    "aic",
                   "delta",    "weight",    "converged", "norm_bounded"};
  for (const AicRow& row : aic.rows)
    table.add_row({mask_terms(dag_z, row.model.presence), mask_terms(dag_y, row.model.detection),
                   format_double(row.fit.loglik), format_double(row.fit.aic),
                   format_double(row.delta), format_double(row.weight),
                   row.fit.converged ? "1" : "0", row.fit.norm_bounded ? "1" : "0"});
  write_delimited((out / "aic_table.tsv").string(), table);
  files->push_back("aic_table.tsv");

  Table mpip_z;
  mpip_z.columns = {"term", "aic_weight"};
  for (int b = 0; b < dag_z.n_candidates(); ++b)
    mpip_z.add_row({dag_z.term_name(dag_z.candidates[std::size_t(b)]),
                    format_double(aic.mpip_presence[std::size_t(b)])});
  write_delimited((out / "aic_mpip_presence.tsv").string(), mpip_z);
  files->push_back("aic_mpip_presence.tsv");

  Table mpip_y;
  mpip_y.columns = {"term", "aic_weight"};
  for (int b = 0; b < dag_y.n_candidates(); ++b)
    mpip_y.add_row({dag_y.term_name(dag_y.candidates[std::size_t(b)]),
                    format_double(aic.mpip_detection[std::size_t(b)])});
  write_delimited((out / "aic_mpip_detection.tsv").string(), mpip_y);
  files->push_back("aic_mpip_detection.tsv");

  json extra;
  extra["aic"] = {{"best_presence", mask_terms(dag_z, aic.best.presence)},
                  {"best_detection", mask_terms(dag_y, aic.best.detection)},
                  {"models", models.size()}};
  return extra;
}

json run_simulate(const RunConfig& config, const fs::path& out,
                  std::vector<std::string>* files) {
  GridOptions grid = config.grid;
  grid.seed = config.seed;
  grid.threads = config.threads;
  grid.prior = config.prior;
  const std::vector<GridRow> rows = run_scenario_grid(grid);
  write_delimited((out / "grid_rows.tsv").string(), grid_row_table(rows));
  files->push_back("grid_rows.tsv");
  write_delimited((out / "grid_summary.tsv").string(), grid_summary_table(summarize_grid(rows)));
  files->push_back("grid_summary.tsv");
  // Wall-clock measurements; the one artifact exempt from byte-identical
  // reproducibility.
  write_delimited((out / "grid_timings.tsv").string(), grid_timing_table(rows));
  files->push_back("grid_timings.tsv");

  json extra;
  extra["simulate"] = {{"rows", rows.size()}};
  return extra;
}

json run_report(const RunConfig& config, const fs::path& out,
                std::vector<std::string>* files) {
  const PolyDag dag_z = build_space(config.presence);
  const PolyDag dag_y = build_space(config.detection);
  std::vector<std::string> score_files;
  if (fs::exists(out))
    for (const auto& entry : fs::directory_iterator(out)) {
      const std::string name = entry.path().filename().string();
      if (name.starts_with("scores_") && name.ends_with(".tsv")) score_files.push_back(name);
    }
  std::sort(score_files.begin(), score_files.end());
  if (score_files.empty())
    throw ConfigError("report: no scores_*.tsv files in '" + out.string() + "'");

  std::vector<NamedReport> reports;
  for (const std::string& name : score_files) {
    NamedReport named;
    named.report = read_posterior_scores((out / name).string(), dag_y, dag_z);
    named.name = named.report.estimator.empty()
                     ? name.substr(7, name.size() - 11)  // between scores_ and .tsv
                     : named.report.estimator;
    reports.push_back(std::move(named));
  }
  sort_reports(&reports);
  write_selection_reports(out, reports, dag_y, dag_z, config.threshold, files);

  json extra;
  extra["report"] = {{"scores_files", score_files}};
  return extra;
}

}  // namespace

std::vector<std::string> run_pipeline(const RunConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  const fs::path out(config.out_dir);
  fs::create_directories(out);
  std::vector<std::string> files;

  json extra;
  if (config.command == "select") {
    extra = run_select(config, out, &files);
  } else if (config.command == "aic") {
    extra = run_aic(config, out, &files);
  } else if (config.command == "simulate") {
    extra = run_simulate(config, out, &files);
  } else if (config.command == "report") {
    extra = run_report(config, out, &files);
  } else {
    throw ConfigError("unknown command '" + config.command + "'");
  }

  json manifest;
  manifest["version"] = kOccselVersion;
  manifest["command"] = config.command;
  manifest["seed"] = config.seed;
  manifest["threads"] = config.threads;
  manifest["config"] = json::parse(effective_config_json(config));
  manifest["artifacts"] = files;
  for (const auto& item : extra.items()) manifest[item.key()] = item.value();
  manifest["wall_seconds"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::ofstream stream(out / "manifest.json");
  if (!stream) throw DataError("cannot write '" + (out / "manifest.json").string() + "'");
  stream << manifest.dump(2) << "\n";
  files.push_back("manifest.json");
  return files;
}

}  // namespace occsel
