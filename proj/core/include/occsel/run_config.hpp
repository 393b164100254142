#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "occsel/chib.hpp"
#include "occsel/model_prior.hpp"
#include "occsel/poly_dag.hpp"
#include "occsel/sim_study.hpp"
#include "occsel/survey_data.hpp"

namespace occsel {

// Candidate-surface description for one component, resolved into a PolyDag
// once the run starts.
struct SpaceConfig {
  std::vector<std::string> covariates;
  int max_degree = 2;
  bool interactions = true;
  std::map<std::string, int> degree_overrides;
  std::vector<std::string> extra_base;  // term names pinned into every model
};

PolyDag build_space(const SpaceConfig& space);

struct RunConfig {
  std::string command;  // simulate | select | aic | report

  // select / aic inputs
  std::string sites_path;
  std::string surveys_path;
  SurveySchema schema;
  SpaceConfig presence;
  SpaceConfig detection;
  bool standardize = true;

  ModelPriorConfig prior;

  // model search (select)
  long long search_iterations = 200000;
  long long search_burn_in = 20000;
  int search_thin = 10;
  std::vector<std::string> init_presence;   // term names; empty = base model
  std::vector<std::string> init_detection;
  std::vector<std::string> estimators = {"rpe", "fpe"};  // "epe" is opt-in
  ChibOptions chib;
  double threshold = 0.5;           // posterior-inclusion cutoff for the MPM
  std::size_t enumeration_cap = 100000;  // full-enumeration ceiling (EPE, reports)

  // aic
  Heredity aic_heredity = Heredity::kNone;
  int aic_restarts = 10;

  // simulate
  GridOptions grid;

  // run-wide
  std::uint64_t seed = 1;
  int threads = 1;
  std::string out_dir = "out";
};

// Parse and validate a JSON config file. Unknown keys are rejected so typos
// cannot silently fall back to defaults.
RunConfig load_run_config(const std::string& path);

// The fully resolved configuration (defaults filled in) as JSON text; the
// manifest embeds this so a run can be reproduced from its manifest alone.
std::string effective_config_json(const RunConfig& config);

}  // namespace occsel
