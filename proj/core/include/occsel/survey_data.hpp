#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace occsel {

// Column-name mapping from the two input files onto the model's roles.
struct SurveySchema {
  std::string site_id = "site";
  std::string survey_site_id = "site";
  std::string survey_index = "survey";
  std::string detection = "y";
  std::vector<std::string> site_covariates;
  std::vector<std::string> survey_covariates;
};

// Detection histories plus raw (unstandardized) covariates. Survey-level
// arrays are site-major: site i owns rows [site_offset[i], site_offset[i] +
// n_surveys[i]) in ascending survey-index order.
struct SurveyData {
  std::vector<std::string> site_ids;
  std::vector<int> n_surveys;
  std::vector<int> site_offset;
  std::vector<std::int8_t> y;
  std::vector<std::int8_t> detected;  // 1 when site has any detection: occupancy is then known
  Eigen::MatrixXd site_covariates;    // n_sites x |site covariate names|
  Eigen::MatrixXd survey_covariates;  // total_surveys x |survey covariate names|
  std::vector<std::string> site_covariate_names;
  std::vector<std::string> survey_covariate_names;

  int n_sites() const { return int(site_ids.size()); }
  int total_surveys() const { return int(y.size()); }
  int n_detected() const;
};

SurveyData load_survey_data(const std::string& site_path, const std::string& survey_path,
                            const SurveySchema& schema);

// In-memory assembly (simulation and tests). `y` site-major as above.
SurveyData assemble_survey_data(std::vector<int> n_surveys, std::vector<std::int8_t> y,
                                Eigen::MatrixXd site_covariates,
                                Eigen::MatrixXd survey_covariates,
                                std::vector<std::string> site_covariate_names,
                                std::vector<std::string> survey_covariate_names);

}  // namespace occsel
