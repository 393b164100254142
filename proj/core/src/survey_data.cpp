#include "occsel/survey_data.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "occsel/errors.hpp"
#include "occsel/tabular.hpp"

namespace occsel {

int SurveyData::n_detected() const {
  int k = 0;
  for (auto d : detected) k += d;
  return k;
}

namespace {

void finalize(SurveyData& d) {
  const int n = d.n_sites();
  d.site_offset.assign(n, 0);
  for (int i = 1; i < n; ++i) d.site_offset[i] = d.site_offset[i - 1] + d.n_surveys[i - 1];
  d.detected.assign(n, 0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d.n_surveys[i]; ++j)
      if (d.y[d.site_offset[i] + j]) d.detected[i] = 1;
}

}  // namespace

SurveyData load_survey_data(const std::string& site_path, const std::string& survey_path,
                            const SurveySchema& schema) {
  const Table sites = read_delimited(site_path);
  const Table surveys = read_delimited(survey_path);

  const int sid = sites.require_col(schema.site_id);
  std::vector<int> site_cov_cols;
  for (const auto& name : schema.site_covariates) site_cov_cols.push_back(sites.require_col(name));

  SurveyData d;
  d.site_covariate_names = schema.site_covariates;
  d.survey_covariate_names = schema.survey_covariates;

  std::map<std::string, int> site_index;
  d.site_covariates.resize(long(sites.rows.size()), long(site_cov_cols.size()));
  for (std::size_t r = 0; r < sites.rows.size(); ++r) {
    const std::string& id = sites.rows[r][sid];
    if (!site_index.emplace(id, int(r)).second)
      throw DataError("'" + site_path + "': duplicate site id '" + id + "'");
    d.site_ids.push_back(id);
    for (std::size_t c = 0; c < site_cov_cols.size(); ++c)
      d.site_covariates(long(r), long(c)) =
          parse_number(sites.rows[r][site_cov_cols[c]],
                       "'" + site_path + "' row " + std::to_string(r + 2) + " column '" +
                           schema.site_covariates[c] + "'");
  }

  const int ssid = surveys.require_col(schema.survey_site_id);
  const int sidx = surveys.require_col(schema.survey_index);
  const int ycol = surveys.require_col(schema.detection);
  std::vector<int> survey_cov_cols;
  for (const auto& name : schema.survey_covariates)
    survey_cov_cols.push_back(surveys.require_col(name));

  // site -> (survey index -> (y, covariates)); sorted map gives survey-index order.
  struct Row {
    std::int8_t y;
    std::vector<double> cov;
  };
  std::vector<std::map<long long, Row>> per_site(d.site_ids.size());
  for (std::size_t r = 0; r < surveys.rows.size(); ++r) {
    const std::string ctx = "'" + survey_path + "' row " + std::to_string(r + 2);
    const std::string& id = surveys.rows[r][ssid];
    auto it = site_index.find(id);
    if (it == site_index.end()) throw DataError(ctx + ": unknown site id '" + id + "'");
    const long long k = parse_integer(surveys.rows[r][sidx], ctx + " column '" +
                                                                 schema.survey_index + "'");
    const long long yv =
        parse_integer(surveys.rows[r][ycol], ctx + " column '" + schema.detection + "'");
    if (yv != 0 && yv != 1)
      throw DataError(ctx + ": detection must be 0 or 1, found " + std::to_string(yv));
    Row row;
    row.y = std::int8_t(yv);
    for (std::size_t c = 0; c < survey_cov_cols.size(); ++c)
      row.cov.push_back(parse_number(surveys.rows[r][survey_cov_cols[c]],
                                     ctx + " column '" + schema.survey_covariates[c] + "'"));
    if (!per_site[it->second].emplace(k, std::move(row)).second)
      throw DataError(ctx + ": duplicate survey index " + std::to_string(k) + " for site '" +
                      id + "'");
  }

  int total = 0;
  d.n_surveys.resize(d.site_ids.size());
  for (std::size_t i = 0; i < per_site.size(); ++i) {
    if (per_site[i].empty())
      throw DataError("site '" + d.site_ids[i] + "' has no survey rows");
    d.n_surveys[i] = int(per_site[i].size());
    total += d.n_surveys[i];
  }
  d.y.resize(total);
  d.survey_covariates.resize(total, long(survey_cov_cols.size()));
  int at = 0;
  for (auto& site : per_site)
    for (auto& [k, row] : site) {
      d.y[at] = row.y;
      for (std::size_t c = 0; c < row.cov.size(); ++c)
        d.survey_covariates(at, long(c)) = row.cov[c];
      ++at;
    }

  finalize(d);
  return d;
}

SurveyData assemble_survey_data(std::vector<int> n_surveys, std::vector<std::int8_t> y,
                                Eigen::MatrixXd site_covariates,
                                Eigen::MatrixXd survey_covariates,
                                std::vector<std::string> site_covariate_names,
                                std::vector<std::string> survey_covariate_names) {
  SurveyData d;
  const int n = int(n_surveys.size());
  if (n == 0) throw DataError("no sites");
  int total = 0;
  for (int i = 0; i < n; ++i) {
    if (n_surveys[i] <= 0) throw DataError("site " + std::to_string(i) + " has no surveys");
    total += n_surveys[i];
  }
  if (int(y.size()) != total) throw DataError("detection vector length mismatch");
  if (site_covariates.rows() != n) throw DataError("site covariate row count mismatch");
  if (survey_covariates.rows() != total) throw DataError("survey covariate row count mismatch");
  for (auto v : y)
    if (v != 0 && v != 1) throw DataError("detection must be 0 or 1");
  d.n_surveys = std::move(n_surveys);
  d.y = std::move(y);
  d.site_covariates = std::move(site_covariates);
  d.survey_covariates = std::move(survey_covariates);
  d.site_covariate_names = std::move(site_covariate_names);
  d.survey_covariate_names = std::move(survey_covariate_names);
  d.site_ids.resize(n);
  for (int i = 0; i < n; ++i) d.site_ids[i] = "s" + std::to_string(i + 1);
  finalize(d);
  return d;
}

}  // namespace occsel
