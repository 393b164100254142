#include "occsel/estimators.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <set>
#include <unordered_map>

#include "occsel/design.hpp"
#include "occsel/errors.hpp"
#include "occsel/intrinsic.hpp"
#include "occsel/parallel.hpp"
#include "occsel/tabular.hpp"

namespace occsel {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Streaming batch means for K parallel series of known length: point
// estimates use every draw, standard errors the first n_batches * batch of
// them, matching batch_means_se.
class BatchMeans {
 public:
  BatchMeans(std::size_t t_total, std::size_t k_series) : k_(k_series) {
    n_batches_ = std::size_t(std::sqrt(double(t_total)));
    if (n_batches_ < 2) return;
    batch_ = t_total / n_batches_;
    sums_.assign(n_batches_ * k_, 0.0);
  }

  bool active() const { return !sums_.empty(); }

  void add(std::size_t t, std::size_t k, double value) {
    if (!active() || t >= n_batches_ * batch_) return;
    sums_[(t / batch_) * k_ + k] += value;
  }

  double se(std::size_t k) const {
    if (!active()) return 0.0;
    double grand = 0.0;
    for (std::size_t b = 0; b < n_batches_; ++b) grand += sums_[b * k_ + k];
    grand /= double(n_batches_ * batch_);
    double ss = 0.0;
    for (std::size_t b = 0; b < n_batches_; ++b) {
      const double m = sums_[b * k_ + k] / double(batch_);
      ss += (m - grand) * (m - grand);
    }
    return std::sqrt(ss / double(n_batches_ - 1) / double(n_batches_));
  }

 private:
  std::size_t k_ = 0;
  std::size_t n_batches_ = 0;
  std::size_t batch_ = 0;
  std::vector<double> sums_;
};

std::map<ModelId, std::size_t> index_of(const std::vector<ModelId>& models) {
  std::map<ModelId, std::size_t> index;
  for (std::size_t k = 0; k < models.size(); ++k)
    if (!index.emplace(models[k], k).second)
      throw ConfigError("duplicate model '" + std::to_string(models[k].detection) + "/" +
                        std::to_string(models[k].presence) + "' in the model list");
  return index;
}

// Lexicographic order on the ascending term-index sequences of two masks;
// a strict prefix sorts first.
bool mask_seq_less(std::uint64_t a, std::uint64_t b) {
  while (true) {
    if (a == 0 || b == 0) return a == 0 && b != 0;
    const int bit_a = std::countr_zero(a);
    const int bit_b = std::countr_zero(b);
    if (bit_a != bit_b) return bit_a < bit_b;
    a &= a - 1;
    b &= b - 1;
  }
}

std::vector<std::string> split_terms(const std::string& joined) {
  std::vector<std::string> names;
  std::size_t start = 0;
  while (start <= joined.size()) {
    std::size_t end = joined.find('+', start);
    if (end == std::string::npos) end = joined.size();
    std::string piece = joined.substr(start, end - start);
    const auto from = piece.find_first_not_of(" \t");
    const auto to = piece.find_last_not_of(" \t");
    if (from != std::string::npos) names.push_back(piece.substr(from, to - from + 1));
    start = end + 1;
  }
  if (names.empty()) throw DataError("empty term list '" + joined + "'");
  return names;
}

}  // namespace

std::vector<ModelId> default_model_set(const SearchTrace& trace, const PolyDag& dag_y,
                                       const PolyDag& dag_z, Heredity heredity,
                                       std::size_t enumeration_cap) {
  if (dag_y.n_candidates() <= 25 && dag_z.n_candidates() <= 25) {
    const auto space_y = enumerate_component(dag_y, heredity);
    const auto space_z = enumerate_component(dag_z, heredity);
    if (space_y.size() * space_z.size() <= enumeration_cap)
      return enumerate_models(dag_y, dag_z, heredity, enumeration_cap);
  }
  std::set<ModelId> visited(trace.visits.begin(), trace.visits.end());
  visited.insert(trace.kept_models.begin(), trace.kept_models.end());
  visited.insert(trace.last_model);
  if (trace.visits.empty() && trace.kept_models.empty())
    throw ConfigError("cannot form a model set from an empty search trace");
  std::set<ModelId> out = visited;
  for (const ModelId& m : visited) {
    for (std::uint64_t mask : neighborhood(dag_y, m.detection))
      out.insert(ModelId{mask, m.presence});
    for (std::uint64_t mask : neighborhood(dag_z, m.presence))
      out.insert(ModelId{m.detection, mask});
  }
  return {out.begin(), out.end()};
}

PosteriorReport estimate_fpe(const SearchTrace& trace, const std::vector<ModelId>& models) {
  if (models.empty()) throw ConfigError("empty model list");
  if (trace.visits.empty()) throw ConfigError("frequency estimate needs a non-empty trace");
  const auto index = index_of(models);
  const std::size_t t_total = trace.visits.size();
  std::vector<double> counts(models.size(), 0.0);
  BatchMeans batches(t_total, models.size());
  for (std::size_t t = 0; t < t_total; ++t) {
    const auto hit = index.find(trace.visits[t]);
    if (hit == index.end()) continue;
    counts[hit->second] += 1.0;
    batches.add(t, hit->second, 1.0);
  }
  PosteriorReport report;
  report.estimator = "fpe";
  report.models = models;
  report.probability.resize(models.size());
  for (std::size_t k = 0; k < models.size(); ++k)
    report.probability[k] = counts[k] / double(t_total);
  if (batches.active()) {
    report.mc_se.resize(models.size());
    for (std::size_t k = 0; k < models.size(); ++k) report.mc_se[k] = batches.se(k);
  }
  return report;
}

PosteriorReport estimate_rpe(const SearchTrace& trace, ModelSearch& search,
                             const std::vector<ModelId>& models) {
  if (models.empty()) throw ConfigError("empty model list");
  if (trace.kept_v.empty() || trace.kept_v.size() != trace.kept_w.size())
    throw ConfigError("conditional estimate needs stored latent draws");
  index_of(models);  // reject duplicates

  // Deduplicate the component masks: each draw needs one marginal per unique
  // mask, not one per model, and the prior term is draw-independent.
  std::vector<std::uint64_t> masks_z, masks_y;
  std::vector<std::size_t> slot_z(models.size()), slot_y(models.size());
  std::unordered_map<std::uint64_t, std::size_t> seen_z, seen_y;
  std::vector<double> log_prior(models.size());
  for (std::size_t k = 0; k < models.size(); ++k) {
    auto [it_z, new_z] = seen_z.emplace(models[k].presence, masks_z.size());
    if (new_z) masks_z.push_back(models[k].presence);
    slot_z[k] = it_z->second;
    auto [it_y, new_y] = seen_y.emplace(models[k].detection, masks_y.size());
    if (new_y) masks_y.push_back(models[k].detection);
    slot_y[k] = it_y->second;
    log_prior[k] = search.prior().log_prior(models[k]);
  }

  ComponentWorkspace& ws_z = search.presence_workspace();
  ComponentWorkspace& ws_y = search.detection_workspace();
  const std::size_t t_total = trace.kept_v.size();
  std::vector<double> mean(models.size(), 0.0);
  BatchMeans batches(t_total, models.size());
  std::vector<double> lm_z(masks_z.size()), lm_y(masks_y.size()), logs(models.size());
  for (std::size_t t = 0; t < t_total; ++t) {
    const auto proj_v = ws_z.project(trace.kept_v[t]);
    const auto proj_w = ws_y.project(trace.kept_w[t]);
    for (std::size_t i = 0; i < masks_z.size(); ++i) lm_z[i] = ws_z.log_marginal(proj_v, masks_z[i]);
    for (std::size_t i = 0; i < masks_y.size(); ++i) lm_y[i] = ws_y.log_marginal(proj_w, masks_y[i]);
    double top = kNegInf;
    for (std::size_t k = 0; k < models.size(); ++k) {
      logs[k] = lm_z[slot_z[k]] + lm_y[slot_y[k]] + log_prior[k];
      top = std::max(top, logs[k]);
    }
    if (!std::isfinite(top)) throw NumericalError("no model has positive posterior mass");
    double norm = 0.0;
    for (double& l : logs) norm += (l = std::exp(l - top));
    for (std::size_t k = 0; k < models.size(); ++k) {
      const double p = logs[k] / norm;
      mean[k] += p;
      batches.add(t, k, p);
    }
  }
  PosteriorReport report;
  report.estimator = "rpe";
  report.models = models;
  report.probability.resize(models.size());
  for (std::size_t k = 0; k < models.size(); ++k)
    report.probability[k] = mean[k] / double(t_total);
  if (batches.active()) {
    report.mc_se.resize(models.size());
    for (std::size_t k = 0; k < models.size(); ++k) report.mc_se[k] = batches.se(k);
  }
  return report;
}

PosteriorReport estimate_epe(const SurveyData& data, const PolyDag& dag_y,
                             const PolyDag& dag_z, const std::vector<ModelId>& models,
                             const ModelPriorConfig& prior_config, const ChibOptions& options,
                             std::uint64_t seed, int threads, bool standardize) {
  if (models.empty()) throw ConfigError("empty model list");
  index_of(models);
  const ModelPrior prior(dag_y, dag_z, prior_config);

  std::vector<ChibEstimate> estimates(models.size());
  parallel_for(models.size(), threads, [&](std::size_t k) {
    const DesignPair design = build_model_design(data, dag_z, dag_y, models[k], standardize);
    RngStream rng(seed, "chib-model", k);
    estimates[k] = chib_log_marginal(data, design, options, rng);
  });

  std::vector<double> logs(models.size());
  double top = kNegInf;
  for (std::size_t k = 0; k < models.size(); ++k) {
    logs[k] = estimates[k].log_marginal + prior.log_prior(models[k]);
    top = std::max(top, logs[k]);
  }
  if (!std::isfinite(top)) throw NumericalError("no model has positive posterior mass");
  PosteriorReport report;
  report.estimator = "epe";
  report.models = models;
  report.chib = std::move(estimates);
  report.probability.resize(models.size());
  double norm = 0.0;
  for (std::size_t k = 0; k < models.size(); ++k)
    norm += (report.probability[k] = std::exp(logs[k] - top));
  for (double& p : report.probability) p /= norm;

  // Delta method through the softmax: with independent log-marginal errors
  // s_j, Var(p_k) = p_k^2 [ (1-p_k)^2 s_k^2 + sum_{j != k} p_j^2 s_j^2 ].
  report.mc_se.resize(models.size());
  double weighted = 0.0;
  for (std::size_t k = 0; k < models.size(); ++k) {
    const double ps = report.probability[k] * report.chib[k].mc_se;
    weighted += ps * ps;
  }
  for (std::size_t k = 0; k < models.size(); ++k) {
    const double p = report.probability[k];
    const double s = report.chib[k].mc_se;
    const double var =
        p * p * ((1.0 - p) * (1.0 - p) * s * s + weighted - p * p * s * s);
    report.mc_se[k] = std::sqrt(std::max(0.0, var));
  }
  return report;
}

std::uint64_t mpm_mask_from_mpip(const std::vector<double>& mpip, const PolyDag& dag,
                                 double threshold, bool* repaired) {
  if (int(mpip.size()) != dag.n_candidates())
    throw ConfigError("inclusion-probability vector has " + std::to_string(mpip.size()) +
                      " entries for " + std::to_string(dag.n_candidates()) + " candidates");
  std::uint64_t mask = 0;
  for (int b = 0; b < dag.n_candidates(); ++b)
    if (mpip[std::size_t(b)] >= threshold) mask |= std::uint64_t(1) << b;
  const std::uint64_t raw = mask;
  bool grew = true;
  while (grew) {
    grew = false;
    for (int b = 0; b < dag.n_candidates(); ++b) {
      if (!(mask >> b & 1)) continue;
      for (int parent : dag.parents[std::size_t(dag.candidates[std::size_t(b)])]) {
        if (dag.is_base(parent)) continue;
        const std::uint64_t bit = std::uint64_t(1) << dag.candidate_bit[std::size_t(parent)];
        if (!(mask & bit)) {
          mask |= bit;
          grew = true;
        }
      }
    }
  }
  if (repaired) *repaired = mask != raw;
  return mask;
}

SelectionSummary summarize_selection(const PosteriorReport& report, const PolyDag& dag_y,
                                     const PolyDag& dag_z, double threshold) {
  if (report.models.empty() || report.models.size() != report.probability.size())
    throw ConfigError("malformed posterior report");
  SelectionSummary out;
  out.threshold = threshold;
  out.mpip_detection.assign(std::size_t(dag_y.n_candidates()), 0.0);
  out.mpip_presence.assign(std::size_t(dag_z.n_candidates()), 0.0);
  std::size_t best = 0;
  for (std::size_t k = 0; k < report.models.size(); ++k) {
    const ModelId& m = report.models[k];
    const double p = report.probability[k];
    for (int b = 0; b < dag_y.n_candidates(); ++b)
      if (m.detection >> b & 1) out.mpip_detection[std::size_t(b)] += p;
    for (int b = 0; b < dag_z.n_candidates(); ++b)
      if (m.presence >> b & 1) out.mpip_presence[std::size_t(b)] += p;
    if (k == 0) continue;
    const ModelId& top = report.models[best];
    const double p_top = report.probability[best];
    if (p != p_top) {
      if (p > p_top) best = k;
      continue;
    }
    const int terms_k = std::popcount(m.detection) + std::popcount(m.presence);
    const int terms_top = std::popcount(top.detection) + std::popcount(top.presence);
    if (terms_k != terms_top) {
      if (terms_k < terms_top) best = k;
    } else if (m.presence != top.presence) {
      if (mask_seq_less(m.presence, top.presence)) best = k;
    } else if (mask_seq_less(m.detection, top.detection)) {
      best = k;
    }
  }
  out.hpm = report.models[best];
  for (int b = 0; b < dag_y.n_candidates(); ++b)
    if (out.mpip_detection[std::size_t(b)] >= threshold)
      out.mpm_raw.detection |= std::uint64_t(1) << b;
  for (int b = 0; b < dag_z.n_candidates(); ++b)
    if (out.mpip_presence[std::size_t(b)] >= threshold)
      out.mpm_raw.presence |= std::uint64_t(1) << b;
  out.mpm.detection =
      mpm_mask_from_mpip(out.mpip_detection, dag_y, threshold, &out.mpm_repaired_detection);
  out.mpm.presence =
      mpm_mask_from_mpip(out.mpip_presence, dag_z, threshold, &out.mpm_repaired_presence);
  return out;
}

double total_variation(const PosteriorReport& a, const PosteriorReport& b) {
  std::map<ModelId, double> pa, pb;
  for (std::size_t k = 0; k < a.models.size(); ++k) pa[a.models[k]] = a.probability[k];
  for (std::size_t k = 0; k < b.models.size(); ++k) pb[b.models[k]] = b.probability[k];
  double sum = 0.0;
  for (const auto& [model, p] : pa) {
    const auto hit = pb.find(model);
    sum += std::abs(p - (hit == pb.end() ? 0.0 : hit->second));
  }
  for (const auto& [model, p] : pb)
    if (!pa.count(model)) sum += p;
  return 0.5 * sum;
}

void write_posterior_scores(const std::string& path, const PosteriorReport& report,
                            const PolyDag& dag_y, const PolyDag& dag_z) {
  if (report.models.size() != report.probability.size())
    throw ConfigError("malformed posterior report");
  const bool with_se = !report.mc_se.empty();
  const bool with_chib = !report.chib.empty();
  Table table;
  table.columns = {"estimator", "presence", "detection", "probability"};
  if (with_se) table.columns.push_back("mc_se");
  if (with_chib) {
    table.columns.insert(table.columns.end(),
                         {"log_marginal", "chib_se", "chib_iterations", "chib_converged"});
  }
  for (std::size_t k = 0; k < report.models.size(); ++k) {
    std::vector<std::string> row = {report.estimator, dag_z.mask_name(report.models[k].presence),
                                    dag_y.mask_name(report.models[k].detection),
                                    format_double(report.probability[k])};
    if (with_se) row.push_back(format_double(report.mc_se[k]));
    if (with_chib) {
      const ChibEstimate& c = report.chib[k];
      row.push_back(format_double(c.log_marginal));
      row.push_back(format_double(c.mc_se));
      row.push_back(std::to_string(c.iterations_used));
      row.push_back(c.converged ? "1" : "0");
    }
    table.add_row(std::move(row));
  }
  write_delimited(path, table);
}

PosteriorReport read_posterior_scores(const std::string& path, const PolyDag& dag_y,
                                      const PolyDag& dag_z) {
  const Table table = read_delimited(path);
  const int col_est = table.col("estimator");
  const int col_z = table.require_col("presence");
  const int col_y = table.require_col("detection");
  const int col_p = table.require_col("probability");
  const int col_se = table.col("mc_se");
  const int col_lm = table.col("log_marginal");
  const int col_cse = table.col("chib_se");
  const int col_it = table.col("chib_iterations");
  const int col_cv = table.col("chib_converged");
  PosteriorReport report;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::string where = path + " row " + std::to_string(r + 2);
    if (col_est >= 0 && report.estimator.empty()) report.estimator = row[std::size_t(col_est)];
    ModelId model;
    model.presence = dag_z.mask_of_names(split_terms(row[std::size_t(col_z)]));
    model.detection = dag_y.mask_of_names(split_terms(row[std::size_t(col_y)]));
    report.models.push_back(model);
    report.probability.push_back(parse_number(row[std::size_t(col_p)], where + " probability"));
    if (col_se >= 0)
      report.mc_se.push_back(parse_number(row[std::size_t(col_se)], where + " mc_se"));
    if (col_lm >= 0 && col_cse >= 0 && col_it >= 0 && col_cv >= 0) {
      ChibEstimate c;
      c.log_marginal = parse_number(row[std::size_t(col_lm)], where + " log_marginal");
      c.mc_se = parse_number(row[std::size_t(col_cse)], where + " chib_se");
      c.iterations_used = parse_integer(row[std::size_t(col_it)], where + " chib_iterations");
      c.converged = parse_integer(row[std::size_t(col_cv)], where + " chib_converged") != 0;
      report.chib.push_back(c);
    }
  }
  if (report.models.empty()) throw DataError(path + ": no score rows");
  index_of(report.models);
  return report;
}

}  // namespace occsel
