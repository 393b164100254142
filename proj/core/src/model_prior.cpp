#include "occsel/model_prior.hpp"

#include <cmath>
#include <limits>

#include "occsel/errors.hpp"

namespace occsel {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_beta(double a, double b) { return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b); }
}  // namespace

ModelPriorKind model_prior_kind_of(const std::string& name) {
  if (name == "chipman-fixed-theta") return ModelPriorKind::kChipmanFixedTheta;
  if (name == "hup-integrated-theta") return ModelPriorKind::kHupIntegratedTheta;
  if (name == "uniform-over-space") return ModelPriorKind::kUniformOverSpace;
  throw ConfigError("unknown model prior kind '" + name + "'");
}

std::string model_prior_kind_name(ModelPriorKind kind) {
  switch (kind) {
    case ModelPriorKind::kChipmanFixedTheta: return "chipman-fixed-theta";
    case ModelPriorKind::kHupIntegratedTheta: return "hup-integrated-theta";
    case ModelPriorKind::kUniformOverSpace: return "uniform-over-space";
  }
  return "?";
}

ModelPrior::ModelPrior(const PolyDag& dag_y, const PolyDag& dag_z, ModelPriorConfig config)
    : dag_y_(&dag_y), dag_z_(&dag_z), config_(config) {
  if (config_.kind == ModelPriorKind::kChipmanFixedTheta &&
      !(config_.theta > 0.0 && config_.theta < 1.0))
    throw ConfigError("chipman-fixed-theta requires theta in (0,1)");
  if (config_.kind == ModelPriorKind::kUniformOverSpace) {
    log_uniform_y_ = -std::log(double(enumerate_component(dag_y, config_.heredity).size()));
    log_uniform_z_ = -std::log(double(enumerate_component(dag_z, config_.heredity).size()));
  }
}

double ModelPrior::log_component(const PolyDag& dag, std::uint64_t mask,
                                 double log_uniform) const {
  if (!heredity_check(dag, mask, config_.heredity)) return kNegInf;
  if (config_.kind == ModelPriorKind::kUniformOverSpace) return log_uniform;
  int eligible = 0, included = 0;
  for (int b = 0; b < dag.n_candidates(); ++b) {
    const int term = dag.candidates[b];
    bool ok = true;
    for (int p : dag.parents[term]) {
      if (dag.is_base(p)) continue;
      if (!(mask >> dag.candidate_bit[p] & 1)) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    ++eligible;
    if (mask >> b & 1) ++included;
  }
  if (config_.kind == ModelPriorKind::kChipmanFixedTheta)
    return included * std::log(config_.theta) +
           (eligible - included) * std::log1p(-config_.theta);
  return log_beta(included + 1.0, eligible - included + 1.0);
}

double ModelPrior::log_detection(std::uint64_t mask) const {
  return log_component(*dag_y_, mask, log_uniform_y_);
}

double ModelPrior::log_presence(std::uint64_t mask) const {
  return log_component(*dag_z_, mask, log_uniform_z_);
}

double ModelPrior::log_prior(const ModelId& model) const {
  return log_detection(model.detection) + log_presence(model.presence);
}

}  // namespace occsel
