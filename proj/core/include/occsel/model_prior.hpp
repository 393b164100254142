#pragma once

#include <string>

#include "occsel/poly_dag.hpp"

namespace occsel {

// Hierarchical model priors. Both structured kinds work through the set E(M)
// of eligible terms — candidates whose parents all sit in M or the base — and
// k(M) = |E(M) ∩ M|:
//   kChipmanFixedTheta:   log pi = k log(theta) + (|E|-k) log(1-theta)
//   kHupIntegratedTheta:  log pi = log Beta(k+1, |E|-k+1)   (theta integrated out)
//   kUniformOverSpace:    -log |component enumeration|
// Each sums to one over the strong-heredity enumeration, and the joint prior
// is the product of the component priors.
enum class ModelPriorKind { kChipmanFixedTheta, kHupIntegratedTheta, kUniformOverSpace };

struct ModelPriorConfig {
  ModelPriorKind kind = ModelPriorKind::kHupIntegratedTheta;
  double theta = 0.5;  // kChipmanFixedTheta only, in (0,1)
  Heredity heredity = Heredity::kStrong;
};

ModelPriorKind model_prior_kind_of(const std::string& name);
std::string model_prior_kind_name(ModelPriorKind kind);

class ModelPrior {
 public:
  ModelPrior(const PolyDag& dag_y, const PolyDag& dag_z, ModelPriorConfig config);

  // -inf for masks violating the configured heredity mode.
  double log_detection(std::uint64_t mask) const;
  double log_presence(std::uint64_t mask) const;
  double log_prior(const ModelId& model) const;

  const ModelPriorConfig& config() const { return config_; }

 private:
  double log_component(const PolyDag& dag, std::uint64_t mask, double log_uniform) const;
  const PolyDag* dag_y_;
  const PolyDag* dag_z_;
  ModelPriorConfig config_;
  double log_uniform_y_ = 0.0;  // -log |enumeration|, filled for kUniformOverSpace
  double log_uniform_z_ = 0.0;
};

}  // namespace occsel
