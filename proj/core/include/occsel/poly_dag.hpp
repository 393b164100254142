#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace occsel {

// Monomial in the raw covariates: powers[k] is the exponent of covariate k.
struct PolyTerm {
  std::vector<int> powers;
  int degree() const;
  bool operator==(const PolyTerm& o) const { return powers == o.powers; }
};

enum class Heredity { kStrong, kWeak, kNone };

// Candidate-term DAG for one response component. Terms are kept in canonical
// order (total degree ascending, then lexicographic in the exponent vector);
// an edge runs from each term to the terms obtained by incrementing one
// exponent. Models are bitmasks over the non-base terms: bit b of a mask is
// candidates[b]. Base terms are in every model.
struct PolyDag {
  std::vector<std::string> covariates;
  std::vector<PolyTerm> terms;
  std::vector<int> base;                   // term indices, canonical order; contains the intercept
  std::vector<int> candidates;             // non-base term indices, canonical order
  std::vector<int> candidate_bit;          // term index -> bit, -1 for base terms
  std::vector<std::vector<int>> parents;   // term index -> parent term indices
  std::vector<std::vector<int>> children;  // term index -> child term indices

  int n_candidates() const { return int(candidates.size()); }
  bool is_base(int term) const { return candidate_bit[term] < 0; }
  std::string term_name(int term) const;
  int find_term(const PolyTerm& t) const;  // -1 when absent

  // Parse "elev*forest", "date^2", "1" (names joined by '+' allowed in
  // mask_of_names) against this DAG's terms.
  int term_of_name(const std::string& name) const;
  std::uint64_t mask_of_names(const std::vector<std::string>& names) const;
  std::string mask_name(std::uint64_t mask) const;  // "1" for the empty mask
};

// All monomials with per-covariate exponent <= degree cap and total degree
// <= max_degree; pure powers only unless `interactions`. `degree_overrides`
// replaces max_degree for named covariates. `extra_base` terms (beyond the
// intercept, which is always base) are pinned into every model.
PolyDag build_poly_dag(const std::vector<std::string>& covariates, int max_degree,
                       bool interactions,
                       const std::vector<PolyTerm>& extra_base = {},
                       const std::map<std::string, int>& degree_overrides = {});

bool heredity_check(const PolyDag& dag, std::uint64_t mask, Heredity mode);

// Single-term additions whose parents are all present, and single-term
// removals that leave no orphaned child. Every member satisfies strong
// heredity when `mask` does, and the move relation is symmetric.
std::vector<std::uint64_t> neighborhood(const PolyDag& dag, std::uint64_t mask);

// Masks satisfying `mode`, ascending. Guard: component DAGs past 25
// candidates are rejected before the 2^K sweep.
std::vector<std::uint64_t> enumerate_component(const PolyDag& dag, Heredity mode);

// Joint model over both components.
struct ModelId {
  std::uint64_t detection = 0;  // mask over dag_y candidates
  std::uint64_t presence = 0;   // mask over dag_z candidates
  bool operator==(const ModelId& o) const = default;
  auto operator<=>(const ModelId& o) const = default;
};

// Cartesian product of the component enumerations, presence-major, guarded by
// `max_models` (joint count).
std::vector<ModelId> enumerate_models(const PolyDag& dag_y, const PolyDag& dag_z, Heredity mode,
                                      std::size_t max_models = 1000000);

}  // namespace occsel
