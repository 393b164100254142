#include "occsel/poly_dag.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "occsel/errors.hpp"

namespace occsel {

int PolyTerm::degree() const { return std::accumulate(powers.begin(), powers.end(), 0); }

namespace {

// Total degree ascending; within a degree, earlier covariates and higher
// exponents first, so {date, ivel} at degree 2 reads date^2, date*ivel,
// ivel^2.
bool canonical_less(const PolyTerm& a, const PolyTerm& b) {
  const int da = a.degree(), db = b.degree();
  if (da != db) return da < db;
  return a.powers > b.powers;
}

}  // namespace

std::string PolyDag::term_name(int term) const {
  const PolyTerm& t = terms[term];
  std::ostringstream out;
  bool any = false;
  for (std::size_t k = 0; k < covariates.size(); ++k) {
    if (t.powers[k] == 0) continue;
    if (any) out << "*";
    out << covariates[k];
    if (t.powers[k] > 1) out << "^" << t.powers[k];
    any = true;
  }
  return any ? out.str() : "1";
}

int PolyDag::find_term(const PolyTerm& t) const {
  for (std::size_t i = 0; i < terms.size(); ++i)
    if (terms[i] == t) return int(i);
  return -1;
}

int PolyDag::term_of_name(const std::string& name) const {
  PolyTerm t;
  t.powers.assign(covariates.size(), 0);
  if (name != "1") {
    std::istringstream ss(name);
    std::string factor;
    while (std::getline(ss, factor, '*')) {
      std::string cov = factor;
      int power = 1;
      if (auto caret = factor.find('^'); caret != std::string::npos) {
        cov = factor.substr(0, caret);
        power = std::stoi(factor.substr(caret + 1));
      }
      auto it = std::find(covariates.begin(), covariates.end(), cov);
      if (it == covariates.end())
        throw ConfigError("unknown covariate '" + cov + "' in term '" + name + "'");
      t.powers[it - covariates.begin()] += power;
    }
  }
  int idx = find_term(t);
  if (idx < 0) throw ConfigError("term '" + name + "' is not in the model space");
  return idx;
}

std::uint64_t PolyDag::mask_of_names(const std::vector<std::string>& names) const {
  std::uint64_t mask = 0;
  for (const auto& name : names) {
    const int term = term_of_name(name);
    if (is_base(term)) continue;  // base terms are implicit
    mask |= std::uint64_t(1) << candidate_bit[term];
  }
  return mask;
}

std::string PolyDag::mask_name(std::uint64_t mask) const {
  std::string out;
  for (int b = 0; b < n_candidates(); ++b)
    if (mask >> b & 1) {
      if (!out.empty()) out += "+";
      out += term_name(candidates[b]);
    }
  return out.empty() ? "1" : out;
}

PolyDag build_poly_dag(const std::vector<std::string>& covariates, int max_degree,
                       bool interactions, const std::vector<PolyTerm>& extra_base,
                       const std::map<std::string, int>& degree_overrides) {
  if (max_degree < 1) throw ConfigError("max_degree must be >= 1");
  for (std::size_t i = 0; i < covariates.size(); ++i)
    for (std::size_t j = i + 1; j < covariates.size(); ++j)
      if (covariates[i] == covariates[j])
        throw ConfigError("duplicate covariate '" + covariates[i] + "'");

  PolyDag dag;
  dag.covariates = covariates;
  const int k = int(covariates.size());
  std::vector<int> cap(k, max_degree);
  for (const auto& [name, deg] : degree_overrides) {
    auto it = std::find(covariates.begin(), covariates.end(), name);
    if (it == covariates.end())
      throw ConfigError("degree override for unknown covariate '" + name + "'");
    if (deg < 0) throw ConfigError("negative degree for covariate '" + name + "'");
    cap[it - covariates.begin()] = deg;
  }
  if (!interactions) {
    // Pure powers only: the intercept plus x_k^d up to each covariate's cap.
    dag.terms.push_back(PolyTerm{std::vector<int>(k, 0)});
    for (int j = 0; j < k; ++j)
      for (int d = 1; d <= cap[j]; ++d) {
        PolyTerm t{std::vector<int>(k, 0)};
        t.powers[j] = d;
        dag.terms.push_back(t);
      }
  } else {
    double cells = 1.0;
    for (int j = 0; j < k; ++j) cells *= cap[j] + 1.0;
    if (cells > 8e6) throw ConfigError("candidate term lattice too large to enumerate");
    // Count exponent vectors in mixed radix. The radix caps bound each
    // exponent; pure powers are admitted outright, while interaction terms
    // also respect the total-degree bound.
    std::vector<int> e(k, 0);
    for (;;) {
      const int total = std::accumulate(e.begin(), e.end(), 0);
      const int positive = int(std::count_if(e.begin(), e.end(), [](int p) { return p > 0; }));
      if (positive <= 1 || total <= max_degree) dag.terms.push_back(PolyTerm{e});
      int j = 0;
      for (; j < k; ++j) {
        if (e[j] < cap[j]) {
          ++e[j];
          break;
        }
        e[j] = 0;
      }
      if (j == k) break;
    }
  }
  std::sort(dag.terms.begin(), dag.terms.end(), canonical_less);

  // Base set: intercept plus any requested extra terms.
  std::vector<bool> in_base(dag.terms.size(), false);
  in_base[0] = true;  // canonical order puts the intercept first
  for (const auto& t : extra_base) {
    if (int(t.powers.size()) != k) throw ConfigError("base term arity mismatch");
    const int idx = dag.find_term(t);
    if (idx < 0) throw ConfigError("base term is not an admissible model term");
    in_base[idx] = true;
  }

  dag.candidate_bit.assign(dag.terms.size(), -1);
  for (std::size_t i = 0; i < dag.terms.size(); ++i) {
    if (in_base[i]) {
      dag.base.push_back(int(i));
    } else {
      dag.candidate_bit[i] = int(dag.candidates.size());
      dag.candidates.push_back(int(i));
    }
  }
  if (dag.n_candidates() > 63)
    throw ConfigError("model space exceeds 63 candidate terms per component");

  dag.parents.resize(dag.terms.size());
  dag.children.resize(dag.terms.size());
  for (std::size_t i = 0; i < dag.terms.size(); ++i) {
    for (int j = 0; j < k; ++j) {
      if (dag.terms[i].powers[j] == 0) continue;
      PolyTerm parent = dag.terms[i];
      --parent.powers[j];
      const int p = dag.find_term(parent);
      // Decrementing keeps every cap satisfied, so the parent always exists.
      dag.parents[i].push_back(p);
      dag.children[p].push_back(int(i));
    }
  }
  // Base terms are in every model, so their ancestry must be base too or the
  // heredity invariants could never hold.
  for (int t : dag.base)
    for (int p : dag.parents[t])
      if (!in_base[p])
        throw ConfigError("base term '" + dag.term_name(t) + "' has non-base parent '" +
                          dag.term_name(p) + "'");
  return dag;
}

namespace {

bool parents_present(const PolyDag& dag, std::uint64_t mask, int term) {
  for (int p : dag.parents[term]) {
    if (dag.is_base(p)) continue;
    if (!(mask >> dag.candidate_bit[p] & 1)) return false;
  }
  return true;
}

}  // namespace

bool heredity_check(const PolyDag& dag, std::uint64_t mask, Heredity mode) {
  if (mode == Heredity::kNone) return true;
  if (mode == Heredity::kStrong) {
    for (int b = 0; b < dag.n_candidates(); ++b)
      if ((mask >> b & 1) && !parents_present(dag, mask, dag.candidates[b])) return false;
    return true;
  }
  // Weak heredity: every included term is reached from the base along a
  // directed path through included terms. Grow the supported set to fixpoint.
  std::vector<bool> supported(dag.terms.size(), false);
  for (int t : dag.base) supported[t] = true;
  bool changed = true;
  while (changed) {
    changed = false;
    for (int b = 0; b < dag.n_candidates(); ++b) {
      const int t = dag.candidates[b];
      if (!(mask >> b & 1) || supported[t]) continue;
      for (int p : dag.parents[t])
        if (supported[p]) {
          supported[t] = true;
          changed = true;
          break;
        }
    }
  }
  for (int b = 0; b < dag.n_candidates(); ++b)
    if ((mask >> b & 1) && !supported[dag.candidates[b]]) return false;
  return true;
}

std::vector<std::uint64_t> neighborhood(const PolyDag& dag, std::uint64_t mask) {
  std::vector<std::uint64_t> moves;
  for (int b = 0; b < dag.n_candidates(); ++b) {
    if (mask >> b & 1) continue;
    if (parents_present(dag, mask, dag.candidates[b]))
      moves.push_back(mask | std::uint64_t(1) << b);
  }
  for (int b = 0; b < dag.n_candidates(); ++b) {
    if (!(mask >> b & 1)) continue;
    bool orphan = false;
    for (int c : dag.children[dag.candidates[b]]) {
      if (dag.is_base(c)) continue;  // base terms never leave the model
      if (mask >> dag.candidate_bit[c] & 1) {
        orphan = true;
        break;
      }
    }
    if (!orphan) moves.push_back(mask & ~(std::uint64_t(1) << b));
  }
  return moves;
}

std::vector<std::uint64_t> enumerate_component(const PolyDag& dag, Heredity mode) {
  if (dag.n_candidates() > 25)
    throw ConfigError("component model space too large to enumerate (" +
                      std::to_string(dag.n_candidates()) + " candidate terms)");
  std::vector<std::uint64_t> out;
  const std::uint64_t top = std::uint64_t(1) << dag.n_candidates();
  for (std::uint64_t mask = 0; mask < top; ++mask)
    if (heredity_check(dag, mask, mode)) out.push_back(mask);
  return out;
}

std::vector<ModelId> enumerate_models(const PolyDag& dag_y, const PolyDag& dag_z, Heredity mode,
                                      std::size_t max_models) {
  const auto ys = enumerate_component(dag_y, mode);
  const auto zs = enumerate_component(dag_z, mode);
  if (ys.size() * zs.size() > max_models)
    throw ConfigError("joint model space has " + std::to_string(ys.size() * zs.size()) +
                      " models, above the cap of " + std::to_string(max_models));
  std::vector<ModelId> out;
  out.reserve(ys.size() * zs.size());
  for (auto z : zs)
    for (auto y : ys) out.push_back(ModelId{y, z});
  return out;
}

}  // namespace occsel
