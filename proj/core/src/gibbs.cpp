#include "occsel/gibbs.hpp"

#include <cmath>

#include "occsel/errors.hpp"
#include "occsel/normal.hpp"
#include "occsel/truncated_normal.hpp"

namespace occsel {

namespace {
constexpr double kLogTwoPi = 1.8378770664093454836;
}

double observed_data_loglik(const SurveyData& data, const DesignPair& design,
                            const CoefficientState& coeffs) {
  return observed_data_loglik_lp(data, design.X * coeffs.alpha, design.Q * coeffs.lambda);
}

double observed_data_loglik_lp(const SurveyData& data, const Eigen::VectorXd& lp_z,
                               const Eigen::VectorXd& lp_w) {
  double ll = 0.0;
  for (int i = 0; i < data.n_sites(); ++i) {
    const int off = data.site_offset[i];
    if (data.detected[i]) {
      ll += log_norm_cdf(lp_z[i]);
      for (int j = 0; j < data.n_surveys[i]; ++j)
        ll += data.y[off + j] ? log_norm_cdf(lp_w[off + j]) : log_norm_cdf(-lp_w[off + j]);
    } else {
      double misses = 0.0;
      for (int j = 0; j < data.n_surveys[i]; ++j) misses += log_norm_cdf(-lp_w[off + j]);
      ll += log_sum_exp(log_norm_cdf(lp_z[i]) + misses, log_norm_cdf(-lp_z[i]));
    }
  }
  return ll;
}

Eigen::VectorXd presence_conditional(const SurveyData& data, const DesignPair& design,
                                     const CoefficientState& coeffs) {
  return presence_conditional_lp(data, design.X * coeffs.alpha, design.Q * coeffs.lambda);
}

Eigen::VectorXd presence_conditional_lp(const SurveyData& data, const Eigen::VectorXd& lp_z,
                                        const Eigen::VectorXd& lp_w) {
  Eigen::VectorXd xi(data.n_sites());
  for (int i = 0; i < data.n_sites(); ++i) {
    if (data.detected[i]) {
      xi[i] = 1.0;
      continue;
    }
    const int off = data.site_offset[i];
    double misses = 0.0;
    for (int j = 0; j < data.n_surveys[i]; ++j) misses += log_norm_cdf(-lp_w[off + j]);
    const double occupied = log_norm_cdf(lp_z[i]) + misses;
    const double empty = log_norm_cdf(-lp_z[i]);
    xi[i] = std::exp(occupied - log_sum_exp(occupied, empty));
  }
  return xi;
}

std::vector<std::int8_t> sample_presence_indicators(const SurveyData& data,
                                                    const DesignPair& design,
                                                    const CoefficientState& coeffs,
                                                    RngStream& rng) {
  return sample_presence_indicators_lp(data, design.X * coeffs.alpha,
                                       design.Q * coeffs.lambda, rng);
}

std::vector<std::int8_t> sample_presence_indicators_lp(const SurveyData& data,
                                                       const Eigen::VectorXd& lp_z,
                                                       const Eigen::VectorXd& lp_w,
                                                       RngStream& rng) {
  const Eigen::VectorXd xi = presence_conditional_lp(data, lp_z, lp_w);
  std::vector<std::int8_t> z(data.n_sites());
  for (int i = 0; i < data.n_sites(); ++i)
    z[i] = data.detected[i] ? 1 : std::int8_t(rng.bernoulli(xi[i]));
  return z;
}

void sample_latent_gaussians(const SurveyData& data, const DesignPair& design,
                             const CoefficientState& coeffs, const std::vector<std::int8_t>& z,
                             RngStream& rng, Eigen::VectorXd& v, Eigen::VectorXd& w) {
  sample_latent_gaussians_lp(data, design.X * coeffs.alpha, design.Q * coeffs.lambda, z, rng,
                             v, w);
}

void sample_latent_gaussians_lp(const SurveyData& data, const Eigen::VectorXd& lp_z,
                                const Eigen::VectorXd& lp_w, const std::vector<std::int8_t>& z,
                                RngStream& rng, Eigen::VectorXd& v, Eigen::VectorXd& w) {
  v.resize(data.n_sites());
  w.resize(data.total_surveys());
  for (int i = 0; i < data.n_sites(); ++i)
    v[i] = z[i] ? rtnorm_lower(rng, lp_z[i], 0.0) : rtnorm_upper(rng, lp_z[i], 0.0);
  for (int i = 0; i < data.n_sites(); ++i) {
    const int off = data.site_offset[i];
    for (int j = 0; j < data.n_surveys[i]; ++j) {
      const int r = off + j;
      if (!z[i])
        w[r] = lp_w[r] + rng.normal();
      else
        w[r] = data.y[r] ? rtnorm_lower(rng, lp_w[r], 0.0) : rtnorm_upper(rng, lp_w[r], 0.0);
    }
  }
}

ComponentCoefSampler::ComponentCoefSampler(const Eigen::MatrixXd& design, int p_base,
                                           double ridge_in) {
  p0 = p_base;
  pa = int(design.cols()) - p_base;
  ridge = ridge_in;
  x0 = design.leftCols(p0);
  Eigen::MatrixXd g0 = x0.transpose() * x0;
  Eigen::LLT<Eigen::MatrixXd> plain(g0);
  if (plain.info() != Eigen::Success) throw NumericalError("singular base Gram block");
  g0.diagonal().array() += ridge;
  llt0.compute(g0);
  if (llt0.info() != Eigen::Success) throw NumericalError("singular base Gram block");
  log_det0 = 2.0 * llt0.matrixLLT().diagonal().array().log().sum();
  const double n2 = 2.0 * design.rows();
  shrink = n2 / (n2 + design.cols());
  if (pa > 0) {
    // Candidate columns residualized against the base block: the coefficient
    // conditional factorizes into independent blocks exactly there, with the
    // base Schur complement as the candidate Gram. Against raw columns the
    // blocks are coupled whenever base and candidates are not orthogonal
    // (squares and interactions of centered covariates are not).
    xa = design.rightCols(pa);
    xa -= x0 * plain.solve(x0.transpose() * xa);
    llta.compute(xa.transpose() * xa);
    if (llta.info() != Eigen::Success)
      throw NumericalError("singular candidate Gram block");
    log_deta = 2.0 * llta.matrixLLT().diagonal().array().log().sum();
  }
}

Eigen::VectorXd ComponentCoefSampler::draw(const Eigen::VectorXd& latent,
                                           RngStream& rng) const {
  Eigen::VectorXd coef(p0 + pa);
  Eigen::VectorXd eta0(p0);
  for (int j = 0; j < p0; ++j) eta0[j] = rng.normal();
  coef.head(p0) = llt0.solve(x0.transpose() * latent) + llt0.matrixU().solve(eta0);
  if (pa > 0) {
    Eigen::VectorXd etaa(pa);
    for (int j = 0; j < pa; ++j) etaa[j] = rng.normal();
    coef.tail(pa) = shrink * llta.solve(xa.transpose() * latent) +
                    std::sqrt(shrink) * llta.matrixU().solve(etaa);
  }
  return coef;
}

double ComponentCoefSampler::log_ordinate(const Eigen::VectorXd& latent,
                                          const Eigen::VectorXd& at) const {
  const Eigen::VectorXd m0 = llt0.solve(x0.transpose() * latent);
  double out = -0.5 * p0 * kLogTwoPi + 0.5 * log_det0 -
               0.5 * (llt0.matrixU() * (at.head(p0) - m0)).squaredNorm();
  if (pa > 0) {
    const Eigen::VectorXd ma = shrink * llta.solve(xa.transpose() * latent);
    out += -0.5 * pa * kLogTwoPi + 0.5 * (log_deta - pa * std::log(shrink)) -
           0.5 / shrink * (llta.matrixU() * (at.tail(pa) - ma)).squaredNorm();
  }
  return out;
}

double ComponentCoefSampler::log_ridge_prior(const Eigen::VectorXd& coef) const {
  if (ridge <= 0.0) return 0.0;
  return -0.5 * p0 * kLogTwoPi + 0.5 * p0 * std::log(ridge) -
         0.5 * ridge * coef.head(p0).squaredNorm();
}

Eigen::VectorXd ComponentCoefSampler::linear_predictor(const Eigen::VectorXd& coef) const {
  Eigen::VectorXd lp = x0 * coef.head(p0);
  if (pa > 0) lp += xa * coef.tail(pa);
  return lp;
}

CoefficientState sample_coefficients(const Eigen::VectorXd& v, const Eigen::VectorXd& w,
                                     const ComponentCoefSampler& presence,
                                     const ComponentCoefSampler& detection, RngStream& rng) {
  CoefficientState out;
  out.alpha = presence.draw(v, rng);
  out.lambda = detection.draw(w, rng);
  return out;
}

SingleModelSampler::SingleModelSampler(const SurveyData& data, const DesignPair& design,
                                       double base_ridge)
    : data_(data),
      design_(design),
      presence_(design.X, design.p_base_z, base_ridge),
      detection_(design.Q, design.p_base_y, base_ridge) {}

void SingleModelSampler::initialize(RngStream& rng) {
  coeffs_.alpha = Eigen::VectorXd::Zero(design_.X.cols());
  coeffs_.lambda = Eigen::VectorXd::Zero(design_.Q.cols());
  refresh_latents(rng);
}

void SingleModelSampler::refresh_coefficients(RngStream& rng) {
  coeffs_ = sample_coefficients(latents_.v, latents_.w, presence_, detection_, rng);
}

void SingleModelSampler::refresh_latents(RngStream& rng) {
  const Eigen::VectorXd lp_z = presence_.linear_predictor(coeffs_.alpha);
  const Eigen::VectorXd lp_w = detection_.linear_predictor(coeffs_.lambda);
  latents_.z = sample_presence_indicators_lp(data_, lp_z, lp_w, rng);
  sample_latent_gaussians_lp(data_, lp_z, lp_w, latents_.z, rng, latents_.v, latents_.w);
}

void SingleModelSampler::sweep(RngStream& rng) {
  refresh_coefficients(rng);
  refresh_latents(rng);
}

double SingleModelSampler::log_coefficient_ordinate(const CoefficientState& point) const {
  return presence_.log_ordinate(latents_.v, point.alpha) +
         detection_.log_ordinate(latents_.w, point.lambda);
}

double SingleModelSampler::loglik(const CoefficientState& point) const {
  return observed_data_loglik_lp(data_, presence_.linear_predictor(point.alpha),
                                 detection_.linear_predictor(point.lambda));
}

void SingleModelSampler::forward_simulate(RngStream& rng) {
  const Eigen::VectorXd lp_z = presence_.linear_predictor(coeffs_.alpha);
  const Eigen::VectorXd lp_w = detection_.linear_predictor(coeffs_.lambda);
  latents_.v.resize(data_.n_sites());
  latents_.w.resize(data_.total_surveys());
  latents_.z.assign(std::size_t(data_.n_sites()), 0);
  for (int i = 0; i < data_.n_sites(); ++i) {
    latents_.v[i] = lp_z[i] + rng.normal();
    latents_.z[i] = latents_.v[i] > 0.0;
  }
  for (int r = 0; r < data_.total_surveys(); ++r) latents_.w[r] = lp_w[r] + rng.normal();
  for (int i = 0; i < data_.n_sites(); ++i) {
    const int off = data_.site_offset[i];
    std::int8_t any = 0;
    for (int j = 0; j < data_.n_surveys[i]; ++j) {
      data_.y[off + j] = std::int8_t(latents_.z[i] && latents_.w[off + j] > 0.0);
      any |= data_.y[off + j];
    }
    data_.detected[i] = any;
  }
}

ChainDraws run_single_model_chain(const SurveyData& data, const DesignPair& design,
                                  const ChainConfig& config) {
  if (config.iterations <= config.burn_in)
    throw ConfigError("chain iterations must exceed burn_in");
  if (config.thin < 1) throw ConfigError("thin must be >= 1");
  SingleModelSampler sampler(data, design, config.base_ridge);
  RngStream rng(config.seed, "single-model-chain");
  sampler.initialize(rng);
  ChainDraws draws;
  for (long long t = 0; t < config.iterations; ++t) {
    sampler.sweep(rng);
    if (t >= config.burn_in && (t - config.burn_in) % config.thin == 0) {
      draws.coefficients.push_back(sampler.coefficients());
      draws.latents.push_back(sampler.latents());
    }
  }
  return draws;
}

}  // namespace occsel
