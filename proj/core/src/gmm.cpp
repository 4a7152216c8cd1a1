#include "policyfuzz/gmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

#include "policyfuzz/rng.hpp"

namespace policyfuzz {

namespace {

constexpr double kLog2Pi = 1.8378770664093453;

bool is_diagonal(const Eigen::MatrixXd& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      if (i != j && m(i, j) != 0.0) return false;
  return true;
}

}  // namespace

GaussianComponent::GaussianComponent(Eigen::VectorXd mean, Eigen::MatrixXd covariance,
                                     double weight)
    : mean_(std::move(mean)), covariance_(std::move(covariance)), weight_(weight) {
  const auto d = mean_.size();
  if (covariance_.rows() != d || covariance_.cols() != d)
    throw std::invalid_argument("GaussianComponent: covariance shape mismatch");
  if (!(weight_ > 0.0))
    throw std::invalid_argument("GaussianComponent: weight must be positive");
  if (!mean_.allFinite() || !covariance_.allFinite())
    throw std::invalid_argument("GaussianComponent: non-finite parameters");

  diagonal_ = is_diagonal(covariance_);
  if (diagonal_) {
    inv_variance_.resize(d);
    double sum_log_sd = 0.0;
    for (Eigen::Index i = 0; i < d; ++i) {
      const double v = covariance_(i, i);
      if (!(v > 0.0)) throw std::invalid_argument("GaussianComponent: non-positive variance");
      inv_variance_[i] = 1.0 / v;
      sum_log_sd += 0.5 * std::log(v);
    }
    log_norm_ = -0.5 * static_cast<double>(d) * kLog2Pi - sum_log_sd;
    return;
  }

  Eigen::MatrixXd cov = covariance_;
  double bump = kCovarianceFloor;
  for (int attempt = 0;; ++attempt) {
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() == Eigen::Success) {
      chol_lower_ = llt.matrixL();
      break;
    }
    if (attempt >= 40) throw std::invalid_argument("GaussianComponent: covariance not PD");
    cov.diagonal().array() += bump;
    bump *= 10.0;
  }
  double sum_log_diag = 0.0;
  for (Eigen::Index i = 0; i < d; ++i) sum_log_diag += std::log(chol_lower_(i, i));
  log_norm_ = -0.5 * static_cast<double>(d) * kLog2Pi - sum_log_diag;
}

double GaussianComponent::log_pdf(const Eigen::VectorXd& x) const {
  if (x.size() != mean_.size())
    throw std::invalid_argument("log_pdf: dimension mismatch");
  double quad;
  if (diagonal_) {
    quad = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      const double diff = x[i] - mean_[i];
      quad += diff * diff * inv_variance_[i];
    }
  } else {
    quad = chol_lower_.triangularView<Eigen::Lower>().solve(x - mean_).squaredNorm();
  }
  // Outlandish but finite inputs must map to a finite log density.
  if (!std::isfinite(quad)) return -std::numeric_limits<double>::max();
  return log_norm_ - 0.5 * quad;
}

GmmParams::GmmParams(std::vector<GaussianComponent> components)
    : components_(std::move(components)) {
  if (components_.empty()) throw std::invalid_argument("GmmParams: no components");
  dim_ = components_.front().dim();
  double weight_sum = 0.0;
  for (const auto& c : components_) {
    if (c.dim() != dim_) throw std::invalid_argument("GmmParams: mixed dimensions");
    weight_sum += c.weight();
  }
  if (std::abs(weight_sum - 1.0) > 1e-9)
    throw std::invalid_argument("GmmParams: weights do not sum to 1");
}

GmmParams gmm_init(int dim, int K, const std::vector<Eigen::VectorXd>& seed_samples,
                   std::uint64_t rng_seed) {
  if (dim < 1) throw std::invalid_argument("gmm_init: dim must be >= 1");
  if (K < 1) throw std::invalid_argument("gmm_init: K must be >= 1");
  for (const auto& s : seed_samples)
    if (s.size() != dim) throw std::invalid_argument("gmm_init: sample dimension mismatch");

  RngStream rng(rng_seed);
  const double weight = 1.0 / static_cast<double>(K);

  Eigen::MatrixXd covariance = Eigen::MatrixXd::Identity(dim, dim);
  if (!seed_samples.empty()) {
    const auto n = static_cast<double>(seed_samples.size());
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(dim);
    for (const auto& s : seed_samples) mean += s;
    mean /= n;
    Eigen::VectorXd variance = Eigen::VectorXd::Zero(dim);
    for (const auto& s : seed_samples) variance += (s - mean).cwiseAbs2();
    variance /= n;
    for (int i = 0; i < dim; ++i)
      covariance(i, i) = std::max(variance[i], kCovarianceFloor);
  }

  std::vector<Eigen::VectorXd> means;
  means.reserve(K);
  if (static_cast<int>(seed_samples.size()) >= K) {
    // Partial Fisher-Yates: K distinct sample indices.
    std::vector<std::size_t> idx(seed_samples.size());
    std::iota(idx.begin(), idx.end(), 0);
    for (int k = 0; k < K; ++k) {
      const auto j = static_cast<std::size_t>(
          rng.uniform_int(k, static_cast<std::int64_t>(idx.size()) - 1));
      std::swap(idx[k], idx[j]);
      means.push_back(seed_samples[idx[k]]);
    }
  } else {
    for (int k = 0; k < K; ++k) {
      Eigen::VectorXd m(dim);
      for (int i = 0; i < dim; ++i) m[i] = rng.normal();
      means.push_back(std::move(m));
    }
  }

  std::vector<GaussianComponent> components;
  components.reserve(K);
  for (int k = 0; k < K; ++k)
    components.emplace_back(means[k], covariance, weight);
  return GmmParams(std::move(components));
}

namespace {

// Per-component log joint log(w_k) + log N(x; mu_k, Sigma_k).
Eigen::VectorXd log_joint(const GmmParams& params, const Eigen::VectorXd& x) {
  const auto& comps = params.components();
  Eigen::VectorXd lj(comps.size());
  for (std::size_t k = 0; k < comps.size(); ++k)
    lj[static_cast<Eigen::Index>(k)] = std::log(comps[k].weight()) + comps[k].log_pdf(x);
  return lj;
}

double log_sum_exp(const Eigen::VectorXd& v) {
  const double m = v.maxCoeff();
  if (!std::isfinite(m)) return m;
  double sum = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) sum += std::exp(v[i] - m);
  return m + std::log(sum);
}

// Re-derives one component from raw statistics. mass is the component's share
// of the total, weight the already-normalized mixture weight.
GaussianComponent derive_component(double mass, const Eigen::VectorXd& first,
                                   const Eigen::MatrixXd& second, double weight) {
  const auto dim = first.size();
  Eigen::VectorXd mean = first / mass;
  Eigen::MatrixXd cov = second / mass - mean * mean.transpose();
  cov = 0.5 * (cov + cov.transpose()).eval();
  if (dim > kFullCovarianceMaxDim) {
    const Eigen::VectorXd diag = cov.diagonal();
    cov = diag.asDiagonal();
  }
  cov.diagonal().array() += kCovarianceFloor;
  return GaussianComponent(std::move(mean), std::move(cov), weight);
}

}  // namespace

double log_density(const GmmParams& params, const Eigen::VectorXd& x) {
  if (x.size() != params.dim()) throw std::invalid_argument("log_density: dimension mismatch");
  return log_sum_exp(log_joint(params, x));
}

Eigen::VectorXd responsibilities(const GmmParams& params, const Eigen::VectorXd& x) {
  if (x.size() != params.dim())
    throw std::invalid_argument("responsibilities: dimension mismatch");
  const Eigen::VectorXd lj = log_joint(params, x);
  const double lse = log_sum_exp(lj);
  Eigen::VectorXd r(lj.size());
  for (Eigen::Index k = 0; k < lj.size(); ++k) r[k] = std::exp(lj[k] - lse);
  r /= r.sum();
  return r;
}

SufficientStats SufficientStats::from_params(const GmmParams& params) {
  SufficientStats stats;
  const auto& comps = params.components();
  stats.mass.reserve(comps.size());
  stats.first_moment.reserve(comps.size());
  stats.second_moment.reserve(comps.size());
  for (const auto& c : comps) {
    stats.mass.push_back(c.weight());
    stats.first_moment.push_back(c.weight() * c.mean());
    stats.second_moment.push_back(
        c.weight() * (c.covariance() + c.mean() * c.mean().transpose()));
  }
  return stats;
}

DynemResult dynem_update(const GmmParams& params, const SufficientStats& stats,
                         const Eigen::VectorXd& x, double gamma) {
  if (gamma < 0.0 || gamma > 1.0)
    throw std::invalid_argument("dynem_update: gamma outside [0, 1]");
  if (x.size() != params.dim())
    throw std::invalid_argument("dynem_update: dimension mismatch");
  const auto K = static_cast<std::size_t>(params.component_count());
  if (stats.mass.size() != K || stats.first_moment.size() != K ||
      stats.second_moment.size() != K)
    throw std::invalid_argument("dynem_update: stats shape mismatch");

  if (gamma == 0.0) return {params, stats};

  const Eigen::VectorXd r = responsibilities(params, x);
  const Eigen::MatrixXd outer = x * x.transpose();

  SufficientStats next;
  next.mass.resize(K);
  next.first_moment.resize(K);
  next.second_moment.resize(K);
  double total = 0.0;
  for (std::size_t k = 0; k < K; ++k) {
    const double rk = r[static_cast<Eigen::Index>(k)];
    next.mass[k] = std::max((1.0 - gamma) * stats.mass[k] + gamma * rk, 1e-12);
    next.first_moment[k] = (1.0 - gamma) * stats.first_moment[k] + gamma * rk * x;
    next.second_moment[k] = (1.0 - gamma) * stats.second_moment[k] + gamma * rk * outer;
    total += next.mass[k];
  }

  std::vector<GaussianComponent> components;
  components.reserve(K);
  for (std::size_t k = 0; k < K; ++k)
    components.push_back(derive_component(next.mass[k], next.first_moment[k],
                                          next.second_moment[k], next.mass[k] / total));
  return {GmmParams(std::move(components)), std::move(next)};
}

BatchEmResult batch_em(const std::vector<Eigen::VectorXd>& data, int K, int max_iters,
                       double tol, std::uint64_t rng_seed) {
  if (K < 1) throw std::invalid_argument("batch_em: K must be >= 1");
  if (static_cast<int>(data.size()) < K)
    throw std::invalid_argument("batch_em: fewer samples than components");

  const int dim = static_cast<int>(data.front().size());
  GmmParams params = gmm_init(dim, K, data, rng_seed);
  std::vector<double> trace;
  double prev_ll = -std::numeric_limits<double>::infinity();

  for (int iter = 0; iter < max_iters; ++iter) {
    // E-step: responsibilities and total log-likelihood at current parameters.
    std::vector<double> mass(K, 0.0);
    std::vector<Eigen::VectorXd> first(K, Eigen::VectorXd::Zero(dim));
    std::vector<Eigen::MatrixXd> second(K, Eigen::MatrixXd::Zero(dim, dim));
    double ll = 0.0;
    for (const auto& x : data) {
      const Eigen::VectorXd lj = log_joint(params, x);
      const double lse = log_sum_exp(lj);
      ll += lse;
      const Eigen::MatrixXd outer = x * x.transpose();
      for (int k = 0; k < K; ++k) {
        const double rk = std::exp(lj[k] - lse);
        mass[static_cast<std::size_t>(k)] += rk;
        first[static_cast<std::size_t>(k)] += rk * x;
        second[static_cast<std::size_t>(k)] += rk * outer;
      }
    }
    trace.push_back(ll);
    if (iter > 0 && ll - prev_ll < tol) break;
    prev_ll = ll;

    // M-step.
    const auto n = static_cast<double>(data.size());
    std::vector<GaussianComponent> components;
    components.reserve(K);
    for (int k = 0; k < K; ++k) {
      auto& mk = mass[static_cast<std::size_t>(k)];
      if (mk < 1e-12) {
        // Starved component: keep its previous parameters with a floor weight.
        const auto& old_comp = params.components()[static_cast<std::size_t>(k)];
        mk = 1e-12;
        components.emplace_back(old_comp.mean(), old_comp.covariance(), mk / n);
        continue;
      }
      components.push_back(derive_component(mk, first[static_cast<std::size_t>(k)],
                                            second[static_cast<std::size_t>(k)], mk / n));
    }
    // Weights must sum to 1 exactly enough for construction.
    double wsum = 0.0;
    for (const auto& c : components) wsum += c.weight();
    if (std::abs(wsum - 1.0) > 1e-12) {
      std::vector<GaussianComponent> renormed;
      renormed.reserve(components.size());
      for (const auto& c : components)
        renormed.emplace_back(c.mean(), c.covariance(), c.weight() / wsum);
      components = std::move(renormed);
    }
    params = GmmParams(std::move(components));
  }
  return {std::move(params), std::move(trace)};
}

std::string to_json_string(const GmmParams& params) {
  nlohmann::json j;
  j["dim"] = params.dim();
  j["K"] = params.component_count();
  auto& comps = j["components"] = nlohmann::json::array();
  for (const auto& c : params.components()) {
    nlohmann::json jc;
    jc["weight"] = c.weight();
    jc["mean"] = std::vector<double>(c.mean().data(), c.mean().data() + c.mean().size());
    auto& cov = jc["cov"] = nlohmann::json::array();
    for (Eigen::Index i = 0; i < c.covariance().rows(); ++i) {
      std::vector<double> row(c.covariance().cols());
      for (Eigen::Index k = 0; k < c.covariance().cols(); ++k) row[k] = c.covariance()(i, k);
      cov.push_back(row);
    }
    comps.push_back(std::move(jc));
  }
  return j.dump();
}

GmmParams gmm_from_json_string(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  const int dim = j.at("dim").get<int>();
  const int K = j.at("K").get<int>();
  const auto& jcomps = j.at("components");
  if (static_cast<int>(jcomps.size()) != K)
    throw std::invalid_argument("gmm_from_json_string: component count mismatch");
  std::vector<GaussianComponent> components;
  components.reserve(jcomps.size());
  for (const auto& jc : jcomps) {
    const auto mean_vals = jc.at("mean").get<std::vector<double>>();
    if (static_cast<int>(mean_vals.size()) != dim)
      throw std::invalid_argument("gmm_from_json_string: mean dimension mismatch");
    Eigen::VectorXd mean(dim);
    for (int i = 0; i < dim; ++i) mean[i] = mean_vals[static_cast<std::size_t>(i)];
    Eigen::MatrixXd cov(dim, dim);
    const auto& jcov = jc.at("cov");
    if (static_cast<int>(jcov.size()) != dim)
      throw std::invalid_argument("gmm_from_json_string: cov shape mismatch");
    for (int i = 0; i < dim; ++i) {
      const auto row = jcov[static_cast<std::size_t>(i)].get<std::vector<double>>();
      if (static_cast<int>(row.size()) != dim)
        throw std::invalid_argument("gmm_from_json_string: cov shape mismatch");
      for (int k = 0; k < dim; ++k) cov(i, k) = row[static_cast<std::size_t>(k)];
    }
    components.emplace_back(std::move(mean), std::move(cov), jc.at("weight").get<double>());
  }
  return GmmParams(std::move(components));
}

}  // namespace policyfuzz
