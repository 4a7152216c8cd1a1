#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace policyfuzz {

// Regularization added to covariance diagonals after every re-derivation.
inline constexpr double kCovarianceFloor = 1e-6;

// Covariances are kept full up to this dimension and diagonal above it.
inline constexpr int kFullCovarianceMaxDim = 8;

// One weighted multivariate Gaussian. The Cholesky factor and the log
// normalization constant are computed at construction, after which the
// component is immutable and safe to share across threads.
class GaussianComponent {
 public:
  GaussianComponent(Eigen::VectorXd mean, Eigen::MatrixXd covariance, double weight);

  const Eigen::VectorXd& mean() const { return mean_; }
  const Eigen::MatrixXd& covariance() const { return covariance_; }
  double weight() const { return weight_; }
  int dim() const { return static_cast<int>(mean_.size()); }

  double log_pdf(const Eigen::VectorXd& x) const;

 private:
  Eigen::VectorXd mean_;
  Eigen::MatrixXd covariance_;
  double weight_;
  Eigen::MatrixXd chol_lower_;   // L with covariance = L L^T
  Eigen::VectorXd inv_variance_; // diagonal fast path
  double log_norm_;              // -(d/2) log(2 pi) - sum(log L_ii)
  bool diagonal_;
};

// A K-component mixture over d-vectors. Weights sum to 1 within 1e-9 and all
// components share the same dimension; both are enforced at construction.
class GmmParams {
 public:
  explicit GmmParams(std::vector<GaussianComponent> components);

  int dim() const { return dim_; }
  int component_count() const { return static_cast<int>(components_.size()); }
  const std::vector<GaussianComponent>& components() const { return components_; }

 private:
  std::vector<GaussianComponent> components_;
  int dim_;
};

// Uniform weights 1/K; means drawn from seed_samples without replacement when
// at least K samples exist, standard-normal draws otherwise; covariances are
// diagonal per-dimension sample variances (identity when no samples).
GmmParams gmm_init(int dim, int K, const std::vector<Eigen::VectorXd>& seed_samples,
                   std::uint64_t rng_seed);

// log sum_k w_k N(x; mu_k, Sigma_k), evaluated with a max-shifted sum so that
// densities down to exp(-700) and far below survive in log space.
double log_density(const GmmParams& params, const Eigen::VectorXd& x);

// Posterior component probabilities for one observation; entries are
// nonnegative and sum to 1 within 1e-9.
Eigen::VectorXd responsibilities(const GmmParams& params, const Eigen::VectorXd& x);

// Exponentially forgotten per-component sufficient statistics (mass, first
// moment, second moment); the carrier of the constant-cost online update.
struct SufficientStats {
  std::vector<double> mass;
  std::vector<Eigen::VectorXd> first_moment;
  std::vector<Eigen::MatrixXd> second_moment;

  // Statistics that re-derive exactly to the given parameters.
  static SufficientStats from_params(const GmmParams& params);
};

struct DynemResult {
  GmmParams params;
  SufficientStats stats;
};

// Single-sample stepwise-EM update in O(K d^2): responsibilities of x,
// interpolation S <- (1-gamma) S + gamma s_hat, then re-derivation of weights,
// means and covariances from S. gamma = 0 returns the inputs unchanged.
DynemResult dynem_update(const GmmParams& params, const SufficientStats& stats,
                         const Eigen::VectorXd& x, double gamma);

struct BatchEmResult {
  GmmParams params;
  std::vector<double> log_likelihood_trace;  // one entry per E-step
};

// Reference batch EM, deterministic given rng_seed. Iterates until the
// log-likelihood improvement drops below tol or max_iters is reached.
BatchEmResult batch_em(const std::vector<Eigen::VectorXd>& data, int K, int max_iters,
                       double tol, std::uint64_t rng_seed);

// JSON document {dim, K, components:[{weight, mean, cov}]}; the round trip
// preserves every double exactly.
std::string to_json_string(const GmmParams& params);
GmmParams gmm_from_json_string(const std::string& text);

}  // namespace policyfuzz
