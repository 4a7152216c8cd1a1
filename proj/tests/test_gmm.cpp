#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "policyfuzz/gmm.hpp"
#include "policyfuzz/rng.hpp"
#include "support/linear_gaussian_oracle.hpp"

using namespace policyfuzz;

namespace {

GmmParams single_standard_normal(int dim) {
  return GmmParams({GaussianComponent(Eigen::VectorXd::Zero(dim),
                                      Eigen::MatrixXd::Identity(dim, dim), 1.0)});
}

// Random mixture with well-conditioned covariances, plus its oracle mirror.
std::pair<GmmParams, oracle::Mixture> random_mixture(int dim, int K, RngStream& rng) {
  oracle::Mixture mix;
  std::vector<GaussianComponent> comps;
  std::vector<double> weights(K);
  double wsum = 0.0;
  for (int k = 0; k < K; ++k) {
    weights[k] = 0.2 + rng.uniform();
    wsum += weights[k];
  }
  for (int k = 0; k < K; ++k) {
    Eigen::VectorXd mean(dim);
    for (int i = 0; i < dim; ++i) mean[i] = rng.uniform(-3.0, 3.0);
    Eigen::MatrixXd a(dim, dim);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) a(i, j) = rng.uniform(-0.4, 0.4);
    Eigen::MatrixXd cov =
        a * a.transpose() + Eigen::MatrixXd::Identity(dim, dim) * rng.uniform(0.5, 1.5);
    const double w = weights[k] / wsum;
    mix.weights.push_back(w);
    mix.means.push_back(mean);
    mix.covs.push_back(cov);
    comps.emplace_back(mean, cov, w);
  }
  return {GmmParams(std::move(comps)), std::move(mix)};
}

Eigen::VectorXd random_point(int dim, RngStream& rng, double scale = 4.0) {
  Eigen::VectorXd x(dim);
  for (int i = 0; i < dim; ++i) x[i] = rng.uniform(-scale, scale);
  return x;
}

double min_covariance_eigenvalue(const GmmParams& params) {
  double lo = std::numeric_limits<double>::infinity();
  for (const auto& c : params.components()) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c.covariance());
    lo = std::min(lo, es.eigenvalues().minCoeff());
  }
  return lo;
}

}  // namespace

TEST_CASE("log_density matches the closed-form standard normal at its mean") {
  const auto params = single_standard_normal(2);
  CHECK(log_density(params, Eigen::VectorXd::Zero(2)) ==
        doctest::Approx(-1.8378770664093453).epsilon(1e-12));
}

TEST_CASE("duplicated equal-weight components leave the density unchanged") {
  const Eigen::VectorXd mean = Eigen::VectorXd::Constant(3, 0.7);
  Eigen::MatrixXd cov = Eigen::MatrixXd::Identity(3, 3) * 1.3;
  const GmmParams one({GaussianComponent(mean, cov, 1.0)});
  const GmmParams two({GaussianComponent(mean, cov, 0.5), GaussianComponent(mean, cov, 0.5)});
  RngStream rng(11);
  for (int i = 0; i < 50; ++i) {
    const auto x = random_point(3, rng);
    CHECK(log_density(one, x) == doctest::Approx(log_density(two, x)).epsilon(1e-12));
  }
}

TEST_CASE("log_density matches the linear-space brute-force oracle") {
  RngStream rng(42);
  const auto [params, mix] = random_mixture(3, 3, rng);
  for (int i = 0; i < 100; ++i) {
    const auto x = random_point(3, rng);
    const double expected = std::log(oracle::mixture_density(mix, x));
    CHECK(log_density(params, x) == doctest::Approx(expected).epsilon(1e-10));
  }
}

TEST_CASE("log_density stays finite far from all components") {
  const auto params = single_standard_normal(2);
  Eigen::VectorXd x(2);
  x << 80.0, -80.0;  // density ~ exp(-6400), far below linear-space range
  const double ld = log_density(params, x);
  CHECK(std::isfinite(ld));
  CHECK(ld == doctest::Approx(-1.8378770664093453 - 6400.0).epsilon(1e-12));

  x << 1e200, 1e200;  // finite input, quadratic form overflows
  CHECK(std::isfinite(log_density(params, x)));
}

TEST_CASE("log_density rejects dimension mismatch") {
  const auto params = single_standard_normal(2);
  CHECK_THROWS_AS(log_density(params, Eigen::VectorXd::Zero(3)), std::invalid_argument);
}

TEST_CASE("responsibilities of a single component are exactly one") {
  const auto params = single_standard_normal(4);
  RngStream rng(7);
  const auto r = responsibilities(params, random_point(4, rng));
  REQUIRE(r.size() == 1);
  CHECK(r[0] == 1.0);
}

TEST_CASE("responsibilities are one half at the symmetry point") {
  Eigen::VectorXd m1(2), m2(2);
  m1 << -2.0, 0.0;
  m2 << 2.0, 0.0;
  const Eigen::MatrixXd cov = Eigen::MatrixXd::Identity(2, 2);
  const GmmParams params({GaussianComponent(m1, cov, 0.5), GaussianComponent(m2, cov, 0.5)});
  Eigen::VectorXd x(2);
  x << 0.0, 1.0;
  const auto r = responsibilities(params, x);
  CHECK(r[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(r[1] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("responsibilities match the linear-space Bayes oracle and sum to one") {
  RngStream rng(99);
  const auto [params, mix] = random_mixture(2, 4, rng);
  for (int i = 0; i < 100; ++i) {
    const auto x = random_point(2, rng);
    const auto r = responsibilities(params, x);
    const auto expected = oracle::mixture_responsibilities(mix, x);
    double sum = 0.0;
    for (int k = 0; k < r.size(); ++k) {
      CHECK(r[k] == doctest::Approx(expected[static_cast<std::size_t>(k)]).epsilon(1e-10));
      CHECK(r[k] >= 0.0);
      sum += r[k];
    }
    CHECK(std::abs(sum - 1.0) <= 1e-9);
  }
}

TEST_CASE("gmm_init without samples gives unit weight and identity covariance") {
  const auto params = gmm_init(2, 1, {}, 5);
  REQUIRE(params.component_count() == 1);
  CHECK(params.components()[0].weight() == 1.0);
  CHECK(params.components()[0].covariance().isApprox(Eigen::MatrixXd::Identity(2, 2)));
}

TEST_CASE("gmm_init with enough samples uses them as means with uniform weights") {
  RngStream rng(3);
  std::vector<Eigen::VectorXd> samples;
  for (int i = 0; i < 1000; ++i) samples.push_back(random_point(4, rng));
  const auto params = gmm_init(4, 10, samples, 17);
  REQUIRE(params.component_count() == 10);
  for (const auto& c : params.components()) {
    CHECK(c.weight() == doctest::Approx(0.1).epsilon(1e-12));
    // Every mean must be one of the seed samples.
    bool found = false;
    for (const auto& s : samples)
      if (s == c.mean()) found = true;
    CHECK(found);
  }
  // Distinct means (drawn without replacement).
  for (int a = 0; a < 10; ++a)
    for (int b = a + 1; b < 10; ++b)
      CHECK(params.components()[static_cast<std::size_t>(a)].mean() !=
            params.components()[static_cast<std::size_t>(b)].mean());
}

TEST_CASE("gmm_init is deterministic in the seed") {
  RngStream rng(8);
  std::vector<Eigen::VectorXd> samples;
  for (int i = 0; i < 5; ++i) samples.push_back(random_point(3, rng));
  CHECK(to_json_string(gmm_init(3, 10, samples, 123)) ==
        to_json_string(gmm_init(3, 10, samples, 123)));
  CHECK(to_json_string(gmm_init(3, 2, samples, 123)) ==
        to_json_string(gmm_init(3, 2, samples, 123)));
}

TEST_CASE("gmm_init rejects degenerate shapes") {
  CHECK_THROWS_AS(gmm_init(0, 1, {}, 1), std::invalid_argument);
  CHECK_THROWS_AS(gmm_init(1, 0, {}, 1), std::invalid_argument);
}

TEST_CASE("dynem_update with gamma zero is a bitwise no-op") {
  RngStream rng(21);
  const auto [params, mix] = random_mixture(3, 3, rng);
  (void)mix;
  const auto stats = SufficientStats::from_params(params);
  const auto result = dynem_update(params, stats, random_point(3, rng), 0.0);
  CHECK(to_json_string(result.params) == to_json_string(params));
  for (std::size_t k = 0; k < stats.mass.size(); ++k) {
    CHECK(result.stats.mass[k] == stats.mass[k]);
    CHECK(result.stats.first_moment[k] == stats.first_moment[k]);
    CHECK(result.stats.second_moment[k] == stats.second_moment[k]);
  }
}

TEST_CASE("dynem_update with gamma one and a single component jumps to x") {
  const auto params = single_standard_normal(3);
  const auto stats = SufficientStats::from_params(params);
  Eigen::VectorXd x(3);
  x << 1.5, -2.25, 0.125;
  const auto result = dynem_update(params, stats, x, 1.0);
  CHECK(result.params.components()[0].mean() == x);
}

TEST_CASE("dynem_update rejects gamma outside [0, 1]") {
  const auto params = single_standard_normal(2);
  const auto stats = SufficientStats::from_params(params);
  const Eigen::VectorXd x = Eigen::VectorXd::Zero(2);
  CHECK_THROWS_AS(dynem_update(params, stats, x, -0.1), std::invalid_argument);
  CHECK_THROWS_AS(dynem_update(params, stats, x, 1.1), std::invalid_argument);
}

TEST_CASE("dynem_update keeps mixture invariants across a random stream") {
  RngStream rng(33);
  auto [params, mix] = random_mixture(2, 3, rng);
  (void)mix;
  auto stats = SufficientStats::from_params(params);
  for (int i = 0; i < 300; ++i) {
    auto result = dynem_update(params, stats, random_point(2, rng), 0.05);
    params = std::move(result.params);
    stats = std::move(result.stats);
    double wsum = 0.0, msum = 0.0;
    for (const auto& c : params.components()) wsum += c.weight();
    for (double m : stats.mass) msum += m;
    CHECK(std::abs(wsum - 1.0) <= 1e-9);
    CHECK(std::abs(msum - 1.0) <= 1e-9);
  }
  CHECK(min_covariance_eigenvalue(params) >= kCovarianceFloor - 1e-12);
}

TEST_CASE("dynem_update is permutation-equivariant") {
  RngStream rng(55);
  const auto [params, mix] = random_mixture(2, 3, rng);
  (void)mix;
  const auto stats = SufficientStats::from_params(params);
  const auto x = random_point(2, rng);

  const std::vector<std::size_t> perm = {2, 0, 1};
  std::vector<GaussianComponent> permuted_comps;
  SufficientStats permuted_stats;
  for (std::size_t k : perm) {
    permuted_comps.push_back(params.components()[k]);
    permuted_stats.mass.push_back(stats.mass[k]);
    permuted_stats.first_moment.push_back(stats.first_moment[k]);
    permuted_stats.second_moment.push_back(stats.second_moment[k]);
  }
  const GmmParams permuted(std::move(permuted_comps));

  const auto direct = dynem_update(params, stats, x, 0.3);
  const auto swapped = dynem_update(permuted, permuted_stats, x, 0.3);
  for (std::size_t i = 0; i < perm.size(); ++i) {
    const auto& a = swapped.params.components()[i];
    const auto& b = direct.params.components()[perm[i]];
    CHECK(a.weight() == doctest::Approx(b.weight()).epsilon(1e-12));
    CHECK(a.mean().isApprox(b.mean(), 1e-12));
    CHECK(a.covariance().isApprox(b.covariance(), 1e-12));
  }
}

namespace {

// Draws from a two-component 2-D mixture with identity covariances.
std::vector<Eigen::VectorXd> two_cluster_stream(int n, RngStream& rng) {
  Eigen::VectorXd m1(2), m2(2);
  m1 << -3.0, 0.0;
  m2 << 3.0, 0.0;
  std::vector<Eigen::VectorXd> data;
  data.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const auto& m = rng.uniform() < 0.5 ? m1 : m2;
    Eigen::VectorXd x(2);
    x << m[0] + rng.normal(), m[1] + rng.normal();
    data.push_back(std::move(x));
  }
  return data;
}

double paired_mean_distance(const GmmParams& a, const GmmParams& b) {
  // Two components: best assignment over the two pairings.
  const auto& am = a.components();
  const auto& bm = b.components();
  const double direct = std::max((am[0].mean() - bm[0].mean()).norm(),
                                 (am[1].mean() - bm[1].mean()).norm());
  const double crossed = std::max((am[0].mean() - bm[1].mean()).norm(),
                                  (am[1].mean() - bm[0].mean()).norm());
  return std::min(direct, crossed);
}

}  // namespace

TEST_CASE("dynem_update tracks batch EM means on a long stream") {
  RngStream rng(2024);
  const auto data = two_cluster_stream(20000, rng);

  auto params = gmm_init(2, 2, data, 77);
  auto stats = SufficientStats::from_params(params);
  for (const auto& x : data) {
    auto result = dynem_update(params, stats, x, 0.05);
    params = std::move(result.params);
    stats = std::move(result.stats);
  }

  const auto reference = batch_em(data, 2, 100, 1e-6, 77);
  CHECK(paired_mean_distance(params, reference.params) < 0.3);
}

TEST_CASE("batch_em interpolates K distinct points") {
  std::vector<Eigen::VectorXd> data;
  Eigen::VectorXd a(2), b(2), c(2);
  a << 0.0, 0.0;
  b << 5.0, 5.0;
  c << -5.0, 5.0;
  data = {a, b, c};
  const auto result = batch_em(data, 3, 200, 1e-12, 9);
  for (const auto& point : data) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& comp : result.params.components())
      best = std::min(best, (comp.mean() - point).norm());
    CHECK(best < 1e-3);
  }
}

TEST_CASE("batch_em log-likelihood trace is non-decreasing") {
  RngStream rng(31337);
  const auto data = two_cluster_stream(2000, rng);
  const auto result = batch_em(data, 2, 60, 1e-9, 5);
  REQUIRE(result.log_likelihood_trace.size() >= 2);
  for (std::size_t i = 1; i < result.log_likelihood_trace.size(); ++i)
    CHECK(result.log_likelihood_trace[i] >= result.log_likelihood_trace[i - 1] - 1e-9);
}

TEST_CASE("batch_em recovers well-separated cluster means") {
  RngStream rng(61);
  const auto data = two_cluster_stream(4000, rng);
  // Cluster-mean oracle: split on the known boundary x = 0.
  Eigen::VectorXd left = Eigen::VectorXd::Zero(2), right = Eigen::VectorXd::Zero(2);
  int nl = 0, nr = 0;
  for (const auto& x : data) {
    if (x[0] < 0.0) {
      left += x;
      ++nl;
    } else {
      right += x;
      ++nr;
    }
  }
  left /= nl;
  right /= nr;

  // Seed picked so that the two drawn init means land in different clusters;
  // EM is a local optimizer and a same-cluster draw settles at the midpoint.
  const auto result = batch_em(data, 2, 100, 1e-8, 5);
  const auto& comps = result.params.components();
  const double direct = std::max((comps[0].mean() - left).norm(),
                                 (comps[1].mean() - right).norm());
  const double crossed = std::max((comps[0].mean() - right).norm(),
                                  (comps[1].mean() - left).norm());
  CHECK(std::min(direct, crossed) < 0.1);
}

TEST_CASE("batch_em rejects fewer samples than components") {
  std::vector<Eigen::VectorXd> data = {Eigen::VectorXd::Zero(2)};
  CHECK_THROWS_AS(batch_em(data, 2, 10, 1e-6, 1), std::invalid_argument);
}

TEST_CASE("json round-trip preserves log_density to 1e-12") {
  RngStream rng(70);
  const auto [params, mix] = random_mixture(3, 4, rng);
  (void)mix;
  const auto restored = gmm_from_json_string(to_json_string(params));
  for (int i = 0; i < 50; ++i) {
    const auto x = random_point(3, rng);
    CHECK(log_density(restored, x) == doctest::Approx(log_density(params, x)).epsilon(1e-12));
  }
  // Exact double round-trip implies an identical second serialization.
  CHECK(to_json_string(restored) == to_json_string(params));
}
