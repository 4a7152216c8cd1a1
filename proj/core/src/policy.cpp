#include "policyfuzz/policy.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "policyfuzz/envs/taxi.hpp"
#include "policyfuzz/rollout.hpp"

namespace policyfuzz {

Discretizer::Discretizer(std::vector<std::vector<double>> edges) : edges_(std::move(edges)) {
  if (edges_.empty()) throw std::invalid_argument("Discretizer: no dimensions");
  strides_.resize(edges_.size());
  std::int64_t stride = 1;
  for (std::size_t d = edges_.size(); d-- > 0;) {
    for (std::size_t i = 1; i < edges_[d].size(); ++i)
      if (!(edges_[d][i] > edges_[d][i - 1]))
        throw std::invalid_argument("Discretizer: edges must be strictly increasing");
    strides_[d] = stride;
    stride *= static_cast<std::int64_t>(edges_[d].size()) + 1;
  }
  state_count_ = stride;
}

std::int64_t Discretizer::index_of(const Eigen::VectorXd& state) const {
  if (state.size() != dims())
    throw std::invalid_argument("Discretizer: state dimension mismatch");
  std::int64_t index = 0;
  for (std::size_t d = 0; d < edges_.size(); ++d) {
    const auto& e = edges_[d];
    const auto bin = std::upper_bound(e.begin(), e.end(), state[static_cast<Eigen::Index>(d)]) -
                     e.begin();
    index += static_cast<std::int64_t>(bin) * strides_[d];
  }
  return index;
}

Discretizer make_default_discretizer(const Environment& env) {
  const auto& spec = env.spec();
  if (spec.name == "cartpole") {
    constexpr int kBins = 12;
    std::vector<std::vector<double>> edges;
    for (const auto& dim : spec.input_space) {
      std::vector<double> e;
      for (int k = 1; k < kBins; ++k)
        e.push_back(dim.lower + k * (dim.upper - dim.lower) / kBins);
      edges.push_back(std::move(e));
    }
    return Discretizer(std::move(edges));
  }
  if (spec.name == "taxi") {
    // One bin per integral value of each observation component.
    const int cards[5] = {TaxiEnv::kHeight, TaxiEnv::kWidth, TaxiEnv::kHeight,
                          TaxiEnv::kWidth, 2};
    std::vector<std::vector<double>> edges;
    for (int card : cards) {
      std::vector<double> e;
      for (int k = 0; k < card - 1; ++k) e.push_back(k + 0.5);
      edges.push_back(std::move(e));
    }
    return Discretizer(std::move(edges));
  }
  throw std::invalid_argument("no discretizer for environment " + spec.name);
}

QTablePolicy::QTablePolicy(std::string env_name, Discretizer discretizer, int action_count)
    : env_name_(std::move(env_name)),
      discretizer_(std::move(discretizer)),
      action_count_(action_count) {
  if (action_count_ < 1) throw std::invalid_argument("QTablePolicy: no actions");
}

std::vector<double>& QTablePolicy::values_for(std::int64_t state_index, double fill) {
  auto [it, inserted] = table_.try_emplace(state_index);
  if (inserted) it->second.assign(static_cast<std::size_t>(action_count_), fill);
  return it->second;
}

const std::vector<double>* QTablePolicy::find(std::int64_t state_index) const {
  const auto it = table_.find(state_index);
  return it == table_.end() ? nullptr : &it->second;
}

int QTablePolicy::act(const Eigen::VectorXd& state) const {
  const auto* values = find(discretizer_.index_of(state));
  if (values == nullptr) return 0;  // all-zero row, lowest index wins
  int best = 0;
  for (int a = 1; a < action_count_; ++a)
    if ((*values)[static_cast<std::size_t>(a)] > (*values)[static_cast<std::size_t>(best)])
      best = a;
  return best;
}

PdControllerPolicy::PdControllerPolicy(PdGains gains) : gains_(gains) {}

int PdControllerPolicy::act(const Eigen::VectorXd& state) const {
  if (state.size() != 4)
    throw std::invalid_argument("pd_controller: state must have 4 values");
  const double x = state[0], y = state[1], vx = state[2], vy = state[3];
  if (vy < -(gains_.base_descent + gains_.descent_slope * std::max(y, 0.0)))
    return 1;  // up
  const double predicted = x + gains_.horizontal_lead * vx;
  if (predicted > gains_.deadband) return 2;   // left
  if (predicted < -gains_.deadband) return 3;  // right
  return 0;
}

QTablePolicy train_q_learning(Environment& env, const TrainOptions& options) {
  if (options.episodes < 0) throw std::invalid_argument("train_q_learning: negative episodes");
  if (options.gamma_rl < 0.0 || options.gamma_rl >= 1.0)
    throw std::invalid_argument("train_q_learning: gamma_rl outside [0, 1)");

  QTablePolicy policy(env.spec().name, make_default_discretizer(env),
                      env.spec().action_count);
  const int actions = env.spec().action_count;
  const int max_steps = env.spec().horizon - 1;

  const bool curriculum = options.exploring_starts && env.spec().name == "taxi";

  RngStream rng = named_stream(options.seed, "q-learning");
  for (std::int64_t episode = 0; episode < options.episodes; ++episode) {
    const double progress =
        options.episodes > 1
            ? static_cast<double>(episode) / static_cast<double>(options.episodes - 1)
            : 1.0;
    const double epsilon =
        options.epsilon_start + (options.epsilon_end - options.epsilon_start) * progress;

    EnvInput input = env.sample_input(rng);
    bool board_passenger = false;
    if (curriculum) {
      const double u = rng.uniform();
      if (u >= 0.25 && u < 0.55) {
        // Taxi placed a short random walk away from the passenger, so pickup
        // events occur at every distance band and the stage-one value
        // frontier can grow outward from each passenger cell.
        const auto& taxi = dynamic_cast<const TaxiEnv&>(env);
        int row = static_cast<int>(input[2]);
        int col = static_cast<int>(input[3]);
        const auto walk_steps = rng.uniform_int(1, 40);
        for (std::int64_t s = 0; s < walk_steps; ++s) {
          static constexpr int dr[4] = {-1, 1, 0, 0};
          static constexpr int dc[4] = {0, 0, 1, -1};
          const auto dir = rng.uniform_int(0, 3);
          if (taxi.is_free(row + dr[dir], col + dc[dir])) {
            row += dr[dir];
            col += dc[dir];
          }
        }
        input[0] = row;
        input[1] = col;
      } else if (u >= 0.55) {
        // Pickup-imminent start: passenger placed at the taxi's cell.
        input[2] = input[0];
        input[3] = input[1];
        board_passenger = u >= 0.75;
      }
    }

    Eigen::VectorXd state = env.reset(input);
    std::int64_t index = policy.discretizer().index_of(state);
    for (int t = 0; t < max_steps; ++t) {
      int action;
      if (board_passenger && t == 0) {
        action = 4;  // pickup; starts the episode with the passenger on board
      } else if (rng.uniform() < epsilon) {
        action = static_cast<int>(rng.uniform_int(0, actions - 1));
      } else {
        action = policy.act(state);
      }
      const auto result = env.step(action);
      const std::int64_t next_index = policy.discretizer().index_of(result.state);

      double best_next = 0.0;
      if (!result.done) {
        const auto* next_values = policy.find(next_index);
        best_next = next_values != nullptr
                        ? *std::max_element(next_values->begin(), next_values->end())
                        : options.q_init;
      }
      auto& values = policy.values_for(index, options.q_init);
      auto& q = values[static_cast<std::size_t>(action)];
      q += options.alpha * (result.reward + options.gamma_rl * best_next - q);

      state = result.state;
      index = next_index;
      if (result.done) break;
    }
  }

  policy.metadata.episodes = options.episodes;
  RngStream eval_rng = named_stream(options.seed, "q-eval");
  double total_return = 0.0;
  for (int i = 0; i < options.eval_episodes; ++i)
    total_return += run_episode(env, policy, env.sample_input(eval_rng)).cumulative_reward;
  policy.metadata.mean_eval_return =
      options.eval_episodes > 0 ? total_return / options.eval_episodes : 0.0;
  return policy;
}

TrainOptions default_train_options(const std::string& env_name) {
  TrainOptions options;
  if (env_name == "cartpole") {
    options.episodes = 50000;
    options.gamma_rl = 0.99;
    options.q_init = 50.0;  // optimistic: per-step rewards are positive
    return options;
  }
  if (env_name == "taxi") {
    options.episodes = 200000;
    options.gamma_rl = 0.95;
    options.q_init = -20.0;  // the no-progress return -1/(1-gamma_rl)
    return options;
  }
  throw std::invalid_argument("no training recipe for environment " + env_name);
}

std::string to_json_string(const Policy& policy) {
  nlohmann::json j;
  j["kind"] = policy.kind();
  j["env"] = policy.env_name();
  if (const auto* q = dynamic_cast<const QTablePolicy*>(&policy)) {
    j["action_count"] = q->action_count();
    j["discretizer"] = {{"edges", q->discretizer().edges()}};
    j["metadata"] = {{"episodes", q->metadata.episodes},
                     {"mean_eval_return", q->metadata.mean_eval_return}};
    std::vector<std::int64_t> keys;
    keys.reserve(q->entries().size());
    for (const auto& [k, v] : q->entries()) keys.push_back(k);
    std::sort(keys.begin(), keys.end());
    auto& entries = j["entries"] = nlohmann::json::array();
    for (std::int64_t k : keys)
      entries.push_back({{"state_index", k}, {"q", *q->find(k)}});
    return j.dump();
  }
  if (const auto* pd = dynamic_cast<const PdControllerPolicy*>(&policy)) {
    j["gains"] = {{"horizontal_lead", pd->gains().horizontal_lead},
                  {"deadband", pd->gains().deadband},
                  {"base_descent", pd->gains().base_descent},
                  {"descent_slope", pd->gains().descent_slope}};
    return j.dump();
  }
  throw std::invalid_argument("to_json_string: unknown policy kind");
}

std::unique_ptr<Policy> policy_from_json_string(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  const auto kind = j.at("kind").get<std::string>();
  const auto env_name = j.at("env").get<std::string>();
  const auto env = make_environment(env_name);

  if (kind == "q_table") {
    Discretizer discretizer(j.at("discretizer").at("edges").get<std::vector<std::vector<double>>>());
    if (discretizer.dims() != env->spec().state_dim)
      throw std::invalid_argument("q_table: discretizer does not match environment state");
    const int action_count = j.at("action_count").get<int>();
    if (action_count != env->spec().action_count)
      throw std::invalid_argument("q_table: action count does not match environment");
    auto policy = std::make_unique<QTablePolicy>(env_name, std::move(discretizer), action_count);
    for (const auto& e : j.at("entries")) {
      const auto index = e.at("state_index").get<std::int64_t>();
      const auto q = e.at("q").get<std::vector<double>>();
      if (static_cast<int>(q.size()) != action_count)
        throw std::invalid_argument("q_table: malformed action-value row");
      if (index < 0 || index >= policy->discretizer().state_count())
        throw std::invalid_argument("q_table: state index out of range");
      policy->values_for(index) = q;
    }
    if (j.contains("metadata")) {
      policy->metadata.episodes = j["metadata"].value("episodes", std::int64_t{0});
      policy->metadata.mean_eval_return = j["metadata"].value("mean_eval_return", 0.0);
    }
    return policy;
  }
  if (kind == "pd_controller") {
    if (env_name != "landerlite")
      throw std::invalid_argument("pd_controller: unsupported environment " + env_name);
    PdGains gains;
    if (j.contains("gains")) {
      const auto& g = j["gains"];
      gains.horizontal_lead = g.value("horizontal_lead", gains.horizontal_lead);
      gains.deadband = g.value("deadband", gains.deadband);
      gains.base_descent = g.value("base_descent", gains.base_descent);
      gains.descent_slope = g.value("descent_slope", gains.descent_slope);
    }
    return std::make_unique<PdControllerPolicy>(gains);
  }
  throw std::invalid_argument("unknown policy kind: " + kind);
}

void save_policy(const Policy& policy, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write policy artifact: " + path);
  out << to_json_string(policy) << '\n';
}

std::unique_ptr<Policy> load_policy(const std::string& path) {
  if (path == "builtin:pd") return std::make_unique<PdControllerPolicy>();
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read policy artifact: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return policy_from_json_string(buffer.str());
}

}  // namespace policyfuzz
