#include "policyfuzz/env.hpp"

#include <stdexcept>

#include "policyfuzz/envs/cartpole.hpp"
#include "policyfuzz/envs/lander_lite.hpp"
#include "policyfuzz/envs/taxi.hpp"

namespace policyfuzz {

std::unique_ptr<Environment> make_environment(const std::string& name) {
  if (name == "cartpole") return std::make_unique<CartPoleEnv>();
  if (name == "taxi") return std::make_unique<TaxiEnv>();
  if (name == "landerlite") return std::make_unique<LanderLiteEnv>();
  throw std::invalid_argument("unknown environment: " + name);
}

std::vector<std::string> environment_names() { return {"cartpole", "taxi", "landerlite"}; }

}  // namespace policyfuzz
