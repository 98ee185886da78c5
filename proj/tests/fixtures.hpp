#pragma once

#include <adapts/adapts.hpp>

#include <cmath>
#include <cstddef>
#include <vector>

namespace testutil {

inline adapts::PosteriorTable binary_posterior() {
  return adapts::derive_posterior(adapts::binary_symmetric_fixture());
}

inline adapts::PosteriorTable ternary_posterior() {
  return adapts::derive_posterior(adapts::ternary_fixture());
}

inline adapts::SimplexPoint uniform_point(std::size_t m) {
  return adapts::SimplexPoint(std::vector<double>(m, 1.0 / static_cast<double>(m)));
}

inline bool close(double a, double b, double tol = 1e-12) {
  return std::abs(a - b) <= tol;
}

inline adapts::RunConfig small_run_config() {
  adapts::RunConfig cfg;
  cfg.model = adapts::binary_symmetric_fixture();
  cfg.population.k = 4;
  cfg.population.epsilon = 0.1;
  cfg.gamma = 0.2;
  cfg.rounds = 64;
  cfg.seed = 17;
  return cfg;
}

}  // namespace testutil
