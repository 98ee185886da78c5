#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace adapts {

// Deterministic sampling wrapper. All distributions are hand-rolled on top of
// the mt19937_64 bit stream, so a seed fixes every draw across platforms.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform01() < p; }

    std::size_t uniform_index(std::size_t n) {
        if (n == 0) throw std::invalid_argument("uniform_index: n must be positive");
        std::size_t i = static_cast<std::size_t>(uniform01() * static_cast<double>(n));
        return i < n ? i : n - 1;
    }

    std::size_t categorical(const std::vector<double>& weights) {
        if (weights.empty()) throw std::invalid_argument("categorical: empty weights");
        double total = 0.0;
        for (double w : weights) total += w;
        double u = uniform01() * total;
        double acc = 0.0;
        for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
            acc += weights[i];
            if (u < acc) return i;
        }
        return weights.size() - 1;
    }

  private:
    std::mt19937_64 gen_;
};

}  // namespace adapts
