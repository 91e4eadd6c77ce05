#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "../error.hpp"
#include "../random.hpp"

namespace moralframe::classifiers {

struct SplitSpec {
  double train_fraction = 2.0 / 3.0;
  std::uint64_t seed = 0;
};

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

// Seeded shuffle, then the first round(n * train_fraction) indices train.
inline Split split(std::size_t n, const SplitSpec& spec) {
  if (n < 3) throw ValidationError("split needs at least 3 items, got " + std::to_string(n));
  if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0)) throw ValidationError("train fraction must be in (0,1)");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(spec.seed);
  shuffle(order, rng);
  const auto n_train = static_cast<std::size_t>(std::llround(static_cast<double>(n) * spec.train_fraction));
  Split s;
  s.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  s.test.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
  return s;
}

} // namespace moralframe::classifiers
