#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "negsched/instance.hpp"
#include "negsched/rng.hpp"

// Instance generators: the two adversarial families for the relaxations
// (gap instances and job-class instances), the unit instance family that
// defeats independent rounding, and a seeded random family for tests.

namespace negsched {

// k unit jobs that fit only on machine 1 plus one job of size k^2 that fits
// on any of the other k machines.  All weights 1.  The convex relaxation
// value is ~k^2 while the integral optimum is k(k+1)/2 + k^2, giving the
// 3/2 - O(1/k) gap.
inline Instance gap_instance(int k) {
  if (k < 1) throw std::invalid_argument("gap_instance: k must be >= 1");
  Instance inst(k + 1, k + 1);
  for (int j = 0; j <= k; ++j) inst.weights[j] = 1.0;
  for (int j = 0; j < k; ++j) inst.ptime(0, j) = 1.0;
  const double big = static_cast<double>(k) * k;
  for (int i = 1; i <= k; ++i) inst.ptime(i, k) = big;
  inst.validate();
  return inst;
}

// m unit jobs on m machines, w = p = 1 everywhere.  The uniform fractional
// assignment x = 1/m is feasible for every relaxation; independent rounding
// of it costs a factor 3/2 - 1/(2m) above the optimum.
inline Instance poisson_instance(int m) {
  if (m < 1) throw std::invalid_argument("poisson_instance: m must be >= 1");
  Instance inst(m, m);
  for (int j = 0; j < m; ++j) inst.weights[j] = 1.0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) inst.ptime(i, j) = 1.0;
  inst.validate();
  return inst;
}

// num_classes classes of jobs_per_class identical jobs each; class k has
// weight scale^k and (before normalization) size scale^-k, identical across
// all machines.  Sizes are rescaled so the minimum positive processing time
// is exactly 1, i.e. class k gets size scale^(num_classes - k).
inline Instance class_instance(int num_classes, double scale, int jobs_per_class, int machines) {
  if (num_classes < 1 || jobs_per_class < 1 || machines < 1)
    throw std::invalid_argument("class_instance: counts must be >= 1");
  if (!(scale > 1.0)) throw std::invalid_argument("class_instance: scale must be > 1");
  const int n = num_classes * jobs_per_class;
  Instance inst(machines, n);
  for (int k = 1; k <= num_classes; ++k) {
    const double w = std::pow(scale, k);
    const double p = std::pow(scale, num_classes - k);
    for (int c = 0; c < jobs_per_class; ++c) {
      const int j = (k - 1) * jobs_per_class + c;
      inst.weights[j] = w;
      for (int i = 0; i < machines; ++i) inst.ptime(i, j) = p;
    }
  }
  inst.validate();
  return inst;
}

// Seeded random instance with integer weights and processing times.  Every
// (machine, job) pair is independently forbidden with probability
// forbidden_prob; a job left with no allowed machine has its row redrawn.
inline Instance random_instance(std::uint64_t seed, int n, int m, double forbidden_prob,
                                int ptime_min, int ptime_max, int weight_min, int weight_max) {
  if (n < 1 || m < 1) throw std::invalid_argument("random_instance: counts must be >= 1");
  if (ptime_min < 0 || ptime_max < ptime_min || weight_min < 0 || weight_max < weight_min)
    throw std::invalid_argument("random_instance: bad ranges");
  if (!(forbidden_prob >= 0.0 && forbidden_prob < 1.0))
    throw std::invalid_argument("random_instance: forbidden_prob must be in [0, 1)");
  SplitMix64 rng(derive_seed(seed, 0x1757));
  Instance inst(m, n);
  for (int j = 0; j < n; ++j) {
    const std::uint64_t wspan = static_cast<std::uint64_t>(weight_max - weight_min) + 1;
    inst.weights[j] = static_cast<double>(weight_min + rng.next_below(wspan));
    const std::uint64_t pspan = static_cast<std::uint64_t>(ptime_max - ptime_min) + 1;
    bool any = false;
    while (!any) {
      for (int i = 0; i < m; ++i) {
        if (rng.next_double() < forbidden_prob) {
          inst.ptime(i, j) = kForbidden;
        } else {
          inst.ptime(i, j) = static_cast<double>(ptime_min + rng.next_below(pspan));
          any = true;
        }
      }
    }
  }
  inst.validate();
  return inst;
}

}  // namespace negsched
