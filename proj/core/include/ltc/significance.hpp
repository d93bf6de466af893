#pragma once

#include <cstddef>

namespace ltc {

struct SignificanceResult {
  double z_stat = 0.0;
  double p_value = 1.0;  // two-sided
  double rate_with = 0.0;
  double rate_baseline = 0.0;
};

// Two-sided two-proportion z-test with pooled variance:
//   z = (k1/n1 - k2/n2) / sqrt(p(1-p)(1/n1 + 1/n2)),  p = (k1+k2)/(n1+n2).
// A pooled rate of exactly 0 or 1 has no variance and yields z = 0, p = 1.
SignificanceResult two_proportion_z_test(std::size_t k1, std::size_t n1, std::size_t k2,
                                         std::size_t n2);

double two_sided_normal_p(double z);

}  // namespace ltc
