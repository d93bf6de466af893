#include "ltc/significance.hpp"

#include <cmath>

#include "ltc/common.hpp"

namespace ltc {

double two_sided_normal_p(double z) { return std::erfc(std::fabs(z) / std::sqrt(2.0)); }

SignificanceResult two_proportion_z_test(std::size_t k1, std::size_t n1, std::size_t k2,
                                         std::size_t n2) {
  if (n1 == 0 || n2 == 0) throw Error("no_cooccurrence", "two-proportion test needs n1, n2 > 0");
  if (k1 > n1 || k2 > n2) throw Error("invalid_argument", "successes exceed trials");
  SignificanceResult r;
  r.rate_with = static_cast<double>(k1) / static_cast<double>(n1);
  r.rate_baseline = static_cast<double>(k2) / static_cast<double>(n2);
  const double pooled = static_cast<double>(k1 + k2) / static_cast<double>(n1 + n2);
  const double var = pooled * (1.0 - pooled) * (1.0 / static_cast<double>(n1) + 1.0 / static_cast<double>(n2));
  if (!(var > 0.0)) return r;
  r.z_stat = (r.rate_with - r.rate_baseline) / std::sqrt(var);
  r.p_value = std::min(1.0, two_sided_normal_p(r.z_stat));
  return r;
}

}  // namespace ltc
