#include "tagl/stats.hpp"

#include <cmath>
#include <limits>

#include <boost/math/special_functions/gamma.hpp>

#include "tagl/error.hpp"

namespace tagl {

double chi_square_upper_tail(double x, double df) {
  if (df < 0.0 || !std::isfinite(x)) {
    throw InvalidArgument("chi-square tail needs df >= 0 and finite x");
  }
  if (df == 0.0 || x <= 0.0) return 1.0;
  return boost::math::gamma_q(0.5 * df, 0.5 * x);
}

double log_chi_square_upper_tail(double x, double df) {
  const double p = chi_square_upper_tail(x, df);
  if (p > 0.0) return std::log(p);
  // Leading term of the asymptotic expansion of Q(a, z) for large z:
  // Q ~ z^(a-1) e^(-z) / Gamma(a).
  const double a = 0.5 * df;
  const double z = 0.5 * x;
  return (a - 1.0) * std::log(z) - z - std::lgamma(a);
}

}  // namespace tagl
