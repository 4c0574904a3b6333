#pragma once

namespace tagl {

// P(X >= x) for X ~ chi-square(df). df == 0 gives 1 for any x >= 0.
double chi_square_upper_tail(double x, double df);

// Natural log of the same tail, usable where the tail underflows.
double log_chi_square_upper_tail(double x, double df);

}  // namespace tagl
