#pragma once

namespace dtc::num {

// Bessel function of the first kind, order zero.
double bessel_j0(double x);

} // namespace dtc::num
