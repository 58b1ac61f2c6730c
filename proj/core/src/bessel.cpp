#include "dtc/num/bessel.hpp"

#include "dtc/num/errors.hpp"
#include "dtc/num/types.hpp"

#include <cmath>

namespace dtc::num {

namespace {

constexpr double kSeriesLimit = 12.0;
constexpr double kAsymptoticFrom = 25.0;

// sum_k (-x^2/4)^k / (k!)^2, accumulated in extended precision
double j0_series(double x) {
    const long double q = -0.25L * static_cast<long double>(x) * x;
    long double term = 1.0L;
    long double sum = 1.0L;
    for (int k = 1; k < 200; ++k) {
        term *= q / (static_cast<long double>(k) * k);
        sum += term;
        if (std::fabs(term) < 1e-22L * std::fabs(sum) + 1e-30L) break;
    }
    return static_cast<double>(sum);
}

// Miller's backward recurrence normalized by 1 = J0 + 2 sum_k J_2k.
double j0_recurrence(double x) {
    const int start = 2 * (static_cast<int>(x) + 40);
    double jp1 = 0.0;
    double j = 1e-300;
    double even_sum = 0.0;
    double j0 = 0.0;
    for (int k = start; k >= 1; --k) {
        const double jm1 = (2.0 * k / x) * j - jp1;
        jp1 = j;
        j = jm1;
        if ((k - 1) % 2 == 0 && k - 1 > 0) even_sum += j;
        if (std::fabs(j) > 1e250) {
            j *= 1e-250;
            jp1 *= 1e-250;
            even_sum *= 1e-250;
        }
    }
    j0 = j;
    return j0 / (j0 + 2.0 * even_sum);
}

// Hankel expansion, truncated at the smallest term. With
// u_k = prod_{j<=k} (2j-1)^2 / (k! (8x)^k):
//   P = sum_m (-1)^m u_2m,  Q = -sum_m (-1)^m u_{2m+1}
double j0_asymptotic(double x) {
    double p = 1.0;
    double q = 0.0;
    double u = 1.0;
    for (int k = 1; k < 200; ++k) {
        const double odd = 2.0 * k - 1.0;
        const double next = u * (odd * odd) / (8.0 * k * x);
        if (next > u) break;
        u = next;
        const int m = k / 2;
        const double sign = (m % 2 == 0) ? 1.0 : -1.0;
        if (k % 2 == 0) {
            p += sign * u;
        } else {
            q -= sign * u;
        }
        if (u < 1e-18) break;
    }
    const double chi = x - 0.25 * kPi;
    return std::sqrt(2.0 / (kPi * x)) * (p * std::cos(chi) - q * std::sin(chi));
}

} // namespace

double bessel_j0(double x) {
    if (!std::isfinite(x)) throw ValidationError("bessel_j0: argument must be finite");
    const double ax = std::fabs(x);
    if (ax < kSeriesLimit) return j0_series(ax);
    if (ax < kAsymptoticFrom) return j0_recurrence(ax);
    return j0_asymptotic(ax);
}

} // namespace dtc::num
