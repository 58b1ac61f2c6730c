// heun.hpp — exact instantaneous-basis coefficients of the glide model.
//
// With x = omega t / 4 and the ansatz
//   Psi(t) = sum_chi c_chi(x) exp(i omega t/4 - i chi (alpha/2) sin^2 x) phi_chi(t),
// the coefficients obey the Hermitian first-order flow
//   i c_chi'(x) = exp(i chi alpha sin^2 x) c_{-chi}(x),
// equivalently c'' - i chi alpha sin(2x) c' + c = 0 for each component. Its
// transfer matrix is
//   M(x) = [[ H+(a,x),              -i sin x H-(a,x) ],
//           [ -i sin x conj(H-(a,x)),  conj(H+(a,x))  ]],
// which defines the confluent Heun values H+ and H-, both equal to 1 with zero
// slope at x = 0. H- has poles at x = k pi (k >= 1) unless the transfer matrix
// entry it is recovered from also vanishes there.

#pragma once

#include "dtc/glide_model.hpp"
#include "dtc/num/types.hpp"

#include <vector>

namespace dtc::heun {

using glide::Chi;
using num::Complex;
using num::Matrix2;
using num::State;

inline constexpr double kDefaultTol = 1e-12;

struct HeunValue {
    double alpha = 0.0;
    double x = 0.0;
    Chi chi = Chi::plus;
    Complex value;
};

struct HeunCoefficients {
    double x = 0.0;
    Complex c_plus;
    Complex c_minus;
};

// Transfer matrices M(x_k) of the coefficient flow on a uniform grid over [0, x_end].
std::vector<Matrix2> transfer_trajectory(double alpha, double x_end, std::size_t intervals,
                                         double tol = kDefaultTol);
Matrix2 coefficient_matrix(double alpha, double x, double tol = kDefaultTol);

// H^chi(alpha, x_k) on a uniform grid with spacing <= pi/200 ending exactly at x_end.
// Requires x_end in (0, 4 pi] and tol <= 1e-10; alpha may be negative.
std::vector<HeunValue> solve_coefficients(double alpha, Chi chi, double x_end,
                                          double tol = kDefaultTol);
Complex heun_value(double alpha, Chi chi, double x, double tol = kDefaultTol);

// rho(T) = |H-(alpha, pi/2)|^2: probability of remaining in phi_+(0) after one period.
double remain_probability(double alpha, double tol = kDefaultTol);

// e^{i alpha/2} (pi/2) J0(alpha/2), the large-alpha form of H-(alpha, pi/2).
Complex bessel_asymptotic(double alpha);

// c(x) = M(x) c(0)
HeunCoefficients evolve_coefficients(double alpha, Complex c_plus0, Complex c_minus0, double x,
                                     double tol = kDefaultTol);

// Psi(t) from the coefficients at x = omega t / 4.
State reconstruct_wavefunction(const glide::GlideModelParams& p, const HeunCoefficients& c,
                               double t);

} // namespace dtc::heun
