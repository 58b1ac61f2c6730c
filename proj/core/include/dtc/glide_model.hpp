// glide_model.hpp — driven two-level Hamiltonian with a dynamical glide symmetry.
//
//   H(t) = (Omega/2) sin(omega t) sigma_x + Omega sin^2(omega t / 2) sigma_y,   hbar = 1
//
// The glide operator G(t) = [[0, e^{-i omega t}], [1, 0]] commutes with H(t) and
// squares to a full-period time translation phase. Its eigenvalues
// g_chi(t) = chi e^{-i omega t/2} trade places after one period.

#pragma once

#include "dtc/num/integrator.hpp"
#include "dtc/num/types.hpp"

#include <functional>
#include <span>

namespace dtc::glide {

using num::Complex;
using num::Matrix2;
using num::State;

// Band index chi = +1 / -1.
enum class Chi : int { plus = 1, minus = -1 };

constexpr double sign(Chi chi) noexcept { return static_cast<double>(static_cast<int>(chi)); }
constexpr Chi flip(Chi chi) noexcept { return chi == Chi::plus ? Chi::minus : Chi::plus; }

class GlideModelParams {
public:
    // alpha = 8 Omega / omega
    explicit GlideModelParams(double alpha, double omega = 1.0);

    double alpha() const noexcept { return alpha_; }
    double omega() const noexcept { return omega_; }
    double band_amplitude() const noexcept { return alpha_ * omega_ / 8.0; }
    double period() const noexcept { return 2.0 * num::kPi / omega_; }

private:
    double alpha_;
    double omega_;
};

struct InstantaneousEigensystem {
    State phi_plus;
    State phi_minus;
    double e_plus = 0.0;
    double e_minus = 0.0;

    const State& phi(Chi chi) const { return chi == Chi::plus ? phi_plus : phi_minus; }
    double energy(Chi chi) const { return chi == Chi::plus ? e_plus : e_minus; }
};

struct BlochVector {
    double hx = 0.0;
    double hy = 0.0;
    double hz = 0.0;

    double planar_norm() const;
};

Matrix2 hamiltonian(const GlideModelParams& p, double t);
num::Generator generator(const GlideModelParams& p);

Matrix2 glide_operator(const GlideModelParams& p, double t);
Complex glide_eigenvalue(const GlideModelParams& p, double t, Chi chi);

// phi_chi(t) = (chi e^{-i omega t/2}, 1)^T / sqrt(2),  E_chi = chi Omega sin(omega t / 2)
InstantaneousEigensystem instantaneous_eigensystem(const GlideModelParams& p, double t);
State instantaneous_state(const GlideModelParams& p, double t, Chi chi);

// Psi(0) = c_plus phi_+(0) + c_minus phi_-(0)
State state_from_coefficients(Complex c_plus, Complex c_minus);

BlochVector bloch_vector(const GlideModelParams& p, double t);

// Accumulated angle of the normalized planar field (hx, hy) over
// [t0 + epsilon, t1 - epsilon], divided by 2 pi, Richardson-extrapolated to
// epsilon -> 0. Throws NumericalError if |h| < 1e-12 inside the trimmed window.
double winding_number(const std::function<BlochVector(double)>& field, double t0, double t1,
                      double epsilon);
double winding_number(const GlideModelParams& p, double t0, double t1, double epsilon);

// max over the grid of the operator norm of {sigma_z, H(t)}; 0 for an empty grid.
double chiral_check(const std::function<Matrix2(double)>& h, std::span<const double> t_grid);
double chiral_check(const GlideModelParams& p, std::span<const double> t_grid);

} // namespace dtc::glide
