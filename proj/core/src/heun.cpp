#include "dtc/heun.hpp"

#include "dtc/num/bessel.hpp"
#include "dtc/num/errors.hpp"
#include "dtc/num/integrator.hpp"

#include <cmath>
#include <string>

namespace dtc::heun {

using num::kI;
using num::kPi;

namespace {

constexpr double kMaxSpacing = kPi / 200.0;
constexpr double kPoleTol = 1e-8;

void check_alpha(double alpha) {
    if (!std::isfinite(alpha)) throw ValidationError("heun: alpha must be finite");
}

// Coefficient flow in x: K(x) = [[0, e^{i a s^2}], [e^{-i a s^2}, 0]].
num::Generator coefficient_generator(double alpha) {
    return [alpha](double x, const State& in, State& out) {
        const double s = std::sin(x);
        const Complex phase = std::exp(kI * (alpha * s * s));
        out[0] = phase * in[1];
        out[1] = std::conj(phase) * in[0];
    };
}

std::vector<Matrix2> integrate_transfer(double alpha, const std::vector<double>& xs, double tol) {
    num::IntegratorOptions options;
    options.tol = tol;
    std::vector<Matrix2> out(xs.size());
    for (int col = 0; col < 2; ++col) {
        State e = State::Zero(2);
        e[col] = 1.0;
        num::SchrodingerStepper stepper(coefficient_generator(alpha), e, 0.0, options);
        for (std::size_t k = 0; k < xs.size(); ++k) {
            stepper.advance_to(xs[k]);
            out[k].col(col) = stepper.state();
        }
    }
    return out;
}

Complex value_from_transfer(double alpha, Chi chi, double x, const Matrix2& m) {
    if (chi == Chi::plus) return m(0, 0);
    if (x == 0.0) return 1.0;
    const double s = std::sin(x);
    if (std::abs(s) > kPoleTol) return kI * m(0, 1) / s;
    // x ~ k pi: removable only when M01 vanishes too; then use M01' / cos x,
    // with M01' = -i e^{i a s^2} M11 from the flow.
    if (std::abs(m(0, 1)) > kPoleTol) {
        throw NumericalError("heun: H- has a pole at x = " + std::to_string(x),
                             std::abs(m(0, 1)));
    }
    return std::exp(kI * (alpha * s * s)) * m(1, 1) / std::cos(x);
}

} // namespace

std::vector<Matrix2> transfer_trajectory(double alpha, double x_end, std::size_t intervals,
                                         double tol) {
    check_alpha(alpha);
    if (!(x_end >= 0.0) || !std::isfinite(x_end)) {
        throw ValidationError("transfer_trajectory: x_end must be finite and non-negative");
    }
    if (intervals == 0) throw ValidationError("transfer_trajectory: need at least one interval");
    if (x_end == 0.0) return std::vector<Matrix2>(intervals + 1, Matrix2::Identity());
    const num::TimeGrid grid(0.0, x_end, intervals + 1);
    return integrate_transfer(alpha, grid.points(), tol);
}

Matrix2 coefficient_matrix(double alpha, double x, double tol) {
    check_alpha(alpha);
    if (!std::isfinite(x) || x < 0.0) {
        throw ValidationError("coefficient_matrix: x must be finite and non-negative");
    }
    if (x == 0.0) return Matrix2::Identity();
    return integrate_transfer(alpha, {x}, tol).front();
}

std::vector<HeunValue> solve_coefficients(double alpha, Chi chi, double x_end, double tol) {
    check_alpha(alpha);
    if (!(x_end > 0.0 && x_end <= 4.0 * kPi + 1e-12)) {
        throw ValidationError("solve_coefficients: x_end must lie in (0, 4 pi]");
    }
    if (!(tol <= 1e-10)) throw ValidationError("solve_coefficients: tol must be <= 1e-10");
    const auto intervals = static_cast<std::size_t>(std::ceil(x_end / kMaxSpacing - 1e-9));
    const num::TimeGrid grid(0.0, x_end, intervals + 1);
    const auto xs = grid.points();
    const auto transfer = integrate_transfer(alpha, xs, tol);
    std::vector<HeunValue> out;
    out.reserve(xs.size());
    for (std::size_t k = 0; k < xs.size(); ++k) {
        out.push_back({alpha, xs[k], chi, value_from_transfer(alpha, chi, xs[k], transfer[k])});
    }
    return out;
}

Complex heun_value(double alpha, Chi chi, double x, double tol) {
    return value_from_transfer(alpha, chi, x, coefficient_matrix(alpha, x, tol));
}

double remain_probability(double alpha, double tol) {
    if (!(alpha >= 0.0)) throw ValidationError("remain_probability: alpha must be >= 0");
    return std::norm(coefficient_matrix(alpha, 0.5 * kPi, tol)(0, 1));
}

Complex bessel_asymptotic(double alpha) {
    check_alpha(alpha);
    return std::exp(kI * (0.5 * alpha)) * (0.5 * kPi * num::bessel_j0(0.5 * alpha));
}

HeunCoefficients evolve_coefficients(double alpha, Complex c_plus0, Complex c_minus0, double x,
                                     double tol) {
    const Matrix2 m = coefficient_matrix(alpha, x, tol);
    return {x, m(0, 0) * c_plus0 + m(0, 1) * c_minus0, m(1, 0) * c_plus0 + m(1, 1) * c_minus0};
}

State reconstruct_wavefunction(const glide::GlideModelParams& p, const HeunCoefficients& c,
                               double t) {
    const double x = 0.25 * p.omega() * t;
    if (std::abs(x - c.x) > 1e-12 * std::max(1.0, std::abs(x))) {
        throw ValidationError("reconstruct_wavefunction: coefficients are not evaluated at x = omega t / 4");
    }
    const double s = std::sin(x);
    const double dyn = 0.5 * p.alpha() * s * s;   // integral of E_+ from 0 to t
    const Complex phase_plus = std::exp(kI * (x - dyn));
    const Complex phase_minus = std::exp(kI * (x + dyn));
    return c.c_plus * phase_plus * glide::instantaneous_state(p, t, Chi::plus) +
           c.c_minus * phase_minus * glide::instantaneous_state(p, t, Chi::minus);
}

} // namespace dtc::heun
