#include "dtc/glide_model.hpp"

#include "dtc/num/errors.hpp"

#include <cmath>
#include <vector>

namespace dtc::glide {

using num::kI;
using num::kPi;

GlideModelParams::GlideModelParams(double alpha, double omega) : alpha_(alpha), omega_(omega) {
    if (!std::isfinite(omega) || !(omega > 0.0)) {
        throw ValidationError("GlideModelParams: omega must be positive");
    }
    if (!std::isfinite(alpha) || alpha < 0.0) {
        throw ValidationError("GlideModelParams: alpha must be non-negative");
    }
}

double BlochVector::planar_norm() const { return std::hypot(hx, hy); }

Matrix2 hamiltonian(const GlideModelParams& p, double t) {
    const BlochVector h = bloch_vector(p, t);
    Matrix2 m;
    m << 0.0, Complex(h.hx, -h.hy), Complex(h.hx, h.hy), 0.0;
    return m;
}

num::Generator generator(const GlideModelParams& p) {
    return [p](double t, const State& in, State& out) {
        const BlochVector h = bloch_vector(p, t);
        const Complex lower(h.hx, h.hy);
        out[0] = std::conj(lower) * in[1];
        out[1] = lower * in[0];
    };
}

Matrix2 glide_operator(const GlideModelParams& p, double t) {
    Matrix2 g;
    g << 0.0, std::exp(-kI * (p.omega() * t)), 1.0, 0.0;
    return g;
}

Complex glide_eigenvalue(const GlideModelParams& p, double t, Chi chi) {
    return sign(chi) * std::exp(-kI * (0.5 * p.omega() * t));
}

State instantaneous_state(const GlideModelParams& p, double t, Chi chi) {
    State phi(2);
    phi << sign(chi) * std::exp(-kI * (0.5 * p.omega() * t)), 1.0;
    return phi / std::sqrt(2.0);
}

InstantaneousEigensystem instantaneous_eigensystem(const GlideModelParams& p, double t) {
    InstantaneousEigensystem es;
    es.phi_plus = instantaneous_state(p, t, Chi::plus);
    es.phi_minus = instantaneous_state(p, t, Chi::minus);
    const double e = p.band_amplitude() * std::sin(0.5 * p.omega() * t);
    es.e_plus = e;
    es.e_minus = -e;
    return es;
}

State state_from_coefficients(Complex c_plus, Complex c_minus) {
    const GlideModelParams p(0.0);
    return c_plus * instantaneous_state(p, 0.0, Chi::plus) +
           c_minus * instantaneous_state(p, 0.0, Chi::minus);
}

BlochVector bloch_vector(const GlideModelParams& p, double t) {
    const double om = p.band_amplitude();
    const double half = std::sin(0.5 * p.omega() * t);
    return {0.5 * om * std::sin(p.omega() * t), om * half * half, 0.0};
}

namespace {

constexpr std::size_t kWindingSamples = 8192;

double accumulated_turns(const std::function<BlochVector(double)>& field, double a, double b) {
    const double dt = (b - a) / static_cast<double>(kWindingSamples);
    auto planar = [&](double t) {
        const BlochVector h = field(t);
        const double r = h.planar_norm();
        if (!(r >= 1e-12)) {
            throw NumericalError("winding_number: |h| vanishes inside the trimmed window", r);
        }
        return Complex(h.hx, h.hy) / r;
    };
    Complex previous = planar(a);
    double angle = 0.0;
    for (std::size_t k = 1; k <= kWindingSamples; ++k) {
        const double t = k == kWindingSamples ? b : a + dt * static_cast<double>(k);
        const Complex current = planar(t);
        angle += std::arg(current * std::conj(previous));
        previous = current;
    }
    return angle / (2.0 * kPi);
}

} // namespace

double winding_number(const std::function<BlochVector(double)>& field, double t0, double t1,
                      double epsilon) {
    if (!(t1 > t0)) throw ValidationError("winding_number: empty time span");
    if (!(epsilon > 0.0 && epsilon < (t1 - t0) / 10.0)) {
        throw ValidationError("winding_number: epsilon must lie in (0, span/10)");
    }
    // Neville table in epsilon, halving each level.
    constexpr int kLevels = 4;
    double table[kLevels];
    double eps = epsilon;
    for (int i = 0; i < kLevels; ++i, eps *= 0.5) {
        table[i] = accumulated_turns(field, t0 + eps, t1 - eps);
    }
    for (int level = 1; level < kLevels; ++level) {
        const double factor = std::pow(2.0, level);
        for (int i = kLevels - 1; i >= level; --i) {
            table[i] = (factor * table[i] - table[i - 1]) / (factor - 1.0);
        }
    }
    return table[kLevels - 1];
}

double winding_number(const GlideModelParams& p, double t0, double t1, double epsilon) {
    if (p.alpha() == 0.0) {
        throw NumericalError("winding_number: field vanishes identically at alpha = 0");
    }
    return winding_number([&p](double t) { return bloch_vector(p, t); }, t0, t1, epsilon);
}

double chiral_check(const std::function<Matrix2(double)>& h, std::span<const double> t_grid) {
    const Matrix2 sz = num::pauli_z();
    double worst = 0.0;
    for (double t : t_grid) {
        const Matrix2 hm = h(t);
        worst = std::max(worst, num::operator_norm(sz * hm + hm * sz));
    }
    return worst;
}

double chiral_check(const GlideModelParams& p, std::span<const double> t_grid) {
    return chiral_check([&p](double t) { return hamiltonian(p, t); }, t_grid);
}

} // namespace dtc::glide
