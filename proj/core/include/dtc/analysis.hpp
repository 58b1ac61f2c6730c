// analysis.hpp — resonance roots, Floquet operators and stroboscopic portraits.

#pragma once

#include "dtc/glide_model.hpp"
#include "dtc/num/types.hpp"

#include <optional>
#include <string_view>
#include <vector>

namespace dtc::analysis {

using num::Complex;
using num::Matrix2;
using num::State;

// alpha_n is a zero of H-(alpha, pi/2); theta_n = arg H+(alpha_n, pi/2) in (-pi, pi].
struct RootEntry {
    int n = 0;
    double alpha = 0.0;
    double theta = 0.0;
    double residual = 0.0;   // |H-(alpha_n, pi/2)|
};

enum class RootMethod {
    automatic,   // bisection if e^{-i a/2} H-(a, pi/2) is real over the bracket, else minimization
    bisection,
    minimization,
};

struct RootOptions {
    double refine_tol = 1e-10;
    double integration_tol = 1e-13;
    RootMethod method = RootMethod::automatic;
};

// Root n is searched in [2 pi n - pi, 2 pi n]; n_max <= 50.
std::vector<RootEntry> find_roots(int n_max, const RootOptions& options = {});
RootEntry find_root(int n, const RootOptions& options = {});

// True if e^{-i a/2} H-(a, pi/2) has |Im| <= 1e-9 max(1, |Re|) at every probe.
bool reduced_h_minus_is_real(double alpha_lo, double alpha_hi, double tol = 1e-13);

// U(periods T) of the two-level model (omega = 1); periods in {1, 2}.
Matrix2 floquet_operator(double alpha, int periods, double tol = 1e-12);

// -i sigma_z exp(-i sigma_x (alpha/2 - theta))
Matrix2 resonant_floquet_form(double alpha, double theta);
// [-i sigma_z sqrt(1 - b^2) + e^{i a/2} b] exp(-i sigma_x (a/2 + pi/a)),  b = (pi/2) J0(a/2)
Matrix2 bessel_floquet_form(double alpha);

// arg <phi_+(0)| U(2T) |phi_+(0)> in [0, 2 pi). NumericalError below 0.99 modulus.
double berry_phase(double alpha, double tol = 1e-12);

struct StroboscopicRecord {
    int n = 0;
    double a_plus = 0.0;
    double a_minus = 0.0;
};

// a_chi(n) = |<phi_chi(0)| U(T)^n psi0>| for n = 1..n_periods.
std::vector<StroboscopicRecord> stroboscopic_projections(double alpha, const State& psi0,
                                                         int n_periods, double tol = 1e-12);
std::vector<StroboscopicRecord> stroboscopic_projections(const Matrix2& one_period,
                                                         const State& psi0, int n_periods);

enum class Periodicity { period1, period2, ergodic_like, quasi_periodic };
std::string_view to_string(Periodicity kind);

// Thresholds for classify_periodicity.
struct ClassifierConfig {
    double cluster_tol = 1e-6;         // use ~0.02 for near-root runs
    int arc_bins = 20;
    double ergodic_coverage = 0.8;
};

struct PeriodicityVerdict {
    Periodicity kind = Periodicity::quasi_periodic;
    int cluster_count = 0;
    double coverage_fraction = 0.0;
    // mean |r(n+2) - r(n)| over the record; 0 for an exact period-2 orbit
    double two_period_drift = 0.0;
};

// Requires >= 50 records.
PeriodicityVerdict classify_periodicity(const std::vector<StroboscopicRecord>& records,
                                        const ClassifierConfig& config = {});

// e^{-i alpha sin^2(omega t/4)} sin(omega t/2)
Complex offdiagonal_observable(const glide::GlideModelParams& p, double t);

} // namespace dtc::analysis
