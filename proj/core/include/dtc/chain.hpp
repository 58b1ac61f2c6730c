// chain.hpp — exact state-vector simulation of the driven Ising chain
//
//   H(t) = sum_i H0_i(t) + J sum_<i,j> sigma_mu^i sigma_mu^j + eps sum_i sigma_z^i
//
// Amplitudes are stored in the lexicographic sigma_z product basis: site i is
// bit (L-1-i) of the index and a clear bit means spin up.

#pragma once

#include "dtc/num/dft.hpp"
#include "dtc/num/integrator.hpp"
#include "dtc/num/types.hpp"

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

namespace dtc::chain {

using num::Complex;
using num::State;

enum class Axis { x, y, z };
enum class Boundary { open, periodic };

std::string_view to_string(Axis axis);
std::string_view to_string(Boundary boundary);
Axis parse_axis(std::string_view text);
Boundary parse_boundary(std::string_view text);

inline constexpr int kMaxSites = 14;

struct ChainParams {
    int sites = 8;
    double coupling = 0.2;        // J in units of hbar omega, |J| <= 1
    Axis axis = Axis::x;
    Boundary boundary = Boundary::open;
    double alpha = 0.0;
    double omega = 1.0;
    double perturbation_z = 0.0;  // eps, chiral-symmetry-breaking static field

    void validate() const;
    std::size_t dimension() const noexcept { return std::size_t{1} << sites; }
    double period() const noexcept { return 2.0 * num::kPi / omega; }
};

// Every spin in the +axis eigenstate.
State build_initial_state(int sites, Axis polarization);

// out = H(t) in, matrix-free. ValidationError on dimension mismatch.
void apply_chain_hamiltonian(const ChainParams& p, double t, const State& in, State& out);
State apply_chain_hamiltonian(const ChainParams& p, double t, const State& in);
num::Generator chain_generator(const ChainParams& p);

// (1/L) sum_i <sigma_x^i>
double magnetization_x(const State& psi, int sites);
double site_sigma_x(const State& psi, int sites, int site);

struct EvolveOptions {
    int n_periods = 40;
    int samples_per_period = 16;
    double tol = 1e-9;
    bool store_states = false;
    bool site_resolved = false;
    // stop after the first period n with (-1)^n m_x(nT) below this value
    std::optional<double> stop_below;
};

struct ChainEvolution {
    num::ObservableSeries magnetization;        // m_x at t_k = k T / samples_per_period
    std::vector<double> stroboscopic;           // m_x(nT), n = 0..completed_periods
    std::vector<State> stroboscopic_states;     // when store_states
    std::vector<std::vector<double>> site_sx;   // per sample, per site (when site_resolved)
    num::IntegratorStats stats;
    int completed_periods = 0;
    double max_norm_drift = 0.0;
};

// Requires sites <= 14 and samples_per_period >= 8. Aborts with NumericalError
// when the state norm drifts by more than 1e-6.
ChainEvolution evolve_chain(const ChainParams& p, const State& psi0, const EvolveOptions& options);

// One-period propagator U(T), built column by column with the adaptive
// integrator (no operator splitting). `workers` threads share the columns.
Eigen::MatrixXcd floquet_operator(const ChainParams& p, double tol = 1e-13, int workers = 1);

struct StroboscopicRun {
    std::vector<double> stroboscopic;   // m_x(nT), n = 0..completed_periods
    int completed_periods = 0;
    double max_norm_drift = 0.0;
};

// m_x(nT) from repeated application of U(T); same early-stop rule and 1e-6
// norm-drift abort as evolve_chain.
StroboscopicRun stroboscopic_run(const Eigen::MatrixXcd& floquet, const State& psi0, int sites,
                                 int horizon, std::optional<double> stop_below = std::nullopt);

struct EnvelopePoint {
    int n = 0;
    double z = 0.0;
};

// Z(n) = (-1)^n m_x(nT); values[n] is m_x(nT).
std::vector<EnvelopePoint> envelope_z(const std::vector<double>& stroboscopic_mx);

struct Lifetime {
    double tau = 0.0;        // periods
    bool censored = false;   // threshold never crossed; tau is the horizon
    double threshold = 0.5;
};

// Smallest n with Z(n) < threshold; threshold in (0, 1).
Lifetime lifetime(const std::vector<EnvelopePoint>& z, double threshold = 0.5);

struct ScalingEntry {
    int sites = 0;
    double tau = 0.0;
    bool censored = false;
};

struct LifetimeFit {
    std::vector<ScalingEntry> entries;   // uncensored entries used by the fit
    double b = 0.0;
    double intercept = 0.0;
};

// Least-squares slope of ln tau against L over uncensored entries (>= 3 required).
LifetimeFit scaling_fit(const std::vector<ScalingEntry>& entries);

// Spectrum of m_x over whole periods: drops the closing sample at t = n T.
num::Spectrum magnetization_spectrum(const num::ObservableSeries& series, double omega = 1.0);

// Magnitude at the bin nearest `frequency` (units of omega) divided by the
// largest other one-sided bin.
double peak_dominance(const num::Spectrum& spectrum, double frequency);

} // namespace dtc::chain
