#include "dtc/analysis.hpp"

#include "dtc/heun.hpp"
#include "dtc/num/bessel.hpp"
#include "dtc/num/errors.hpp"
#include "dtc/num/integrator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

namespace dtc::analysis {

using num::kI;
using num::kPi;

namespace {

constexpr int kScanIntervals = 32;
constexpr double kGolden = 0.6180339887498949;

// H-(a, pi/2) = i M01(pi/2) since sin(pi/2) = 1.
Complex h_minus_half(double alpha, double tol) {
    return kI * heun::coefficient_matrix(alpha, 0.5 * kPi, tol)(0, 1);
}

Complex reduced(double alpha, double tol) {
    return std::exp(-kI * (0.5 * alpha)) * h_minus_half(alpha, tol);
}

double bisect_root(int n, double lo, double hi, double tol) {
    std::array<double, kScanIntervals + 1> g{};
    const double width = (hi - lo) / kScanIntervals;
    for (int i = 0; i <= kScanIntervals; ++i) g[i] = reduced(lo + width * i, tol).real();
    int crossings = 0;
    int where = -1;
    for (int i = 0; i < kScanIntervals; ++i) {
        if (g[i] == 0.0) {
            ++crossings;
            where = i;
        } else if (g[i] * g[i + 1] < 0.0) {
            ++crossings;
            where = i;
        }
    }
    if (crossings != 1) {
        throw NumericalError("find_roots: bracket for n = " + std::to_string(n) + " holds " +
                                 std::to_string(crossings) + " sign changes",
                             static_cast<double>(crossings));
    }
    double a = lo + width * where;
    double b = a + width;
    double ga = g[where];
    if (ga == 0.0) return a;
    for (int it = 0; it < 200 && (b - a) > 4e-16 * b; ++it) {
        const double mid = 0.5 * (a + b);
        const double gm = reduced(mid, tol).real();
        if (gm == 0.0) return mid;
        if ((gm < 0.0) == (ga < 0.0)) {
            a = mid;
            ga = gm;
        } else {
            b = mid;
        }
    }
    return 0.5 * (a + b);
}

double minimize_root(double lo, double hi, double tol) {
    auto modulus = [tol](double a) { return std::abs(h_minus_half(a, tol)); };
    const double width = (hi - lo) / kScanIntervals;
    int best = 0;
    double best_value = modulus(lo);
    for (int i = 1; i <= kScanIntervals; ++i) {
        const double v = modulus(lo + width * i);
        if (v < best_value) {
            best_value = v;
            best = i;
        }
    }
    double a = std::max(lo, lo + width * (best - 1));
    double b = std::min(hi, lo + width * (best + 1));
    double c = b - kGolden * (b - a);
    double d = a + kGolden * (b - a);
    double fc = modulus(c);
    double fd = modulus(d);
    while (b - a > 1e-12 * std::max(1.0, b)) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - kGolden * (b - a);
            fc = modulus(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + kGolden * (b - a);
            fd = modulus(d);
        }
    }
    double x = 0.5 * (a + b);
    // |H-|^2 is locally quadratic around a simple complex zero: take the parabola vertex.
    const double h = 1e-5;
    const double f0 = std::norm(h_minus_half(x - h, tol));
    const double f1 = std::norm(h_minus_half(x, tol));
    const double f2 = std::norm(h_minus_half(x + h, tol));
    const double denom = f0 - 2.0 * f1 + f2;
    if (denom > 0.0) {
        const double vertex = x + 0.5 * h * (f0 - f2) / denom;
        if (std::abs(vertex - x) < h && modulus(vertex) < std::sqrt(f1)) x = vertex;
    }
    return x;
}

} // namespace

bool reduced_h_minus_is_real(double alpha_lo, double alpha_hi, double tol) {
    constexpr int kProbes = 9;
    for (int i = 0; i < kProbes; ++i) {
        const double a = alpha_lo + (alpha_hi - alpha_lo) * i / (kProbes - 1);
        const Complex g = reduced(a, tol);
        if (std::abs(g.imag()) > 1e-9 * std::max(1.0, std::abs(g.real()))) return false;
    }
    return true;
}

RootEntry find_root(int n, const RootOptions& options) {
    if (n < 1 || n > 50) throw ValidationError("find_root: n must lie in [1, 50]");
    if (!(options.refine_tol > 0.0 && options.refine_tol <= 1e-10)) {
        throw ValidationError("find_root: refine_tol must lie in (0, 1e-10]");
    }
    const double lo = 2.0 * kPi * n - kPi;
    const double hi = 2.0 * kPi * n;
    const double tol = options.integration_tol;

    RootMethod method = options.method;
    if (method == RootMethod::automatic) {
        method = reduced_h_minus_is_real(lo, hi, tol) ? RootMethod::bisection
                                                      : RootMethod::minimization;
    }
    const double alpha = method == RootMethod::bisection ? bisect_root(n, lo, hi, tol)
                                                         : minimize_root(lo, hi, tol);

    const Matrix2 m = heun::coefficient_matrix(alpha, 0.5 * kPi, tol);
    RootEntry entry{n, alpha, std::arg(m(0, 0)), std::abs(m(0, 1))};
    if (entry.residual > options.refine_tol) {
        throw NumericalError("find_roots: |H-| floor " + std::to_string(entry.residual) +
                                 " above refine_tol for n = " + std::to_string(n),
                             entry.residual);
    }
    return entry;
}

std::vector<RootEntry> find_roots(int n_max, const RootOptions& options) {
    if (n_max < 0 || n_max > 50) throw ValidationError("find_roots: n_max must lie in [0, 50]");
    std::vector<RootEntry> roots;
    roots.reserve(static_cast<std::size_t>(n_max));
    for (int n = 1; n <= n_max; ++n) roots.push_back(find_root(n, options));
    return roots;
}

Matrix2 floquet_operator(double alpha, int periods, double tol) {
    if (periods != 1 && periods != 2) {
        throw ValidationError("floquet_operator: periods must be 1 or 2");
    }
    const glide::GlideModelParams p(alpha);
    const num::TimeGrid span(0.0, periods * p.period(), 2);
    return num::propagator(glide::generator(p), span, tol);
}

namespace {

// exp(-i sigma_x phi)
Matrix2 rotation_x(double phi) {
    return std::cos(phi) * Matrix2::Identity() - kI * std::sin(phi) * num::pauli_x();
}

} // namespace

Matrix2 resonant_floquet_form(double alpha, double theta) {
    return -kI * num::pauli_z() * rotation_x(0.5 * alpha - theta);
}

Matrix2 bessel_floquet_form(double alpha) {
    if (!(alpha > 0.0)) throw ValidationError("bessel_floquet_form: alpha must be positive");
    const double b = 0.5 * kPi * num::bessel_j0(0.5 * alpha);
    const double stay = std::sqrt(std::max(0.0, 1.0 - b * b));
    const Matrix2 front = -kI * stay * num::pauli_z() +
                          std::exp(kI * (0.5 * alpha)) * b * Matrix2::Identity();
    // theta_n ~ -pi / alpha_n in the arg H+ convention
    return front * rotation_x(0.5 * alpha + kPi / alpha);
}

double berry_phase(double alpha, double tol) {
    const Matrix2 u2 = floquet_operator(alpha, 2, tol);
    const glide::GlideModelParams p(alpha);
    const State phi = glide::instantaneous_state(p, 0.0, glide::Chi::plus);
    const Complex amp = phi.dot(u2 * phi);
    if (std::abs(amp) < 0.99) {
        throw NumericalError("berry_phase: not a closed cycle at this alpha", std::abs(amp));
    }
    double phase = std::arg(amp);
    if (phase < 0.0) phase += 2.0 * kPi;
    return phase;
}

std::vector<StroboscopicRecord> stroboscopic_projections(const Matrix2& one_period,
                                                         const State& psi0, int n_periods) {
    if (psi0.size() != 2) throw ValidationError("stroboscopic_projections: need a two-level state");
    if (std::abs(psi0.norm() - 1.0) > 1e-9) {
        throw ValidationError("stroboscopic_projections: psi0 is not normalized");
    }
    if (n_periods < 0 || n_periods > 10000) {
        throw ValidationError("stroboscopic_projections: n_periods must lie in [0, 10^4]");
    }
    const glide::GlideModelParams p(0.0);
    const State phi_p = glide::instantaneous_state(p, 0.0, glide::Chi::plus);
    const State phi_m = glide::instantaneous_state(p, 0.0, glide::Chi::minus);
    std::vector<StroboscopicRecord> out;
    out.reserve(static_cast<std::size_t>(n_periods));
    State psi = psi0;
    for (int n = 1; n <= n_periods; ++n) {
        psi = one_period * psi;
        out.push_back({n, std::abs(phi_p.dot(psi)), std::abs(phi_m.dot(psi))});
    }
    return out;
}

std::vector<StroboscopicRecord> stroboscopic_projections(double alpha, const State& psi0,
                                                         int n_periods, double tol) {
    return stroboscopic_projections(floquet_operator(alpha, 1, tol), psi0, n_periods);
}

std::string_view to_string(Periodicity kind) {
    switch (kind) {
    case Periodicity::period1: return "period-1";
    case Periodicity::period2: return "period-2";
    case Periodicity::ergodic_like: return "ergodic-like";
    case Periodicity::quasi_periodic: return "quasi-periodic";
    }
    return "unknown";
}

PeriodicityVerdict classify_periodicity(const std::vector<StroboscopicRecord>& records,
                                        const ClassifierConfig& config) {
    if (records.size() < 50) throw ValidationError("classify_periodicity: need >= 50 records");
    if (config.arc_bins < 1) throw ValidationError("classify_periodicity: arc_bins must be >= 1");
    if (!(config.cluster_tol > 0.0)) {
        throw ValidationError("classify_periodicity: cluster_tol must be positive");
    }

    std::vector<std::array<double, 2>> centers;
    std::vector<bool> occupied(static_cast<std::size_t>(config.arc_bins), false);
    for (const auto& r : records) {
        const bool known = std::any_of(centers.begin(), centers.end(), [&](const auto& c) {
            return std::hypot(r.a_plus - c[0], r.a_minus - c[1]) <= config.cluster_tol;
        });
        if (!known) centers.push_back({r.a_plus, r.a_minus});
        const double angle = std::atan2(r.a_minus, r.a_plus);
        auto bin = static_cast<int>(angle / (0.5 * kPi) * config.arc_bins);
        bin = std::clamp(bin, 0, config.arc_bins - 1);
        occupied[static_cast<std::size_t>(bin)] = true;
    }

    PeriodicityVerdict verdict;
    verdict.cluster_count = static_cast<int>(centers.size());
    verdict.coverage_fraction =
        static_cast<double>(std::count(occupied.begin(), occupied.end(), true)) / config.arc_bins;
    double drift = 0.0;
    for (std::size_t i = 0; i + 2 < records.size(); ++i) {
        drift += std::hypot(records[i + 2].a_plus - records[i].a_plus,
                            records[i + 2].a_minus - records[i].a_minus);
    }
    verdict.two_period_drift = drift / static_cast<double>(records.size() - 2);

    if (verdict.cluster_count == 1) {
        verdict.kind = Periodicity::period1;
    } else if (verdict.cluster_count == 2) {
        verdict.kind = Periodicity::period2;
    } else if (verdict.coverage_fraction >= config.ergodic_coverage) {
        verdict.kind = Periodicity::ergodic_like;
    } else {
        verdict.kind = Periodicity::quasi_periodic;
    }
    return verdict;
}

Complex offdiagonal_observable(const glide::GlideModelParams& p, double t) {
    const double s = std::sin(0.25 * p.omega() * t);
    return std::exp(-kI * (p.alpha() * s * s)) * std::sin(0.5 * p.omega() * t);
}

} // namespace dtc::analysis
