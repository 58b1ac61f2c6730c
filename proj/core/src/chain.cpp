#include "dtc/chain.hpp"

#include "dtc/glide_model.hpp"
#include "dtc/num/errors.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <bit>
#include <cmath>
#include <string>

namespace dtc::chain {

using num::kI;

std::string_view to_string(Axis axis) {
    switch (axis) {
    case Axis::x: return "x";
    case Axis::y: return "y";
    case Axis::z: return "z";
    }
    return "?";
}

std::string_view to_string(Boundary boundary) {
    return boundary == Boundary::open ? "open" : "periodic";
}

Axis parse_axis(std::string_view text) {
    if (text == "x") return Axis::x;
    if (text == "y") return Axis::y;
    if (text == "z") return Axis::z;
    throw ValidationError("unknown axis '" + std::string(text) + "' (expected x, y or z)");
}

Boundary parse_boundary(std::string_view text) {
    if (text == "open") return Boundary::open;
    if (text == "periodic") return Boundary::periodic;
    throw ValidationError("unknown boundary '" + std::string(text) + "' (expected open or periodic)");
}

void ChainParams::validate() const {
    if (sites < 1 || sites > kMaxSites) {
        throw ValidationError("ChainParams: sites must lie in [1, " + std::to_string(kMaxSites) + "]");
    }
    if (!std::isfinite(coupling) || std::abs(coupling) > 1.0) {
        throw ValidationError("ChainParams: |J| must not exceed 1 (units of hbar omega)");
    }
    if (!std::isfinite(alpha) || alpha < 0.0) throw ValidationError("ChainParams: alpha must be >= 0");
    if (!std::isfinite(omega) || !(omega > 0.0)) throw ValidationError("ChainParams: omega must be > 0");
    if (!std::isfinite(perturbation_z)) throw ValidationError("ChainParams: perturbation_z must be finite");
}

namespace {

std::size_t site_mask(int sites, int site) {
    return std::size_t{1} << (sites - 1 - site);
}

std::vector<std::pair<int, int>> bonds(const ChainParams& p) {
    std::vector<std::pair<int, int>> out;
    for (int i = 0; i + 1 < p.sites; ++i) out.emplace_back(i, i + 1);
    if (p.boundary == Boundary::periodic && p.sites >= 2) out.emplace_back(p.sites - 1, 0);
    return out;
}

} // namespace

State build_initial_state(int sites, Axis polarization) {
    if (sites < 1 || sites > kMaxSites) {
        throw ValidationError("build_initial_state: sites must lie in [1, " + std::to_string(kMaxSites) + "]");
    }
    const std::size_t dim = std::size_t{1} << sites;
    State psi = State::Zero(static_cast<Eigen::Index>(dim));
    switch (polarization) {
    case Axis::x:
        psi.setConstant(std::pow(2.0, -0.5 * sites));
        break;
    case Axis::y: {
        // (1, i)/sqrt(2) per site: amplitude i^{#down} 2^{-L/2}
        const double scale = std::pow(2.0, -0.5 * sites);
        for (std::size_t s = 0; s < dim; ++s) {
            const int down = std::popcount(s);
            static constexpr Complex kPowers[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
            psi[static_cast<Eigen::Index>(s)] = scale * kPowers[down % 4];
        }
        break;
    }
    case Axis::z:
        psi[0] = 1.0;
        break;
    }
    return psi;
}

void apply_chain_hamiltonian(const ChainParams& p, double t, const State& in, State& out) {
    const std::size_t dim = p.dimension();
    if (static_cast<std::size_t>(in.size()) != dim) {
        throw ValidationError("apply_chain_hamiltonian: state dimension " + std::to_string(in.size()) +
                              " does not match 2^L = " + std::to_string(dim));
    }
    if (static_cast<std::size_t>(out.size()) != dim) out.resize(static_cast<Eigen::Index>(dim));

    const glide::BlochVector h = bloch_vector(glide::GlideModelParams(p.alpha, p.omega), t);
    const Complex up_from_down(h.hx, -h.hy);   // <0|H0|1>
    const Complex down_from_up(h.hx, h.hy);    // <1|H0|0>
    const auto link = bonds(p);
    const Complex* src = in.data();
    Complex* dst = out.data();

    // diagonal: static field and zz couplings
    const bool zz = p.axis == Axis::z;
    for (std::size_t s = 0; s < dim; ++s) {
        double diag = 0.0;
        if (p.perturbation_z != 0.0) {
            diag += p.perturbation_z * (p.sites - 2 * std::popcount(s));
        }
        if (zz) {
            for (const auto& [i, j] : link) {
                const bool bi = s & site_mask(p.sites, i);
                const bool bj = s & site_mask(p.sites, j);
                diag += bi == bj ? p.coupling : -p.coupling;
            }
        }
        dst[s] = diag * src[s];
    }

    for (int i = 0; i < p.sites; ++i) {
        const std::size_t m = site_mask(p.sites, i);
        for (std::size_t s = 0; s < dim; ++s) {
            dst[s] += ((s & m) ? down_from_up : up_from_down) * src[s ^ m];
        }
    }

    if (p.axis != Axis::z && p.coupling != 0.0) {
        for (const auto& [i, j] : link) {
            const std::size_t mi = site_mask(p.sites, i);
            const std::size_t mj = site_mask(p.sites, j);
            const std::size_t flip = mi ^ mj;
            if (p.axis == Axis::x) {
                for (std::size_t s = 0; s < dim; ++s) dst[s] += p.coupling * src[s ^ flip];
            } else {
                // sigma_y sigma_y |ab> = (a == b ? -1 : +1) |~a ~b>
                for (std::size_t s = 0; s < dim; ++s) {
                    const bool same = static_cast<bool>(s & mi) == static_cast<bool>(s & mj);
                    dst[s] += (same ? -p.coupling : p.coupling) * src[s ^ flip];
                }
            }
        }
    }
}

State apply_chain_hamiltonian(const ChainParams& p, double t, const State& in) {
    State out(in.size());
    apply_chain_hamiltonian(p, t, in, out);
    return out;
}

num::Generator chain_generator(const ChainParams& p) {
    p.validate();
    return [p](double t, const State& in, State& out) { apply_chain_hamiltonian(p, t, in, out); };
}

double site_sigma_x(const State& psi, int sites, int site) {
    const std::size_t m = site_mask(sites, site);
    double acc = 0.0;
    for (std::size_t s = 0; s < static_cast<std::size_t>(psi.size()); ++s) {
        acc += (std::conj(psi[static_cast<Eigen::Index>(s)]) * psi[static_cast<Eigen::Index>(s ^ m)]).real();
    }
    return acc;
}

double magnetization_x(const State& psi, int sites) {
    if (static_cast<std::size_t>(psi.size()) != (std::size_t{1} << sites)) {
        throw ValidationError("magnetization_x: state dimension does not match 2^L");
    }
    double acc = 0.0;
    for (int i = 0; i < sites; ++i) acc += site_sigma_x(psi, sites, i);
    return acc / sites;
}

ChainEvolution evolve_chain(const ChainParams& p, const State& psi0, const EvolveOptions& options) {
    p.validate();
    if (options.samples_per_period < 8) {
        throw ValidationError("evolve_chain: samples_per_period must be >= 8");
    }
    if (options.n_periods < 0) throw ValidationError("evolve_chain: n_periods must be >= 0");
    if (static_cast<std::size_t>(psi0.size()) != p.dimension()) {
        throw ValidationError("evolve_chain: initial state dimension does not match 2^L");
    }
    if (std::abs(psi0.norm() - 1.0) > 1e-9) {
        throw ValidationError("evolve_chain: initial state is not normalized");
    }
    if (!(options.tol >= 1e-14 && options.tol <= 1e-6)) {
        throw ValidationError("evolve_chain: tol must lie in [1e-14, 1e-6]");
    }

    ChainEvolution out;
    const double period = p.period();
    const int spp = options.samples_per_period;
    const auto total = static_cast<std::size_t>(options.n_periods) * static_cast<std::size_t>(spp);
    out.magnetization.times.reserve(total + 1);
    out.magnetization.values.reserve(total + 1);

    auto record = [&](double t, const State& psi, std::size_t k) {
        const double mx = magnetization_x(psi, p.sites);
        out.magnetization.times.push_back(t);
        out.magnetization.values.push_back(mx);
        if (options.site_resolved) {
            std::vector<double> row(static_cast<std::size_t>(p.sites));
            for (int i = 0; i < p.sites; ++i) row[static_cast<std::size_t>(i)] = site_sigma_x(psi, p.sites, i);
            out.site_sx.push_back(std::move(row));
        }
        if (k % static_cast<std::size_t>(spp) == 0) {
            out.stroboscopic.push_back(mx);
            if (options.store_states) out.stroboscopic_states.push_back(psi);
        }
        return mx;
    };

    record(0.0, psi0, 0);
    num::IntegratorOptions integrator;
    integrator.tol = options.tol;
    num::SchrodingerStepper stepper(chain_generator(p), psi0, 0.0, integrator);

    for (std::size_t k = 1; k <= total; ++k) {
        const std::size_t n = k / static_cast<std::size_t>(spp);
        const std::size_t r = k % static_cast<std::size_t>(spp);
        // stroboscopic times are exact multiples of T
        const double t = r == 0 ? static_cast<double>(n) * period
                                : (static_cast<double>(n) + static_cast<double>(r) / spp) * period;
        stepper.advance_to(t);
        const double drift = std::abs(stepper.state().norm() - 1.0);
        out.max_norm_drift = std::max(out.max_norm_drift, drift);
        if (drift > 1e-6) {
            throw NumericalError("evolve_chain: norm drift " + std::to_string(drift) +
                                     " exceeds 1e-6 at t = " + std::to_string(t),
                                 drift);
        }
        const double mx = record(t, stepper.state(), k);
        if (r == 0) {
            out.completed_periods = static_cast<int>(n);
            const double z = (n % 2 == 0) ? mx : -mx;
            if (options.stop_below && z < *options.stop_below) break;
        }
    }
    out.stats = stepper.stats();
    return out;
}

Eigen::MatrixXcd floquet_operator(const ChainParams& p, double tol, int workers) {
    p.validate();
    if (!(tol >= 1e-14 && tol <= 1e-6)) {
        throw ValidationError("floquet_operator: tol must lie in [1e-14, 1e-6]");
    }
    const auto dim = static_cast<Eigen::Index>(p.dimension());
    Eigen::MatrixXcd u(dim, dim);
    const auto generator = chain_generator(p);
    std::atomic<Eigen::Index> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto work = [&] {
        num::IntegratorOptions options;
        options.tol = tol;
        for (Eigen::Index col = next++; col < dim; col = next++) {
            try {
                State e = State::Zero(dim);
                e[col] = 1.0;
                num::SchrodingerStepper stepper(generator, e, 0.0, options);
                stepper.advance_to(p.period());
                u.col(col) = stepper.state();
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next = dim;
            }
        }
    };
    const int threads = std::max(1, workers);
    std::vector<std::jthread> pool;
    for (int i = 1; i < threads; ++i) pool.emplace_back(work);
    work();
    pool.clear();
    if (failure) std::rethrow_exception(failure);
    return u;
}

StroboscopicRun stroboscopic_run(const Eigen::MatrixXcd& floquet, const State& psi0, int sites,
                                 int horizon, std::optional<double> stop_below) {
    if (floquet.rows() != psi0.size() || floquet.cols() != psi0.size()) {
        throw ValidationError("stroboscopic_run: propagator and state dimensions differ");
    }
    if (horizon < 0) throw ValidationError("stroboscopic_run: horizon must be >= 0");
    if (std::abs(psi0.norm() - 1.0) > 1e-9) {
        throw ValidationError("stroboscopic_run: initial state is not normalized");
    }
    StroboscopicRun run;
    run.stroboscopic.reserve(static_cast<std::size_t>(horizon) + 1);
    run.stroboscopic.push_back(magnetization_x(psi0, sites));
    State psi = psi0;
    State next(psi0.size());
    for (int n = 1; n <= horizon; ++n) {
        next.noalias() = floquet * psi;
        psi.swap(next);
        const double drift = std::abs(psi.norm() - 1.0);
        run.max_norm_drift = std::max(run.max_norm_drift, drift);
        if (drift > 1e-6) {
            throw NumericalError("stroboscopic_run: norm drift " + std::to_string(drift) +
                                     " exceeds 1e-6 at period " + std::to_string(n),
                                 drift);
        }
        const double mx = magnetization_x(psi, sites);
        run.stroboscopic.push_back(mx);
        run.completed_periods = n;
        const double z = (n % 2 == 0) ? mx : -mx;
        if (stop_below && z < *stop_below) break;
    }
    return run;
}

std::vector<EnvelopePoint> envelope_z(const std::vector<double>& stroboscopic_mx) {
    std::vector<EnvelopePoint> out;
    out.reserve(stroboscopic_mx.size());
    for (std::size_t n = 0; n < stroboscopic_mx.size(); ++n) {
        const double v = stroboscopic_mx[n];
        out.push_back({static_cast<int>(n), (n % 2 == 0) ? v : -v});
    }
    return out;
}

Lifetime lifetime(const std::vector<EnvelopePoint>& z, double threshold) {
    if (!(threshold > 0.0 && threshold < 1.0)) {
        throw ValidationError("lifetime: threshold must lie in (0, 1)");
    }
    for (const auto& point : z) {
        if (point.z < threshold) return {static_cast<double>(point.n), false, threshold};
    }
    return {z.empty() ? 0.0 : static_cast<double>(z.back().n), true, threshold};
}

LifetimeFit scaling_fit(const std::vector<ScalingEntry>& entries) {
    LifetimeFit fit;
    for (const auto& e : entries) {
        if (!e.censored && e.tau > 0.0) fit.entries.push_back(e);
    }
    if (fit.entries.size() < 3) {
        throw ValidationError("scaling_fit: insufficient points for fit (need >= 3 uncensored)");
    }
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (const auto& e : fit.entries) {
        const double x = e.sites;
        const double y = std::log(e.tau);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double n = static_cast<double>(fit.entries.size());
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0) throw ValidationError("scaling_fit: need at least two distinct system sizes");
    fit.b = (n * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.b * sx) / n;
    return fit;
}

num::Spectrum magnetization_spectrum(const num::ObservableSeries& series, double omega) {
    if (series.values.size() < 3) throw ValidationError("magnetization_spectrum: series too short");
    num::ObservableSeries window;
    window.times.assign(series.times.begin(), series.times.end() - 1);
    window.values.assign(series.values.begin(), series.values.end() - 1);
    return num::dft(window, omega);
}

double peak_dominance(const num::Spectrum& spectrum, double frequency) {
    const num::Spectrum one = spectrum.one_sided();
    if (one.magnitude.size() < 2) throw ValidationError("peak_dominance: spectrum too short");
    std::size_t target = 0;
    for (std::size_t k = 1; k < one.frequency.size(); ++k) {
        if (std::abs(one.frequency[k] - frequency) < std::abs(one.frequency[target] - frequency)) target = k;
    }
    double other = 0.0;
    for (std::size_t k = 0; k < one.magnitude.size(); ++k) {
        if (k != target) other = std::max(other, one.magnitude[k]);
    }
    return other > 0.0 ? one.magnitude[target] / other : std::numeric_limits<double>::infinity();
}

} // namespace dtc::chain
