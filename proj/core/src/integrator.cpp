#include "dtc/num/integrator.hpp"

#include "dop853_tableau.hpp"
#include "dtc/num/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

namespace dtc::num {

TimeGrid::TimeGrid(double t0, double t1, std::size_t samples)
    : t0_(t0), t1_(t1), samples_(samples) {
    if (!std::isfinite(t0) || !std::isfinite(t1)) {
        throw ValidationError("TimeGrid: endpoints must be finite");
    }
    if (samples == 0) {
        throw ValidationError("TimeGrid: need at least one sample");
    }
    if (samples == 1 && t1 != t0) {
        throw ValidationError("TimeGrid: a single sample requires t1 == t0");
    }
    if (samples > 1 && !(t1 > t0)) {
        throw ValidationError("TimeGrid: grid must be strictly increasing");
    }
}

double TimeGrid::spacing() const noexcept {
    return samples_ > 1 ? (t1_ - t0_) / static_cast<double>(samples_ - 1) : 0.0;
}

double TimeGrid::at(std::size_t k) const noexcept {
    if (k + 1 == samples_) return t1_;
    return t0_ + spacing() * static_cast<double>(k);
}

std::vector<double> TimeGrid::points() const {
    std::vector<double> out(samples_);
    for (std::size_t k = 0; k < samples_; ++k) out[k] = at(k);
    return out;
}

Generator dense_generator(std::function<Matrix2(double)> hamiltonian) {
    return [h = std::move(hamiltonian)](double t, const State& in, State& out) {
        if (in.size() != 2) {
            throw ValidationError("dense_generator: state dimension must be 2");
        }
        out.noalias() = h(t) * in;
    };
}

namespace {

constexpr double kSafety = 0.9;
constexpr double kBeta = 0.04;                  // PI memory exponent
constexpr double kExpo = 1.0 / 8.0 - kBeta * 0.2;
constexpr double kMaxShrink = 3.0;              // h_new >= h / 3
constexpr double kMaxGrowth = 6.0;              // h_new <= 6 h

bool all_finite(const State& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (!std::isfinite(v[i].real()) || !std::isfinite(v[i].imag())) return false;
    }
    return true;
}

void validate_tol(double tol) {
    if (!(tol >= 1e-14 && tol <= 1e-6)) {
        throw ValidationError("integrator: tol must lie in [1e-14, 1e-6], got " + std::to_string(tol));
    }
}

} // namespace

SchrodingerStepper::SchrodingerStepper(Generator generator, State psi0, double t0,
                                       IntegratorOptions options)
    : generator_(std::move(generator)), options_(options), psi_(std::move(psi0)), t_(t0) {
    if (psi_.size() == 0) throw ValidationError("SchrodingerStepper: empty state");
    if (!std::isfinite(t0)) throw ValidationError("SchrodingerStepper: t0 must be finite");
    if (!(options_.tol > 0.0)) throw ValidationError("SchrodingerStepper: tol must be positive");
    const auto n = psi_.size();
    k_.assign(dop853::kStages + 1, State::Zero(n));
    stage_ = State::Zero(n);
    candidate_ = State::Zero(n);
    scratch_ = State::Zero(n);
    err3_ = State::Zero(n);
}

void SchrodingerStepper::evaluate(double t, const State& psi, State& dpsi) {
    generator_(t, psi, scratch_);
    ++stats_.evaluations;
    if (scratch_.size() != psi.size() || !all_finite(scratch_)) {
        throw NumericalError("integrator: generator produced non-finite output at t = " +
                             std::to_string(t));
    }
    dpsi.noalias() = -kI * scratch_;
}

double SchrodingerStepper::initial_step() {
    evaluate(t_, psi_, k_[0]);
    const double d0 = psi_.norm() / options_.tol;
    const double d1 = k_[0].norm() / options_.tol;
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h0 = std::min(h0, options_.max_step);
    stage_.noalias() = psi_ + h0 * k_[0];
    evaluate(t_ + h0, stage_, k_[1]);
    const double d2 = (k_[1] - k_[0]).norm() / options_.tol / h0;
    const double dmax = std::max(d1, d2);
    const double h1 = dmax <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dmax, 1.0 / 8.0);
    return std::min({100.0 * h0, h1, options_.max_step});
}

// k_[0] must hold f(t_, psi_) on entry.
bool SchrodingerStepper::try_step(double h, double& error) {
    using namespace dop853;
    for (int s = 1; s < kStages; ++s) {
        stage_ = psi_;
        for (int j = 0; j < s; ++j) {
            if (kA[s][j] != 0.0) stage_.noalias() += (h * kA[s][j]) * k_[j];
        }
        evaluate(t_ + kC[s] * h, stage_, k_[s]);
    }
    candidate_ = psi_;
    for (int j = 0; j < kStages; ++j) {
        if (kB[j] != 0.0) candidate_.noalias() += (h * kB[j]) * k_[j];
    }
    evaluate(t_ + h, candidate_, k_[kStages]);

    // reuse stage_ / scratch_ for the two embedded error vectors
    stage_.setZero();
    State& err5 = stage_;
    State& err3 = err3_;
    err3.setZero();
    for (int j = 0; j <= kStages; ++j) {
        if (kE5[j] != 0.0) err5.noalias() += kE5[j] * k_[j];
        if (kE3[j] != 0.0) err3.noalias() += kE3[j] * k_[j];
    }
    const double e5 = err5.squaredNorm();
    const double e3 = err3.squaredNorm();
    if (e5 == 0.0 && e3 == 0.0) {
        error = 0.0;
    } else {
        error = std::abs(h) * e5 / std::sqrt(e5 + 0.01 * e3) / options_.tol;
    }
    return std::isfinite(error);
}

void SchrodingerStepper::advance_to(double t) {
    if (!(t >= t_)) {
        throw ValidationError("SchrodingerStepper: target time lies behind the current time");
    }
    if (t == t_) return;
    if (h_ == 0.0) h_ = initial_step();

    while (t_ < t) {
        if (stats_.accepted + stats_.rejected >= options_.max_steps) {
            throw NumericalError("integrator: step budget exhausted before reaching t = " +
                                     std::to_string(t) + " (worst local error " +
                                     std::to_string(stats_.worst_error) + ")",
                                 stats_.worst_error);
        }
        const double remaining = t - t_;
        double h = h_;
        bool last = false;
        if (h >= remaining) {
            h = remaining;
            last = true;
        }
        if (h <= 1e-14 * std::max(1.0, std::abs(t_))) {
            throw NumericalError("integrator: step size underflow at t = " + std::to_string(t_),
                                 stats_.worst_error);
        }

        double err = 0.0;
        if (!try_step(h, err)) {
            ++stats_.rejected;
            h_ = h / kMaxShrink;
            continue;
        }

        const double fac11 = std::pow(err, kExpo);
        if (err <= 1.0) {
            double fac = fac11 / std::pow(err_old_, kBeta);
            fac = std::clamp(fac / kSafety, 1.0 / kMaxGrowth, kMaxShrink);
            const double h_new = std::min(h / fac, options_.max_step);
            err_old_ = std::max(err, 1e-4);
            stats_.worst_error = std::max(stats_.worst_error, err * options_.tol);
            ++stats_.accepted;
            psi_.swap(candidate_);
            std::swap(k_[0], k_[dop853::kStages]);
            t_ = last ? t : t_ + h;
            h_ = last ? std::max(h_new, h_) : h_new;
        } else {
            ++stats_.rejected;
            h_ = h / std::min(kMaxShrink, fac11 / kSafety);
        }
    }
}

std::vector<State> integrate_schrodinger(const Generator& generator, const State& psi0,
                                         const TimeGrid& grid, double tol) {
    validate_tol(tol);
    if (std::abs(psi0.norm() - 1.0) > 1e-9) {
        throw ValidationError("integrate_schrodinger: initial state is not normalized");
    }
    IntegratorOptions options;
    options.tol = tol;
    SchrodingerStepper stepper(generator, psi0, grid.t0(), options);
    std::vector<State> out;
    out.reserve(grid.samples());
    for (std::size_t k = 0; k < grid.samples(); ++k) {
        stepper.advance_to(grid.at(k));
        out.push_back(stepper.state());
    }
    return out;
}

Matrix2 propagator(const Generator& generator, const TimeGrid& grid, double tol) {
    validate_tol(tol);
    Matrix2 u;
    for (int col = 0; col < 2; ++col) {
        State e = State::Zero(2);
        e[col] = 1.0;
        IntegratorOptions options;
        options.tol = tol;
        SchrodingerStepper stepper(generator, e, grid.t0(), options);
        stepper.advance_to(grid.t1());
        u.col(col) = stepper.state();
    }
    const double defect = operator_norm(u.adjoint() * u - Matrix2::Identity());
    if (defect > 1e-8) {
        throw NumericalError("propagator: result not unitary within 1e-8", defect);
    }
    return u;
}

} // namespace dtc::num
