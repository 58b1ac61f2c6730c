// integrator.hpp — adaptive explicit Runge-Kutta integration of i dψ/dt = H(t) ψ.
//
// The pair is Dormand-Prince 8(5,3) with a PI step-size controller. The local
// error estimate is measured in the Euclidean norm of the state, against an
// absolute tolerance; states are never renormalized during integration.

#pragma once

#include "dtc/num/types.hpp"

#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

namespace dtc::num {

// Writes out = H(t) * in. `out` is pre-sized to in.size().
using Generator = std::function<void(double t, const State& in, State& out)>;

// Wraps a dense 2x2 Hamiltonian t -> H(t).
Generator dense_generator(std::function<Matrix2(double)> hamiltonian);

struct IntegratorOptions {
    double tol = 1e-10;
    std::size_t max_steps = 20'000'000;
    double max_step = std::numeric_limits<double>::infinity();
};

struct IntegratorStats {
    std::size_t accepted = 0;
    std::size_t rejected = 0;
    std::size_t evaluations = 0;
    double worst_error = 0.0;   // largest accepted local error estimate (absolute)
};

class SchrodingerStepper {
public:
    SchrodingerStepper(Generator generator, State psi0, double t0, IntegratorOptions options = {});

    // Integrate forward to t (t >= time()). Lands exactly on t.
    void advance_to(double t);

    double time() const noexcept { return t_; }
    const State& state() const noexcept { return psi_; }
    const IntegratorStats& stats() const noexcept { return stats_; }

private:
    bool try_step(double h, double& error);
    void evaluate(double t, const State& psi, State& dpsi);
    double initial_step();

    Generator generator_;
    IntegratorOptions options_;
    State psi_;
    double t_;
    double h_ = 0.0;
    double err_old_ = 1e-4;
    IntegratorStats stats_;

    std::vector<State> k_;
    State stage_;
    State candidate_;
    State scratch_;
    State err3_;
};

// States at every grid point; psi0 must be normalized within 1e-9 and tol in [1e-14, 1e-6].
std::vector<State> integrate_schrodinger(const Generator& generator, const State& psi0,
                                         const TimeGrid& grid, double tol);

// U(t1, t0) for a two-level generator; columns evolve (1,0) and (0,1).
Matrix2 propagator(const Generator& generator, const TimeGrid& grid, double tol);

} // namespace dtc::num
