#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "dtc/num/bessel.hpp"
#include "dtc/num/dft.hpp"
#include "dtc/num/errors.hpp"
#include "dtc/num/integrator.hpp"

using namespace dtc;
using namespace dtc::num;

namespace {

State up() { return (State(2) << 1.0, 0.0).finished(); }

// exp(-i (t1 - t0) w sigma_x / 2) for a static field
Matrix2 rabi(double w, double dt) {
    return std::cos(0.5 * w * dt) * identity2() - kI * std::sin(0.5 * w * dt) * pauli_x();
}

} // namespace

TEST(TimeGrid, UniformPoints) {
    const TimeGrid g(1.0, 3.0, 5);
    EXPECT_DOUBLE_EQ(g.spacing(), 0.5);
    EXPECT_DOUBLE_EQ(g.at(4), 3.0);
    EXPECT_EQ(g.points().size(), 5u);
}

TEST(TimeGrid, RejectsBadSpans) {
    EXPECT_THROW(TimeGrid(0.0, 1.0, 0), ValidationError);
    EXPECT_THROW(TimeGrid(0.0, 1.0, 1), ValidationError);
    EXPECT_THROW(TimeGrid(1.0, 0.0, 3), ValidationError);
    EXPECT_NO_THROW(TimeGrid(2.0, 2.0, 1));
}

TEST(Pauli, AlgebraAndNorm) {
    EXPECT_LT((pauli_x() * pauli_y() - kI * pauli_z()).norm(), 1e-15);
    EXPECT_NEAR(operator_norm(3.0 * pauli_y()), 3.0, 1e-14);
}

TEST(Integrator, StaticFieldMatchesClosedForm) {
    const double w = 2.7;
    const Matrix2 h = 0.5 * w * pauli_x();
    const auto gen = dense_generator([&](double) { return h; });
    const TimeGrid grid(0.0, 10.0, 11);
    const auto states = integrate_schrodinger(gen, up(), grid, 1e-12);
    for (std::size_t k = 0; k < states.size(); ++k) {
        EXPECT_LT((states[k] - rabi(w, grid.at(k)) * up()).norm(), 1e-10) << k;
    }
}

TEST(Integrator, RotatingFrameResonance) {
    // H = (w/2) sigma_z + (g/2)(cos wt sigma_x + sin wt sigma_y): exact Rabi flop in the rotating frame
    const double w = 5.0, g = 0.8;
    const auto gen = dense_generator([&](double t) -> Matrix2 {
        return 0.5 * w * pauli_z() + 0.5 * g * (std::cos(w * t) * pauli_x() + std::sin(w * t) * pauli_y());
    });
    const double t_end = kPi / g;   // population fully transferred
    const auto states = integrate_schrodinger(gen, up(), TimeGrid(0.0, t_end, 2), 1e-12);
    EXPECT_NEAR(std::norm(states.back()[1]), 1.0, 1e-10);
}

TEST(Integrator, PropagatorIsUnitaryAndComposes) {
    const auto gen = dense_generator([](double t) -> Matrix2 {
        return std::sin(t) * pauli_x() + 0.3 * std::cos(2 * t) * pauli_z();
    });
    const Matrix2 u1 = propagator(gen, TimeGrid(0.0, 1.5, 2), 1e-12);
    const Matrix2 u2 = propagator(gen, TimeGrid(0.0, 3.0, 2), 1e-12);
    EXPECT_LT((u1.adjoint() * u1 - identity2()).norm(), 1e-11);

    SchrodingerStepper s(gen, up(), 0.0, {1e-12});
    s.advance_to(1.5);
    s.advance_to(3.0);
    EXPECT_LT((s.state() - u2 * up()).norm(), 1e-10);
}

TEST(Integrator, NormDriftScalesWithTolerance) {
    const auto gen = dense_generator([](double t) -> Matrix2 { return 20.0 * std::cos(t) * pauli_x() + pauli_z(); });
    double previous = 1.0;
    for (double tol : {1e-6, 1e-9, 1e-12}) {
        const auto st = integrate_schrodinger(gen, up(), TimeGrid(0.0, 20.0, 2), tol);
        const double drift = std::abs(st.back().norm() - 1.0);
        EXPECT_LT(drift, 1e3 * tol);
        EXPECT_LE(drift, previous);
        previous = drift;
    }
}

TEST(Integrator, ValidatesInputs) {
    const auto gen = dense_generator([](double) { return pauli_x(); });
    const TimeGrid grid(0.0, 1.0, 2);
    EXPECT_THROW(integrate_schrodinger(gen, up(), grid, 1e-3), ValidationError);
    EXPECT_THROW(integrate_schrodinger(gen, up(), grid, 1e-16), ValidationError);
    EXPECT_THROW(integrate_schrodinger(gen, 2.0 * up(), grid, 1e-10), ValidationError);
}

TEST(Integrator, RefusesToRunBackwards) {
    SchrodingerStepper s(dense_generator([](double) { return pauli_x(); }), up(), 1.0);
    EXPECT_THROW(s.advance_to(0.5), ValidationError);
}

TEST(Integrator, StepBudgetExhaustion) {
    IntegratorOptions opts;
    opts.max_steps = 5;
    SchrodingerStepper s(dense_generator([](double) { return 50.0 * pauli_x(); }), up(), 0.0, opts);
    EXPECT_THROW(s.advance_to(100.0), NumericalError);
}

TEST(Integrator, NonFiniteGeneratorOutput) {
    SchrodingerStepper s(dense_generator([](double t) -> Matrix2 {
                             return (t > 0.5 ? std::nan("") : 1.0) * pauli_x();
                         }),
                         up(), 0.0);
    EXPECT_THROW(s.advance_to(1.0), NumericalError);
}

TEST(Integrator, NonUnitaryPropagatorIsReported) {
    // anti-Hermitian part: norm is not conserved
    const auto gen = dense_generator([](double) -> Matrix2 { return -kI * identity2(); });
    EXPECT_THROW(propagator(gen, TimeGrid(0.0, 1.0, 2), 1e-10), NumericalError);
}

TEST(Dft, PureToneLandsOnItsBin) {
    ObservableSeries s;
    const int n = 64;
    const double dt = 2 * kPi / 16;   // 16 samples per 2 pi
    for (int k = 0; k < n; ++k) {
        s.times.push_back(k * dt);
        s.values.push_back(std::cos(0.5 * k * dt));
    }
    const auto sp = dft(s).one_sided();
    const auto peak = sp.dominant_bin();
    EXPECT_NEAR(sp.frequency[peak], 0.5, 1e-12);
    EXPECT_NEAR(sp.magnitude[peak], 0.5, 1e-12);
    for (std::size_t k = 0; k < sp.magnitude.size(); ++k) {
        if (k != peak) EXPECT_LT(sp.magnitude[k], 1e-12);
    }
}

TEST(Dft, ParsevalIdentity) {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(-1, 1);
    ObservableSeries s;
    double energy = 0;
    for (int k = 0; k < 100; ++k) {
        s.times.push_back(0.1 * k);
        s.values.push_back(u(rng));
        energy += s.values.back() * s.values.back();
    }
    const auto sp = dft(s);
    double spectral = 0;
    for (double m : sp.magnitude) spectral += m * m;
    EXPECT_NEAR(spectral * 100, energy, 1e-10);
}

TEST(Dft, RejectsShortOrIrregularSeries) {
    EXPECT_THROW(dft({{0.0}, {1.0}}), ValidationError);
    EXPECT_THROW(dft({{0.0, 1.0, 3.0}, {1.0, 2.0, 3.0}}), ValidationError);
}

TEST(Bessel, MatchesStandardLibrary) {
    for (double x = 0.0; x <= 120.0; x += 0.173) {
        EXPECT_NEAR(bessel_j0(x), std::cyl_bessel_j(0.0, x), 2e-14) << x;
    }
}

TEST(Bessel, EvenFunctionAndKnownZeros) {
    EXPECT_DOUBLE_EQ(bessel_j0(0.0), 1.0);
    EXPECT_DOUBLE_EQ(bessel_j0(-7.3), bessel_j0(7.3));
    for (double z : {2.404825557695773, 5.520078110286311, 30.63460646843198}) {
        EXPECT_NEAR(bessel_j0(z), 0.0, 1e-14);
    }
}
