#include <cmath>

#include <gtest/gtest.h>

#include "dtc/analysis.hpp"
#include "dtc/heun.hpp"
#include "dtc/num/errors.hpp"

using namespace dtc;
using namespace dtc::analysis;
using num::Complex;
using num::kI;
using num::kPi;
using num::Matrix2;

namespace {
constexpr double kAlpha1 = 4.1827267886;
constexpr double kAlpha3 = 17.0675317368;
} // namespace

TEST(Roots, FirstRootAndResidual) {
    const auto r = find_root(1);
    EXPECT_EQ(r.n, 1);
    EXPECT_NEAR(r.alpha, kAlpha1, 1e-8);
    EXPECT_LT(r.residual, 1e-10);
    EXPECT_LT(r.theta, 0.0);
    EXPECT_NEAR(r.theta, -0.396398, 1e-6);
}

TEST(Roots, BisectionAndMinimizationAgree) {
    for (int n : {2, 7}) {
        RootOptions b, m;
        b.method = RootMethod::bisection;
        m.method = RootMethod::minimization;
        EXPECT_NEAR(find_root(n, b).alpha, find_root(n, m).alpha, 1e-7) << n;
    }
}

TEST(Roots, TableIsOrderedAndInBrackets) {
    const auto roots = find_roots(6);
    ASSERT_EQ(roots.size(), 6u);
    for (const auto& r : roots) {
        EXPECT_GT(r.alpha, 2 * kPi * r.n - kPi);
        EXPECT_LT(r.alpha, 2 * kPi * r.n);
        EXPECT_LT(heun::remain_probability(r.alpha), 1e-18);
    }
    EXPECT_TRUE(find_roots(0).empty());
}

TEST(Roots, Validation) {
    EXPECT_THROW(find_root(0), ValidationError);
    EXPECT_THROW(find_root(51), ValidationError);
    EXPECT_THROW(find_roots(-1), ValidationError);
    RootOptions loose;
    loose.refine_tol = 1e-6;
    EXPECT_THROW(find_root(1, loose), ValidationError);
}

TEST(Roots, ReducedFunctionIsReal) {
    EXPECT_TRUE(reduced_h_minus_is_real(0.5, 30.0));
}

TEST(Floquet, PeriodDoublingAtRoot) {
    const Matrix2 u2 = floquet_operator(kAlpha3, 2);
    EXPECT_LT(num::operator_norm(u2 + num::identity2()), 1e-8);
    const Matrix2 u1 = floquet_operator(kAlpha3, 1);
    EXPECT_LT(num::operator_norm(u1 * u1 - u2), 1e-10);
    EXPECT_THROW(floquet_operator(1.0, 3), ValidationError);
}

TEST(Floquet, ResonantClosedForm) {
    const auto r = find_root(2);
    EXPECT_LT(num::operator_norm(floquet_operator(r.alpha, 1) - resonant_floquet_form(r.alpha, r.theta)), 1e-8);
}

TEST(Floquet, BesselFormAtLargeAlpha) {
    EXPECT_LT(num::operator_norm(floquet_operator(80.0, 1) - bessel_floquet_form(80.0)), 0.02);
    EXPECT_THROW(bessel_floquet_form(0.0), ValidationError);
}

TEST(Floquet, OneStepEqualsHeunTransfer) {
    // phi_+(T) = phi_-(0), so staying in phi_+(0) goes through the off-diagonal entry
    const double a = 6.5;
    const Matrix2 u = floquet_operator(a, 1);
    const glide::GlideModelParams p(a);
    const auto php = glide::instantaneous_state(p, 0.0, glide::Chi::plus);
    EXPECT_NEAR(std::abs(php.dot(u * php)), std::abs(heun::heun_value(a, glide::Chi::minus, 0.5 * kPi)), 1e-9);
}

TEST(BerryPhase, PiAtRootsAndErrorOffRoot) {
    EXPECT_NEAR(berry_phase(kAlpha1), kPi, 1e-7);
    EXPECT_THROW(berry_phase(8.0), NumericalError);
}

TEST(Strobo, PeriodTwoAtRoot) {
    const auto rec = stroboscopic_projections(kAlpha3, glide::state_from_coefficients(1.0, 0.0), 300);
    ASSERT_EQ(rec.size(), 300u);
    EXPECT_EQ(rec.front().n, 1);
    const auto v = classify_periodicity(rec);
    EXPECT_EQ(v.kind, Periodicity::period2);
    EXPECT_EQ(v.cluster_count, 2);
    EXPECT_LT(v.two_period_drift, 1e-8);
}

TEST(Strobo, ErgodicAndPartialCoverage) {
    const auto full = classify_periodicity(stroboscopic_projections(8.0, glide::state_from_coefficients(1.0, 0.0), 300));
    EXPECT_EQ(full.kind, Periodicity::ergodic_like);
    EXPECT_GE(full.coverage_fraction, 0.8);
    const auto part = classify_periodicity(stroboscopic_projections(8.0, glide::state_from_coefficients(0.6, 0.8), 300));
    EXPECT_LT(part.coverage_fraction, 1.0);
    EXPECT_GT(part.cluster_count, 2);
}

TEST(Strobo, ProjectionsStayOnQuarterCircle) {
    const auto rec = stroboscopic_projections(12.0, glide::state_from_coefficients(0.6, 0.8), 100);
    for (const auto& r : rec) EXPECT_NEAR(r.a_plus * r.a_plus + r.a_minus * r.a_minus, 1.0, 1e-10);
}

TEST(Strobo, Validation) {
    const auto psi = glide::state_from_coefficients(1.0, 0.0);
    EXPECT_THROW(stroboscopic_projections(1.0, 2.0 * psi, 10), ValidationError);
    EXPECT_THROW(stroboscopic_projections(1.0, psi, 10001), ValidationError);
    EXPECT_THROW(classify_periodicity(stroboscopic_projections(1.0, psi, 49)), ValidationError);
    ClassifierConfig bad;
    bad.arc_bins = 0;
    EXPECT_THROW(classify_periodicity(stroboscopic_projections(1.0, psi, 60), bad), ValidationError);
}

TEST(Classifier, SyntheticOrbits) {
    std::vector<StroboscopicRecord> fixed, swap;
    for (int n = 1; n <= 60; ++n) {
        fixed.push_back({n, 1.0, 0.0});
        swap.push_back({n, n % 2 ? 0.0 : 1.0, n % 2 ? 1.0 : 0.0});
    }
    EXPECT_EQ(classify_periodicity(fixed).kind, Periodicity::period1);
    EXPECT_EQ(classify_periodicity(swap).kind, Periodicity::period2);
    EXPECT_EQ(to_string(Periodicity::ergodic_like), "ergodic-like");
}

TEST(OffDiagonal, MatchesDressedMatrixElement) {
    const glide::GlideModelParams p(7.0);
    for (double t : {0.5, 2.0, 9.0}) {
        const double x = 0.25 * t;
        const double s = std::sin(x);
        const double dyn = 0.5 * p.alpha() * s * s;
        const num::State a = std::exp(kI * (x - dyn)) * glide::instantaneous_state(p, t, glide::Chi::plus);
        const num::State b = std::exp(kI * (x + dyn)) * glide::instantaneous_state(p, t, glide::Chi::minus);
        const Complex element = b.dot(num::pauli_x() * a);
        EXPECT_LT(std::abs(offdiagonal_observable(p, t) - kI * element), 1e-13) << t;
    }
}
