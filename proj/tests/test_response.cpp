#include <cmath>

#include <gtest/gtest.h>

#include "anomalylab/response.hpp"

using namespace anomalylab;

namespace {

// lambda = 0.5 and lambda' = -0.01 at tau = pi/2.
DriveProtocol reference_drive() { return DriveProtocol::periodic(1.0, 0.02, 1.0); }

} // namespace

TEST(AnalyticCurrent, ReferencePoint)
{
    ModelParams p;
    const auto s = analytic_current(p, reference_drive(), M_PI / 2);
    EXPECT_NEAR(s.lambda, 0.5, 1e-15);
    EXPECT_NEAR(s.lambda_prime, -0.01, 1e-15);
    EXPECT_NEAR(s.J_plus, 2.78066e-3, 1e-8);
    EXPECT_NEAR(s.J_minus, -1.61798e-3, 1e-8);
    EXPECT_NEAR(s.J_total, 1.1626854209e-3, 1e-12);
    EXPECT_NEAR(s.J_total, 1.16271e-3, 1e-7);
    EXPECT_EQ(s.n_pairs, 2);
    EXPECT_EQ(s.status, SampleStatus::Regular);
}

TEST(AnalyticCurrent, FamilyTermsHaveClosedForm)
{
    ModelParams p;
    const auto d = DriveProtocol::periodic(1.0, 0.2, 0.1);
    const double tau = 3.7;
    const auto s = analytic_current(p, d, tau);
    const double lp = d.lambda_prime(tau), lam = d.lambda(tau);
    auto j = [&](double u) { return lp / (2.0 * M_PI * std::sqrt(1.0 - u * u)); };
    EXPECT_NEAR(s.J_minus + s.J_plus, j(lam - 0.32) - j(lam + 0.32), 1e-15);
    EXPECT_NEAR(std::abs(s.J_minus), std::abs(j(lam - 0.32)), 1e-15);
}

TEST(AnalyticCurrent, CancelsWithoutImbalance)
{
    ModelParams p;
    p.delta_t = 0.0;
    const auto d = DriveProtocol::periodic(2.44, 0.2, 0.1);
    for (int i = 0; i <= 1000; ++i) {
        const auto s = analytic_current(p, d, 0.1 * i);
        EXPECT_LE(std::abs(s.J_total), 1e-12);
    }
}

TEST(AnalyticCurrent, ConstantDriveIsZero)
{
    ModelParams p;
    for (double lam : {0.3, 0.9, 1.2}) {
        const auto s = analytic_current(p, DriveProtocol::constant(lam), 42.0);
        EXPECT_EQ(s.J_total, 0.0);
    }
}

TEST(AnalyticCurrent, GappedPhaseCarriesNoCurrent)
{
    ModelParams p;
    const auto d = DriveProtocol::periodic(3.5, 0.2, 0.1);
    const auto s = analytic_current(p, d, 4.0);
    EXPECT_EQ(s.n_pairs, 0);
    EXPECT_EQ(s.J_total, 0.0);
}

TEST(AnalyticCurrent, TangencyAtTurningPoint)
{
    ModelParams p;
    const auto d = DriveProtocol::periodic(2.44, 0.2, 0.1);
    const auto s = analytic_current(p, d, 0.0);   // lambda - delta touches 1 with lambda' = 0
    EXPECT_EQ(s.status, SampleStatus::Tangency);
    EXPECT_NEAR(s.J_total, -5.0329212104e-3, 1e-12);
}

TEST(AnalyticCurrent, TransversalCrossingIsFlagged)
{
    ModelParams p;
    const auto d = DriveProtocol::periodic(1.36, 0.2, 0.1);
    const auto s = analytic_current(p, d, M_PI / 0.2);   // lambda + delta = 1 crossed with lambda' != 0
    EXPECT_EQ(s.status, SampleStatus::IntegrableSingularity);
    EXPECT_TRUE(std::isinf(s.J_total));
}

TEST(Lifshitz, TangencyEventsForLargeOffset)
{
    ModelParams p;
    const auto d = DriveProtocol::periodic(2.44, 0.2, 0.1);
    const auto ev = lifshitz_events(p, d, 0.0, 2.0 * M_PI / 0.1 + 1.0);
    ASSERT_EQ(ev.size(), 2u);
    EXPECT_NEAR(ev[0].tau, 0.0, 1e-9);
    EXPECT_NEAR(ev[1].tau, 2.0 * M_PI / 0.1, 1e-9);
    for (const auto& e : ev) {
        EXPECT_EQ(e.kind, LifshitzKind::Tangency);
        EXPECT_EQ(e.family, 1);
        EXPECT_NEAR(e.level, 1.32, 1e-15);
    }
}

TEST(Lifshitz, CrossingsForMidOffset)
{
    ModelParams p;
    const auto d = DriveProtocol::periodic(1.36, 0.2, 0.1);
    const auto ev = lifshitz_events(p, d, 0.0, 100.0);
    ASSERT_EQ(ev.size(), 3u);
    for (size_t n = 0; n < ev.size(); ++n) {
        EXPECT_NEAR(ev[n].tau, M_PI / 0.2 + n * M_PI / 0.1, 1e-9);
        EXPECT_EQ(ev[n].kind, LifshitzKind::Crossing);
        EXPECT_EQ(ev[n].family, 2);
        EXPECT_NEAR(ev[n].level, 0.68, 1e-15);
    }
}

TEST(Lifshitz, ConstantDriveHasNoEvents)
{
    EXPECT_TRUE(lifshitz_events(ModelParams{}, DriveProtocol::constant(0.68), 0.0, 100.0).empty());
}

TEST(Lifshitz, CriticalDeltas)
{
    const auto c = critical_deltas(0.5540302306);
    ASSERT_FALSE(c.empty());
    bool found = false;
    for (double x : c)
        if (std::abs(x - (1.0 - 0.5540302306)) < 1e-12) found = true;
    EXPECT_TRUE(found);
    for (double x : c) {
        EXPECT_GE(x, 0.0);
        EXPECT_LT(x, 1.0);
    }
}

TEST(Drift, MatchesClosedFormAndReference)
{
    ModelParams p;
    const auto d = DriveProtocol::periodic(2.44, 0.2, 0.1);
    const auto taus = uniform_times(0.0, 2.0 * M_PI / 0.1, 401);
    struct Case {
        double rho, peak;
    };
    for (const Case c : {Case{0.1, 1.02416382350}, Case{0.05, 2.04832764700}, Case{0.01, 10.2416382350}}) {
        const auto tr = drift(p, d, c.rho, taus);
        EXPECT_LE(tr.max_disagreement, 1e-8);
        double peak = 0.0;
        for (const auto& s : tr.samples) peak = std::max(peak, std::abs(s.x_c));
        EXPECT_NEAR(peak, c.peak, 1e-6);
        EXPECT_NEAR(tr.samples[200].x_c, -c.peak, 1e-6);   // half period
        EXPECT_NEAR(tr.samples.back().x_c, 0.0, 1e-9);      // closed orbit
    }
}

TEST(Drift, SecondOffsetReference)
{
    ModelParams p;
    const auto d = DriveProtocol::periodic(1.0, 0.2, 0.1);
    const auto tr = drift(p, d, 0.01, uniform_times(0.0, M_PI / 0.1, 3));
    EXPECT_NEAR(std::abs(tr.samples.back().x_c), 2.555545145598, 1e-9);
}

TEST(Drift, ThroughLifshitzCrossings)
{
    ModelParams p;
    const auto d = DriveProtocol::periodic(1.36, 0.2, 0.1);
    const auto tr = drift(p, d, 0.01, uniform_times(0.0, 100.0, 201));
    EXPECT_LE(tr.max_disagreement, 1e-8);
}

TEST(Drift, NoImbalanceNoDrift)
{
    ModelParams p;
    p.delta_t = 0.0;
    const auto tr = drift(p, DriveProtocol::periodic(2.44, 0.2, 0.1), 0.01, uniform_times(0.0, 100.0, 101));
    for (const auto& s : tr.samples) EXPECT_LE(std::abs(s.x_c), 1e-9);
}

TEST(Drift, RejectsBadDensity)
{
    ModelParams p;
    const auto d = DriveProtocol::periodic(2.44, 0.2, 0.1);
    EXPECT_THROW(drift(p, d, 0.0, uniform_times(0.0, 1.0, 2)), DomainError);
    EXPECT_THROW(drift(p, d, 0.1, {}), DomainError);
}

TEST(Density, CurlOfRotationField)
{
    // b = (-y, x)/2 has curl 1 everywhere -> rho_D = 1/(2 pi)
    const auto f = sample_field([](double x, double y) { return std::array<double, 2>{-y / 2, x / 2}; }, 6, 5, -1.0,
                                -1.0, 0.4, 0.5);
    const auto r = density_rho_D(f);
    EXPECT_EQ(r.nx, 4);
    EXPECT_EQ(r.ny, 3);
    for (double v : r.v) EXPECT_NEAR(v, 1.0 / (2.0 * M_PI), 1e-14);
    EXPECT_DOUBLE_EQ(r.x0, -0.6);
}

TEST(Density, GradientFieldHasNoDensity)
{
    const auto f = sample_field(
        [](double x, double y) { return std::array<double, 2>{2 * x * y, x * x}; }, 8, 8, 0.0, 0.0, 0.1, 0.1);
    for (double v : density_rho_D(f).v) EXPECT_NEAR(v, 0.0, 1e-12);
    VectorField2D small;
    small.nx = 2;
    small.ny = 5;
    EXPECT_THROW(density_rho_D(small), DomainError);
}
