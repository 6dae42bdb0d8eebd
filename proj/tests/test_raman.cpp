#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "anomalylab/raman.hpp"

using namespace anomalylab;

TEST(Raman, ReferenceHoppings)
{
    RamanConfig c;
    c.V_L_x = 5.0;
    c.V_R_x = 1.0;
    const HoppingSet h = hoppings(c);
    EXPECT_NEAR(h.t_x / 0.0035919, 1.0, 1e-4);
    EXPECT_NEAR(h.t_x, 0.003591878383047, 1e-15);
    EXPECT_NEAR(h.tp_x / 0.086196, 1.0, 1e-5);
    EXPECT_NEAR(h.tp_x, 0.0861962934, 1e-10);
    // t_x is linear in the Raman strength
    c.V_R_x = 0.37;
    EXPECT_NEAR(hoppings(c).t_x, 0.37 * 0.003591878383047, 1e-15);
}

TEST(Raman, HoppingFormulas)
{
    RamanConfig c;
    c.V_L_x = 6.0;
    c.V_R_x = 0.8;
    c.m_ratio = 1.3;
    c.l_ratio = 0.4;
    const HoppingSet h = hoppings(c);
    const double vx = 6.0, vy = 4.0 * 0.4 * 6.0;
    const double ex = std::exp(-M_PI * M_PI * std::sqrt(vx) / 4), ey = std::exp(-M_PI * M_PI * std::sqrt(vy) / 4);
    const double q = std::exp(-1.0 / std::sqrt(vy));
    EXPECT_NEAR(h.delta_t, 1.3 * 0.8 * ex * (1 - q), 1e-15);
    EXPECT_NEAR(h.t_y, 1.3 * 0.8 * ey * (1 + q), 1e-15);
    EXPECT_NEAR(h.tp_y, 0.25 * 4.0 / std::sqrt(M_PI) * std::pow(vy, 0.75) * std::exp(-2.0 * std::sqrt(vy)), 1e-15);
}

TEST(Raman, DepthConventions)
{
    RamanConfig c;
    c.V_L_x = 5.0;
    c.l_ratio = 0.5;
    EXPECT_DOUBLE_EQ(c.Vt_y(), 10.0);
    EXPECT_DOUBLE_EQ(c.V_L_y(), 2.5);
    c.convention = DepthConvention::Dimensionless;
    EXPECT_DOUBLE_EQ(c.Vt_y(), 2.5);
    EXPECT_EQ(depth_convention_from_string(to_string(c.convention)), DepthConvention::Dimensionless);
}

TEST(Raman, DeepLatticeLimits)
{
    // delta_t -> 0 like 1/sqrt(V_y) and t_y -> 2 V_R_y exp(-pi^2 sqrt(V_y)/4)
    RamanConfig c;
    c.V_L_x = 5.0;
    const double d1 = hoppings(c).delta_t;
    c.l_ratio = 1e6;
    EXPECT_LT(hoppings(c).delta_t, 2e-3 * d1);
    c.l_ratio = 1e3;
    const double vy = c.Vt_y();
    EXPECT_NEAR(hoppings(c).t_y / (c.V_R_y() * std::exp(-M_PI * M_PI * std::sqrt(vy) / 4)), 2.0, 0.01);
}

TEST(Raman, MonotoneInDepth)
{
    RamanConfig c;
    HoppingSet prev;
    bool first = true;
    for (double v = 4.0; v <= 10.0; v += 0.05) {
        c.V_L_x = v;
        const HoppingSet h = hoppings(c);
        if (!first) {
            EXPECT_LT(h.t_x, prev.t_x);
            EXPECT_LT(h.delta_t, prev.delta_t);
            EXPECT_LT(h.t_y, prev.t_y);
            EXPECT_LT(h.tp_x, prev.tp_x);
            EXPECT_LT(h.tp_y, prev.tp_y);
        }
        prev = h;
        first = false;
    }
}

TEST(Raman, LinearInRecoilEnergy)
{
    RamanConfig rb, na;
    rb.species = Species::Rb87;
    na.species = Species::Na23;
    const HoppingSet a = hoppings_hz(rb), b = hoppings_hz(na);
    EXPECT_NEAR(b.t_x / a.t_x, 13.9 / 3.68, 1e-12);
    EXPECT_NEAR(b.tp_y / a.tp_y, 13.9 / 3.68, 1e-12);
    RamanConfig cu;
    cu.species = Species::Custom;
    cu.custom_recoil_hz = 2.0 * kRecoilHzRb87;
    EXPECT_NEAR(hoppings_hz(cu).t_x, 2.0 * a.t_x, 1e-12);
}

TEST(Raman, Validation)
{
    RamanConfig c;
    c.V_L_x = 0.0;
    EXPECT_THROW(hoppings(c), DomainError);
    c.V_L_x = 5.0;
    c.l_ratio = -1.0;
    EXPECT_THROW(hoppings(c), DomainError);
    c.l_ratio = 1.0;
    EXPECT_FALSE(c.tight_binding_warning());
    c.V_L_x = 4.0;
    EXPECT_TRUE(c.tight_binding_warning());
    EXPECT_THROW(species_from_string("k40"), ConfigError);
}

TEST(Potentials, SymmetryIdentities)
{
    RamanConfig c;
    c.V_R_x = 0.7;
    c.m_ratio = 1.9;
    c.l_ratio = 0.8;
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(-20.0, 20.0);
    std::uniform_int_distribution<int> row(-5, 5);
    for (int n = 0; n < 1000; ++n) {
        const double x = u(rng), y = u(rng);
        // periodic in y by a_y
        EXPECT_NEAR(std::abs(potentials(c, x, y).V_R - potentials(c, x, y + 2.0).V_R), 0.0, 1e-12);
        // antiperiodic in x by a_x on the rows y_j (the y part vanishes there)
        const double yj = site_y(row(rng));
        EXPECT_NEAR(std::abs(potentials(c, x, yj).V_R + potentials(c, x + 1.0, yj).V_R), 0.0, 1e-12);
        EXPECT_EQ(potentials(c, x, y).V_R.real(), 0.0);
    }
}

TEST(Potentials, ReferenceValues)
{
    RamanConfig c;
    c.V_R_x = 0.7;
    c.m_ratio = 1.9;
    const auto v = potentials(c, 0.0, 0.0);
    EXPECT_NEAR(v.V_R.imag(), 0.7 + 2.0 * 0.7 * 1.9, 1e-15);
    // trapping minima at x_i = (1/2 + i) a_x, y_j = (1/2 + j) a_y
    for (int i = -3; i <= 3; ++i) {
        const double at = potentials(c, site_x(i), site_y(i)).V_L;
        EXPECT_NEAR(at, 0.0, 1e-14);
        EXPECT_GT(potentials(c, site_x(i) + 0.1, site_y(i)).V_L, at);
        EXPECT_GT(potentials(c, site_x(i), site_y(i) + 0.1).V_L, at);
    }
}

TEST(Wannier, Normalised)
{
    RamanConfig c;
    double sx = 0.0, sy = 0.0;
    const double h = 1e-3;
    for (int i = -5000; i <= 5000; ++i) {
        sx += std::pow(wannier_x(c, i * h), 2) * h;
        sy += std::pow(wannier_y(c, 2 * i * h), 2) * 2 * h;
    }
    EXPECT_NEAR(sx, 1.0, 1e-9);
    EXPECT_NEAR(sy, 1.0, 1e-9);
}

TEST(EqualHopping, FindsTargetAtReferenceDepth)
{
    RamanConfig c;
    c.V_L_x = 5.0;
    const auto s = solve_equal_hopping(c, 0.32);
    ASSERT_EQ(s.size(), 1u);
    EXPECT_LT(s[0].residual_equal, 1e-10);
    EXPECT_LT(s[0].residual_target, 1e-10);
    EXPECT_NEAR(s[0].m_ratio, 0.8450757072, 1e-8);
    EXPECT_NEAR(s[0].l_ratio, 0.2925547902, 1e-8);
    c.m_ratio = s[0].m_ratio;
    c.l_ratio = s[0].l_ratio;
    const HoppingSet h = hoppings(c);
    EXPECT_NEAR(h.t_y / h.t_x, 1.0, 1e-10);
    EXPECT_NEAR(h.delta_t / h.t_x, 0.32, 1e-10);
    EXPECT_TRUE(h.model_regime());
}

TEST(EqualHopping, SmallTargetsApproachZeroM)
{
    RamanConfig c;
    c.V_L_x = 5.0;
    double prev = INFINITY;
    for (double target : {0.32, 0.1, 0.02, 0.005}) {
        const auto s = solve_equal_hopping(c, target);
        ASSERT_EQ(s.size(), 1u) << target;
        EXPECT_LT(s[0].m_ratio, prev);
        prev = s[0].m_ratio;
    }
    EXPECT_LT(prev, 0.01);
}

TEST(EqualHopping, ConventionOnlyRescalesL)
{
    RamanConfig c;
    const auto bare = solve_equal_hopping(c, 0.32);
    c.convention = DepthConvention::Dimensionless;
    const auto dim = solve_equal_hopping(c, 0.32);
    ASSERT_EQ(bare.size(), 1u);
    ASSERT_EQ(dim.size(), 1u);
    EXPECT_NEAR(dim[0].m_ratio, bare[0].m_ratio, 1e-9);
    EXPECT_NEAR(dim[0].l_ratio, 4.0 * bare[0].l_ratio, 1e-8);
}

TEST(EqualHopping, RejectsBadTarget)
{
    EXPECT_THROW(solve_equal_hopping(RamanConfig{}, 0.0), DomainError);
    EXPECT_THROW(solve_equal_hopping(RamanConfig{}, 1.0), DomainError);
    // below exp(-pi^2 sqrt(5)/4) the curve never gets there inside the box
    EXPECT_TRUE(solve_equal_hopping(RamanConfig{}, 1e-4).empty());
}

TEST(Feasibility, FiftyHertzBoundary)
{
    EXPECT_NEAR(feasibility_threshold_hz(0.1), 50.0, 1e-12);
    RamanConfig c;
    // choose V_R_x so that t_x sits just below / above 50 Hz for Na23
    c.species = Species::Na23;
    c.V_L_x = 4.5;
    const double per_unit = hoppings_hz(c).t_x;   // V_R_x = 1
    const double vr = 50.0 / per_unit;
    ASSERT_LT(vr, 1.0);
    const auto fm = feasibility_map(c, {4.5}, {vr * (1 - 1e-9), vr * (1 + 1e-9)});
    EXPECT_FALSE(fm.ok(0, 0));
    EXPECT_TRUE(fm.ok(0, 1));
    EXPECT_NEAR(fm.at(0, 1), 0.05, 1e-9);
}

TEST(Feasibility, SodiumRegionContainsRubidium)
{
    const auto vl = linspace(4.0, 10.0, 61), vr = linspace(0.0, 1.0, 51);
    RamanConfig rb, na;
    na.species = Species::Na23;
    const auto a = feasibility_map(rb, vl, vr), b = feasibility_map(na, vl, vr);
    int na_only = 0;
    for (size_t i = 0; i < vl.size(); ++i)
        for (size_t j = 0; j < vr.size(); ++j) {
            if (a.ok(i, j)) {
                EXPECT_TRUE(b.ok(i, j));
            }
            if (b.ok(i, j) && !a.ok(i, j)) ++na_only;
            if (j == 0) {
                EXPECT_EQ(a.at(i, j), 0.0);
                EXPECT_FALSE(a.ok(i, j));
                EXPECT_FALSE(b.ok(i, j));
            }
        }
    EXPECT_GT(na_only, 0);
}

TEST(Feasibility, RubidiumStaysBelowThreshold)
{
    // The largest Rb87 t_x on the grid (V_L_x = 4, V_R_x = 1) is about 23 Hz,
    // so no point reaches 50 Hz.
    RamanConfig rb;
    const auto fm = feasibility_map(rb, linspace(4.0, 10.0, 31), linspace(0.0, 1.0, 11));
    double best = 0.0;
    for (size_t i = 0; i < fm.t_x_khz.size(); ++i) {
        best = std::max(best, fm.t_x_khz[i]);
        EXPECT_EQ(fm.feasible[i], 0);
    }
    EXPECT_NEAR(best, 3.68 * std::exp(-M_PI * M_PI / 2) * std::exp(-0.125), 1e-12);
    EXPECT_LT(best, 0.05);
}

TEST(Feasibility, GridBounds)
{
    EXPECT_THROW(feasibility_map(RamanConfig{}, {3.0}, {0.5}), DomainError);
    EXPECT_THROW(feasibility_map(RamanConfig{}, {5.0}, {1.5}), DomainError);
}
