#pragma once

#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/tools/roots.hpp>

#include "errors.hpp"

namespace anomalylab {

// Optical Raman-lattice calibration. All energies are expressed in units of
// the x recoil energy E_R_x unless a function name says otherwise; lengths
// are in units of the trapping-lattice constant a_x (a_y = 2 a_x).

enum class Species { Rb87, Na23, Custom };

// Recoil energies E_R_x / h for the 790.1 nm trapping laser.
inline constexpr double kRecoilHzRb87 = 3680.0;
inline constexpr double kRecoilHzNa23 = 13900.0;
inline constexpr double kDefaultWavelengthNm = 790.1;

// How V_L_y = l * V_L_x is read. BareDepth compares depths in absolute
// energy units, so the dimensionless y depth picks up E_R_x / E_R_y = 4.
// Dimensionless compares the depths already divided by their own recoil.
enum class DepthConvention { BareDepth, Dimensionless };

inline std::string to_string(Species s)
{
    switch (s) {
    case Species::Rb87: return "rb87";
    case Species::Na23: return "na23";
    case Species::Custom: return "custom";
    }
    return "?";
}

inline Species species_from_string(const std::string& s)
{
    if (s == "rb87" || s == "Rb87") return Species::Rb87;
    if (s == "na23" || s == "Na23") return Species::Na23;
    if (s == "custom" || s == "Custom") return Species::Custom;
    throw ConfigError("unknown species '" + s + "'");
}

inline std::string to_string(DepthConvention c)
{
    return c == DepthConvention::BareDepth ? "bare" : "dimensionless";
}

inline DepthConvention depth_convention_from_string(const std::string& s)
{
    if (s == "bare") return DepthConvention::BareDepth;
    if (s == "dimensionless") return DepthConvention::Dimensionless;
    throw ConfigError("unknown depth convention '" + s + "'");
}

struct RamanConfig {
    double V_L_x = 5.0;  // trapping depth along x, in E_R_x
    double V_R_x = 1.0;  // Raman strength along x, in E_R_x
    double m_ratio = 1.0; // V_R_y = m * V_R_x
    double l_ratio = 1.0; // V_L_y = l * V_L_x (see DepthConvention)
    Species species = Species::Rb87;
    double custom_recoil_hz = kRecoilHzRb87; // used when species == Custom
    double wavelength_nm = kDefaultWavelengthNm;
    DepthConvention convention = DepthConvention::BareDepth;

    double recoil_hz() const
    {
        switch (species) {
        case Species::Rb87: return kRecoilHzRb87;
        case Species::Na23: return kRecoilHzNa23;
        case Species::Custom: return custom_recoil_hz;
        }
        return custom_recoil_hz;
    }

    double a_x_nm() const { return wavelength_nm / 2.0; }
    double a_y_nm() const { return 2.0 * a_x_nm(); }

    double V_R_y() const { return m_ratio * V_R_x; }

    // Dimensionless depths V / E_R per axis, E_R_y = E_R_x / 4.
    double Vt_x() const { return V_L_x; }
    double Vt_y() const
    {
        return convention == DepthConvention::BareDepth ? 4.0 * l_ratio * V_L_x : l_ratio * V_L_x;
    }

    // V_L_y in units of E_R_x.
    double V_L_y() const { return Vt_y() / 4.0; }

    void validate() const
    {
        if (!(V_L_x > 0.0) || !(l_ratio > 0.0) || !std::isfinite(V_L_x) || !std::isfinite(l_ratio))
            throw DomainError("lattice depths must be positive");
        if (!(V_R_x >= 0.0) || !(m_ratio >= 0.0) || !std::isfinite(V_R_x) || !std::isfinite(m_ratio))
            throw DomainError("Raman strengths must be non-negative");
        if (!(recoil_hz() > 0.0)) throw DomainError("recoil energy must be positive");
        if (!(wavelength_nm > 0.0)) throw DomainError("wavelength must be positive");
    }

    // The harmonic-oscillator Wannier picture needs reasonably deep lattices.
    bool tight_binding_warning() const { return Vt_x() < 5.0 || Vt_y() < 5.0; }
};

struct Potentials {
    double V_L;                // in E_R_x
    std::complex<double> V_R;  // in E_R_x, purely imaginary
};

// Trapping and Raman potentials at (x, y), both in units of a_x.
inline Potentials potentials(const RamanConfig& cfg, double x, double y)
{
    const double ax = 1.0, ay = 2.0;
    const double cx = std::cos(M_PI * x / ax), cy = std::cos(M_PI * y / ay);
    const double vl = cfg.V_L_x * cx * cx + cfg.V_L_y() * cy * cy;
    const double vr = cfg.V_R_x * std::cos(M_PI * x / ax) + cfg.V_R_y() * (std::cos(2.0 * M_PI * y / ay) + 1.0);
    return {vl, std::complex<double>(0.0, vr)};
}

// Lattice sites sit at the minima of the trapping potential.
inline double site_x(int i) { return 0.5 + i; }
inline double site_y(int j) { return 2.0 * (0.5 + j); }

// Harmonic-approximation Wannier function, normalised on the real line.
// a is the lattice constant along that axis, vt the dimensionless depth.
inline double harmonic_wannier(double vt, double a, double dx)
{
    if (!(vt > 0.0)) throw DomainError("lattice depth must be positive");
    return std::pow(vt, 0.125) * std::pow(M_PI / (a * a), 0.25) *
           std::exp(-0.5 * M_PI * M_PI * std::sqrt(vt) * dx * dx / (a * a));
}

inline double wannier_x(const RamanConfig& cfg, double dx) { return harmonic_wannier(cfg.Vt_x(), 1.0, dx); }
inline double wannier_y(const RamanConfig& cfg, double dy) { return harmonic_wannier(cfg.Vt_y(), 2.0, dy); }

struct HoppingSet {
    double t_x = 0.0;
    double t_y = 0.0;
    double delta_t = 0.0;
    double tp_x = 0.0;
    double tp_y = 0.0;

    // delta_t / t_x must sit in [0, 1) for the lattice model to apply.
    bool model_regime() const { return t_x > 0.0 && delta_t >= 0.0 && delta_t < t_x; }
};

namespace detail {

inline double tx_factor(double vx) { return std::exp(-M_PI * M_PI * std::sqrt(vx) / 4.0) * std::exp(-1.0 / (4.0 * std::sqrt(vx))); }

inline double spin_conserving(double vt) { return 4.0 / std::sqrt(M_PI) * std::pow(vt, 0.75) * std::exp(-2.0 * std::sqrt(vt)); }

} // namespace detail

// Spin-flip and spin-conserving hopping amplitudes, in E_R_x.
inline HoppingSet hoppings(const RamanConfig& cfg)
{
    cfg.validate();
    const double vx = cfg.Vt_x(), vy = cfg.Vt_y();
    const double ex = std::exp(-M_PI * M_PI * std::sqrt(vx) / 4.0);
    const double ey = std::exp(-M_PI * M_PI * std::sqrt(vy) / 4.0);
    const double q = std::exp(-1.0 / std::sqrt(vy));
    HoppingSet h;
    h.t_x = cfg.V_R_x * detail::tx_factor(vx);
    h.delta_t = cfg.V_R_y() * ex * (1.0 - q);
    h.t_y = cfg.V_R_y() * ey * (1.0 + q);
    h.tp_x = detail::spin_conserving(vx);
    h.tp_y = 0.25 * detail::spin_conserving(vy); // E_R_y = E_R_x / 4
    return h;
}

// Same amplitudes converted to frequencies (energy / h) in Hz.
inline HoppingSet hoppings_hz(const RamanConfig& cfg)
{
    HoppingSet h = hoppings(cfg);
    const double f = cfg.recoil_hz();
    h.t_x *= f;
    h.t_y *= f;
    h.delta_t *= f;
    h.tp_x *= f;
    h.tp_y *= f;
    return h;
}

struct EqualHoppingSolution {
    double m_ratio;
    double l_ratio;
    double residual_equal;  // |t_y - t_x| / t_x
    double residual_target; // |delta_t / t_x - target|
};

namespace detail {

// m on the t_y = t_x curve for a given l (the curve is linear in m).
inline double equal_hopping_m(const RamanConfig& base, double l)
{
    RamanConfig c = base;
    c.l_ratio = l;
    c.m_ratio = 1.0;
    const HoppingSet h = hoppings(c);
    return h.t_x / h.t_y;
}

// delta_t / t_x along the equal-hopping curve; independent of V_R_x.
inline double equal_hopping_ratio(const RamanConfig& base, double l)
{
    RamanConfig c = base;
    c.l_ratio = l;
    c.m_ratio = equal_hopping_m(base, l);
    c.V_R_x = 1.0;
    const HoppingSet h = hoppings(c);
    return h.delta_t / h.t_x;
}

} // namespace detail

inline constexpr double kBoxMax = 10.0;

// Points of the (m, l) box where t_y = t_x and delta_t / t_x = target.
// The equal-hopping condition fixes m(l) in closed form, which leaves a
// single scalar equation in l. That is scanned on a fine grid and every
// sign change is bisected to machine precision.
inline std::vector<EqualHoppingSolution> solve_equal_hopping(const RamanConfig& cfg, double target, int scan = 4000)
{
    if (!(target > 0.0 && target < 1.0)) throw DomainError("target ratio must lie in (0, 1)");
    RamanConfig base = cfg;
    base.V_R_x = 1.0;
    base.validate();

    auto r = [&](double l) { return detail::equal_hopping_ratio(base, l) - target; };
    std::vector<EqualHoppingSolution> out;
    const double l_min = kBoxMax * 1e-6;
    double l_prev = l_min, r_prev = r(l_prev);
    for (int i = 1; i <= scan; ++i) {
        const double l = l_min + (kBoxMax - l_min) * i / scan;
        const double rl = r(l);
        if (rl == 0.0 || (r_prev < 0.0) != (rl < 0.0)) {
            double root = l;
            if (rl != 0.0) {
                boost::math::tools::eps_tolerance<double> tol(52);
                auto br = boost::math::tools::bisect(r, l_prev, l, tol);
                root = 0.5 * (br.first + br.second);
            }
            const double m = detail::equal_hopping_m(base, root);
            if (m > 0.0 && m <= kBoxMax) {
                RamanConfig c = base;
                c.l_ratio = root;
                c.m_ratio = m;
                const HoppingSet h = hoppings(c);
                out.push_back({m, root, std::abs(h.t_y - h.t_x) / h.t_x, std::abs(h.delta_t / h.t_x - target)});
            }
        }
        l_prev = l;
        r_prev = rl;
    }
    return out;
}

// Measurement time needed to see the largest centre-of-mass excursion,
// in units of T0 = hbar / t_x.
inline constexpr double kMeasurementTimeT0 = 10.0 * M_PI;
inline constexpr double kDefaultCoherenceTime = 0.1; // seconds

// Smallest t_x / h (Hz) for which kMeasurementTimeT0 * hbar / t_x <= tau_coh.
inline double feasibility_threshold_hz(double tau_coh = kDefaultCoherenceTime)
{
    if (!(tau_coh > 0.0)) throw DomainError("coherence time must be positive");
    return kMeasurementTimeT0 / (2.0 * M_PI * tau_coh);
}

struct FeasibilityMap {
    Species species;
    double tau_coh;
    double threshold_hz;
    std::vector<double> V_L_x; // rows
    std::vector<double> V_R_x; // columns
    std::vector<double> t_x_khz; // row-major, rows = V_L_x
    std::vector<char> feasible;

    double at(std::size_t i, std::size_t j) const { return t_x_khz[i * V_R_x.size() + j]; }
    bool ok(std::size_t i, std::size_t j) const { return feasible[i * V_R_x.size() + j] != 0; }
};

// t_x in kHz over a (V_L_x, V_R_x) grid together with the mask of points
// where the drift can be observed within tau_coh. Depths are in E_R_x, so
// V_R_x in energy units is V_R_x * E_R_x of the configured species.
inline FeasibilityMap feasibility_map(const RamanConfig& cfg, const std::vector<double>& vl, const std::vector<double>& vr,
                                      double tau_coh = kDefaultCoherenceTime)
{
    for (double v : vl)
        if (!(v >= 4.0 && v <= 10.0)) throw DomainError("V_L_x grid must lie in [4, 10]");
    for (double v : vr)
        if (!(v >= 0.0 && v <= 1.0)) throw DomainError("V_R_x grid must lie in [0, 1]");
    FeasibilityMap fm{cfg.species, tau_coh, feasibility_threshold_hz(tau_coh), vl, vr, {}, {}};
    fm.t_x_khz.reserve(vl.size() * vr.size());
    fm.feasible.reserve(vl.size() * vr.size());
    for (double l : vl) {
        for (double r : vr) {
            RamanConfig c = cfg;
            c.V_L_x = l;
            c.V_R_x = r;
            const double hz = hoppings_hz(c).t_x;
            fm.t_x_khz.push_back(hz / 1000.0);
            fm.feasible.push_back(hz > 0.0 && hz >= fm.threshold_hz ? 1 : 0);
        }
    }
    return fm;
}

inline std::vector<double> linspace(double a, double b, int n)
{
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) v[i] = n == 1 ? a : a + (b - a) * i / (n - 1);
    return v;
}

} // namespace anomalylab
