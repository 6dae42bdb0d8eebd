#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/tools/roots.hpp>

#include "dirac.hpp"
#include "drive.hpp"
#include "model.hpp"

namespace anomalylab {

enum class SampleStatus { Regular, Tangency, IntegrableSingularity };

inline std::string to_string(SampleStatus s)
{
    switch (s) {
    case SampleStatus::Regular: return "regular";
    case SampleStatus::Tangency: return "tangency";
    default: return "integrable_singularity";
    }
}

// Anomalous current along x, in units of t/a_y. J_minus comes from the
// kx = 0 family (u = lambda - delta), J_plus from the kx = pi family
// (u = lambda + delta).
struct CurrentSample {
    double tau = 0.0;
    double lambda = 0.0;
    double lambda_prime = 0.0;
    double J_minus = 0.0;
    double J_plus = 0.0;
    double J_total = 0.0;
    int n_pairs = 0;
    SampleStatus status = SampleStatus::Regular;
};

// Tolerance for "u sits on the band edge |u| = 1".
inline constexpr double kEdgeTolerance = 1e-12;

namespace detail {

struct FamilyCurrent {
    double j = 0.0;
    bool active = false;
    SampleStatus status = SampleStatus::Regular;
};

// Contribution sign * lambda' / (2 pi sqrt(1 - u^2)) of one family, with
// the u = +-1 edge resolved: an extremum touching the edge from inside
// gives the finite one-sided limit, a transversal crossing diverges.
inline FamilyCurrent family_current(double u, double lp, double lpp, double sign)
{
    FamilyCurrent f;
    const double edge = std::abs(1.0 - std::abs(u));
    if (edge > kEdgeTolerance) {
        if (std::abs(u) < 1.0) {
            f.active = true;
            f.j = sign * lp / (2.0 * M_PI * std::sqrt((1.0 - u) * (1.0 + u)));
        }
        return f;
    }
    const double side = u > 0 ? 1.0 : -1.0;   // which edge
    if (lp * lp <= 4.0 * std::abs(lpp) * kEdgeTolerance && lpp != 0.0) {
        f.status = SampleStatus::Tangency;
        const bool inward = side * lpp < 0.0;
        if (!inward) return f;
        f.active = true;
        // tau - tau0 has the sign of lambda'/lambda''; at the extremum itself
        // the right-hand limit is reported.
        const double s = lp == 0.0 ? 1.0 : (lp / lpp > 0 ? 1.0 : -1.0);
        f.j = sign * (lpp > 0 ? 1.0 : -1.0) * s * std::sqrt(std::abs(lpp)) / (2.0 * M_PI);
        return f;
    }
    if (lp == 0.0) {
        // Static drive parked on the edge: no flow.
        f.status = SampleStatus::Tangency;
        return f;
    }
    f.active = true;
    f.status = SampleStatus::IntegrableSingularity;
    f.j = (sign * lp > 0) ? INFINITY : -INFINITY;
    return f;
}

} // namespace detail

inline CurrentSample analytic_current(const ModelParams& p, const DriveProtocol& d, double tau)
{
    p.validate();
    d.validate();
    check_delta(p.delta_t);
    CurrentSample c;
    c.tau = tau;
    c.lambda = d.lambda(tau);
    c.lambda_prime = d.lambda_prime(tau);
    const double lpp = d.lambda_second(tau);
    const auto f1 = detail::family_current(c.lambda - p.delta_t, c.lambda_prime, lpp, +1.0);
    const auto f2 = detail::family_current(c.lambda + p.delta_t, c.lambda_prime, lpp, -1.0);
    c.J_minus = f1.j;
    c.J_plus = f2.j;
    c.J_total = c.J_plus + c.J_minus;
    c.n_pairs = pair_count(classify(c.lambda, p.delta_t));
    for (auto st : {f1.status, f2.status})
        if (st != SampleStatus::Regular && c.status != SampleStatus::IntegrableSingularity) c.status = st;
    return c;
}

// ---------------------------------------------------------------------------
// Lifshitz events: times at which lambda(tau) reaches one of +-(1 +- delta),
// i.e. a pair of nodes is born or annihilates at a time-reversal momentum.

enum class LifshitzKind { Crossing, Tangency };

struct LifshitzEvent {
    double tau = 0.0;
    double level = 0.0;     // the lambda value reached
    int family = 1;         // family whose u hits +-1
    LifshitzKind kind = LifshitzKind::Crossing;
};

inline std::vector<double> lifshitz_levels(double delta)
{
    return {-1.0 - delta, -1.0 + delta, 1.0 - delta, 1.0 + delta};
}

inline int lifshitz_family(double level, double delta)
{
    // family 1 edges: lambda - delta = +-1, family 2: lambda + delta = +-1
    const double e1 = std::min(std::abs(level - delta - 1.0), std::abs(level - delta + 1.0));
    const double e2 = std::min(std::abs(level + delta - 1.0), std::abs(level + delta + 1.0));
    return e1 <= e2 ? 1 : 2;
}

// Monotone segments between the extrema n*pi/omega are bracketed for every
// level and each sign change is bisected to `tol`. An extremum that lands on
// a level (within 1e-12) is reported once, as a tangency.
inline std::vector<LifshitzEvent> lifshitz_events(const ModelParams& p, const DriveProtocol& d,
                                                  double tau_begin, double tau_end, double tol = 1e-10)
{
    d.validate();
    check_delta(p.delta_t);
    if (!(tau_end >= tau_begin)) throw DomainError("lifshitz_events needs tau_end >= tau_begin");
    std::vector<LifshitzEvent> ev;
    if (!d.periodic_kind() || d.amp == 0.0) return ev;

    std::vector<double> cuts{tau_begin};
    const double half = M_PI / d.omega;
    for (double n = std::ceil(tau_begin / half); n * half < tau_end; n += 1.0)
        if (n * half > tau_begin) cuts.push_back(n * half);
    cuts.push_back(tau_end);

    const auto levels = lifshitz_levels(p.delta_t);
    for (double L : levels) {
        auto g = [&](double tau) { return d.lambda(tau) - L; };
        for (size_t s = 0; s + 1 < cuts.size(); ++s) {
            const double a = cuts[s], b = cuts[s + 1];
            const double ga = g(a), gb = g(b);
            const bool a_on = std::abs(ga) <= 1e-12, b_on = std::abs(gb) <= 1e-12;
            if (a_on || b_on || ga * gb > 0.0) continue;
            boost::uintmax_t iters = 200;
            auto stop = [tol](double x, double y) { return std::abs(y - x) <= tol; };
            const auto r = boost::math::tools::bisect(g, a, b, stop, iters);
            ev.push_back({(r.first + r.second) / 2.0, L, lifshitz_family(L, p.delta_t), LifshitzKind::Crossing});
        }
        // extrema strictly inside the range, or on its ends
        for (size_t s = 0; s < cuts.size(); ++s) {
            const double tc = cuts[s];
            const bool extremum = std::abs(std::remainder(tc, half)) < 1e-9 * std::max(1.0, half);
            if (!extremum || std::abs(g(tc)) > 1e-12) continue;
            ev.push_back({tc, L, lifshitz_family(L, p.delta_t), LifshitzKind::Tangency});
        }
    }
    // delta = 0 makes two levels coincide; keep one event per (tau, level).
    std::sort(ev.begin(), ev.end(), [](const LifshitzEvent& a, const LifshitzEvent& b) {
        return a.tau != b.tau ? a.tau < b.tau : a.level < b.level;
    });
    ev.erase(std::unique(ev.begin(), ev.end(), [](const LifshitzEvent& a, const LifshitzEvent& b) {
                 return std::abs(a.tau - b.tau) <= 1e-12 && a.level == b.level;
             }), ev.end());
    return ev;
}

// Critical hopping imbalances at fixed lambda where a family reaches the
// band edge: |lambda -+ delta| = 1, restricted to [0, 1).
inline std::vector<double> critical_deltas(double lambda)
{
    std::vector<double> out;
    for (double c : {lambda - 1.0, 1.0 - lambda, -1.0 - lambda, lambda + 1.0})
        if (c >= 0.0 && c < 1.0) out.push_back(c);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

// ---------------------------------------------------------------------------
// Cloud drift Delta x_c(tau) = (1/rho) * int_0^tau J_total, in units of a_x
// when J is in t/a_y and rho in 1/(a_x a_y).

struct DriftSample {
    double tau = 0.0;
    double x_c = 0.0;          // adaptive quadrature of the current
    double x_c_closed = 0.0;   // arcsine antiderivative
};

struct DriftTrace {
    double rho = 0.0;
    std::vector<DriftSample> samples;
    double max_disagreement = 0.0;
};

inline constexpr double kDriftAgreement = 1e-8;

namespace detail {

using ld = long double;
inline constexpr ld kPiL = 3.141592653589793238462643383279502884L;

inline ld clamp_unit(ld u) { return std::clamp(u, ld(-1), ld(1)); }

// Closed-form antiderivative of J_total (times 2 pi), in long double.
inline ld drift_phase(const ModelParams& p, const DriveProtocol& d, ld tau)
{
    const ld lam = d.lambda<ld>(tau), del = ld(p.delta_t);
    return std::asin(clamp_unit(lam - del)) - std::asin(clamp_unit(lam + del));
}

// Time points where the integrand is not smooth: every extremum of lambda
// and every touching of |u| = 1, from the exact inverse of the cosine. A
// touching remembers which family sits on which edge: the rounded level
// (1 - delta) + delta need not equal 1, and the square-root edge would then
// be clipped by a sliver worth ~1e-10 of the integral.
struct DriftCut {
    ld tau;
    int family = 0;   // 0: no band edge at this cut
    ld edge = 0;      // u_family(tau) = edge = +-1 exactly
};

inline std::vector<DriftCut> drift_breakpoints(const ModelParams& p, const DriveProtocol& d, ld a, ld b)
{
    std::vector<DriftCut> pts;
    if (!d.periodic_kind() || d.amp == 0.0) return pts;
    const ld w = ld(d.omega), A = ld(d.amp) / 2, C = ld(d.lambda0) / 2, del = ld(p.delta_t);
    auto add_family = [&](ld phase, int family, ld edge) {
        // all tau = (phase + 2 pi n)/w inside (a, b)
        for (ld n = std::floor((a * w - phase) / (2 * kPiL)); ; n += 1) {
            const ld t = (phase + 2 * kPiL * n) / w;
            if (t >= b) break;
            if (t > a) pts.push_back({t, family, edge});
        }
    };
    add_family(0, 0, 0);
    add_family(kPiL, 0, 0);
    for (int family = 1; family <= 2; ++family)
        for (ld edge : {ld(-1), ld(1)}) {
            const ld level = family == 1 ? edge + del : edge - del;
            const ld q = (level - C) / A;
            if (q < -1 || q > 1) continue;
            const ld ph = std::acos(q);
            add_family(ph, family, edge);
            add_family(-ph, family, edge);
        }
    std::sort(pts.begin(), pts.end(), [](const DriftCut& x, const DriftCut& y) { return x.tau < y.tau; });
    return pts;
}

// Integrand evaluated at tau = c.tau + s, with s small relative to c.tau
// handled exactly: 1 - u^2 is built from (1 -+ u) at the cut and the
// increment of lambda.
inline ld current_near(const ModelParams& p, const DriveProtocol& d, const DriftCut& c, ld s)
{
    const ld del = ld(p.delta_t), e = c.tau;
    ld lam_e = d.lambda<ld>(e);
    if (c.family == 1) lam_e = c.edge + del;
    if (c.family == 2) lam_e = c.edge - del;
    const ld dl = d.lambda_increment<ld>(e, s);
    const ld lp = d.lambda_prime<ld>(e + s);
    ld j = 0;
    for (int fam = 1; fam <= 2; ++fam) {
        const ld ue = fam == c.family ? c.edge : (fam == 1 ? lam_e - del : lam_e + del);
        const ld one_minus = (1 - ue) - dl, one_plus = (1 + ue) + dl;
        const ld w = one_minus * one_plus;
        if (!(one_minus > 0) || !(one_plus > 0) || !(w > 0)) continue;
        const ld c2 = lp / (2 * kPiL * std::sqrt(w));
        j += fam == 1 ? c2 : -c2;
    }
    return j;
}

// int_a^b J_total dtau for a piece with no interior breakpoint. Each half is
// integrated in the distance from its outer end so the endpoint
// singularities of tanh-sinh are resolved to long-double precision.
inline ld integrate_piece(const ModelParams& p, const DriveProtocol& d, const DriftCut& ca, const DriftCut& cb)
{
    const ld a = ca.tau, b = cb.tau;
    if (!(b > a)) return 0;
    thread_local boost::math::quadrature::tanh_sinh<ld> ts(15);
    const ld h = (b - a) / 2;
    const ld tol = 1e-17L;
    const ld left = ts.integrate([&](ld s) { return current_near(p, d, ca, s); }, ld(0), h, tol);
    const ld right = ts.integrate([&](ld s) { return current_near(p, d, cb, -s); }, ld(0), h, tol);
    return left + right;
}

} // namespace detail

// Drift of the cloud centre on the time grid `taus` (must start at the
// reference time and be non-decreasing). The quadrature and the closed form
// are compared sample by sample; a gap larger than kDriftAgreement raises
// ConsistencyError.
inline DriftTrace drift(const ModelParams& p, const DriveProtocol& d, double rho, const std::vector<double>& taus)
{
    using detail::ld;
    p.validate();
    d.validate();
    check_delta(p.delta_t);
    if (!(rho > 0.0) || !std::isfinite(rho)) throw DomainError("density rho must be positive");
    if (taus.empty()) throw DomainError("drift needs at least one time sample");
    for (size_t i = 1; i < taus.size(); ++i)
        if (!(taus[i] >= taus[i - 1])) throw DomainError("drift time samples must be non-decreasing");

    DriftTrace tr;
    tr.rho = rho;
    const ld norm = 2 * detail::kPiL * ld(rho);
    const ld phase0 = detail::drift_phase(p, d, ld(taus.front()));
    ld acc = 0;
    for (size_t i = 0; i < taus.size(); ++i) {
        if (i > 0) {
            const ld a = taus[i - 1], b = taus[i];
            auto cuts = detail::drift_breakpoints(p, d, a, b);
            detail::DriftCut prev{a};
            for (const auto& c : cuts) {
                acc += detail::integrate_piece(p, d, prev, c);
                prev = c;
            }
            acc += detail::integrate_piece(p, d, prev, detail::DriftCut{b});
        }
        DriftSample s;
        s.tau = taus[i];
        s.x_c = static_cast<double>(acc / ld(rho));
        s.x_c_closed = static_cast<double>((detail::drift_phase(p, d, ld(taus[i])) - phase0) / norm);
        tr.max_disagreement = std::max(tr.max_disagreement, std::abs(s.x_c - s.x_c_closed));
        tr.samples.push_back(s);
    }
    if (tr.max_disagreement > kDriftAgreement)
        throw ConsistencyError("drift quadrature and closed form disagree by "
                               + std::to_string(tr.max_disagreement));
    return tr;
}

inline std::vector<double> uniform_times(double tau_begin, double tau_end, int n)
{
    if (n < 2) throw DomainError("need at least two time samples");
    std::vector<double> t(n);
    for (int i = 0; i < n; ++i) t[i] = tau_begin + (tau_end - tau_begin) * i / (n - 1);
    return t;
}

// ---------------------------------------------------------------------------
// Dirac-point density rho_D = (curl b)/(2 pi) of a sampled b-field.

struct VectorField2D {
    int nx = 0, ny = 0;
    double hx = 1.0, hy = 1.0;     // grid spacings
    double x0 = 0.0, y0 = 0.0;     // coordinates of sample (0, 0)
    std::vector<double> bx, by;    // row-major, index i + nx*j

    double x(int i) const { return x0 + i * hx; }
    double y(int j) const { return y0 + j * hy; }
};

struct ScalarField2D {
    int nx = 0, ny = 0;
    double hx = 1.0, hy = 1.0, x0 = 0.0, y0 = 0.0;
    std::vector<double> v;

    double at(int i, int j) const { return v[static_cast<size_t>(i) + static_cast<size_t>(nx) * j]; }
};

template <class F>
VectorField2D sample_field(F b, int nx, int ny, double x0, double y0, double hx, double hy)
{
    VectorField2D f;
    f.nx = nx; f.ny = ny; f.hx = hx; f.hy = hy; f.x0 = x0; f.y0 = y0;
    f.bx.resize(static_cast<size_t>(nx) * ny);
    f.by.resize(f.bx.size());
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const auto v = b(f.x(i), f.y(j));
            f.bx[i + static_cast<size_t>(nx) * j] = v[0];
            f.by[i + static_cast<size_t>(nx) * j] = v[1];
        }
    return f;
}

// Central differences on the interior points; output grid is (nx-2)x(ny-2)
// starting at sample (1, 1).
inline ScalarField2D density_rho_D(const VectorField2D& f)
{
    if (f.nx < 3 || f.ny < 3) throw DomainError("density_rho_D needs at least a 3x3 grid");
    if (f.bx.size() != static_cast<size_t>(f.nx) * f.ny || f.by.size() != f.bx.size())
        throw DomainError("vector field storage does not match its grid");
    if (!(f.hx > 0.0) || !(f.hy > 0.0)) throw DomainError("grid spacings must be positive");
    ScalarField2D out;
    out.nx = f.nx - 2; out.ny = f.ny - 2;
    out.hx = f.hx; out.hy = f.hy;
    out.x0 = f.x(1); out.y0 = f.y(1);
    out.v.resize(static_cast<size_t>(out.nx) * out.ny);
    auto idx = [&](int i, int j) { return static_cast<size_t>(i) + static_cast<size_t>(f.nx) * j; };
    for (int j = 1; j + 1 < f.ny; ++j)
        for (int i = 1; i + 1 < f.nx; ++i) {
            const double dby_dx = (f.by[idx(i + 1, j)] - f.by[idx(i - 1, j)]) / (2.0 * f.hx);
            const double dbx_dy = (f.bx[idx(i, j + 1)] - f.bx[idx(i, j - 1)]) / (2.0 * f.hy);
            out.v[static_cast<size_t>(i - 1) + static_cast<size_t>(out.nx) * (j - 1)] = (dby_dx - dbx_dy) / (2.0 * M_PI);
        }
    return out;
}

} // namespace anomalylab
