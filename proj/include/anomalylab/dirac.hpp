#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "model.hpp"

namespace anomalylab {

enum class DiracPhase { Gapped, TwoPairs, OnePairFamily1, OnePairFamily2 };

inline std::string to_string(DiracPhase ph)
{
    switch (ph) {
    case DiracPhase::Gapped: return "gapped";
    case DiracPhase::TwoPairs: return "two_pairs";
    case DiracPhase::OnePairFamily1: return "one_pair_family1";
    default: return "one_pair_family2";
    }
}

inline int pair_count(DiracPhase ph)
{
    switch (ph) {
    case DiracPhase::Gapped: return 0;
    case DiracPhase::TwoPairs: return 2;
    default: return 1;
    }
}

inline void check_delta(double delta)
{
    if (!std::isfinite(delta) || delta < 0.0 || delta >= 1.0)
        throw DomainError("hopping imbalance delta_t must lie in [0, 1)");
}

// Phase of the unperturbed model at spin-flip strength lambda. Boundaries
// are closed on the gapless side: |lambda| = 1 +- delta belongs to the
// one-pair phase of the matching family.
inline DiracPhase classify(double lambda, double delta)
{
    check_delta(delta);
    if (!std::isfinite(lambda)) throw DomainError("lambda must be finite");
    const double a = std::abs(lambda);
    if (a > 1.0 + delta) return DiracPhase::Gapped;
    if (a < 1.0 - delta) return DiracPhase::TwoPairs;
    return lambda > 0.0 ? DiracPhase::OnePairFamily1 : DiracPhase::OnePairFamily2;
}

struct DiracPoint {
    double kx = 0.0, ky = 0.0;
    int family = 1;        // 1: kx = 0 line, 2: kx = pi/a_x line
    int parity_sign = 0;   // +1 / -1 for the two members of a pair, 0 if merged
    double energy = 0.0;   // d0 at the node
};

struct DiracPair {
    int family = 1;
    bool merged = false;
    std::vector<DiracPoint> points;   // (plus, minus), or a single merged point
    double b_x = 0.0, b_y = 0.0;      // half separation (k_plus - k_minus)/2
    double b0 = 0.0;                  // half energy offset (f(k+) - f(k-))/2
};

struct DiracConfiguration {
    DiracPhase phase = DiracPhase::Gapped;
    std::vector<DiracPair> pairs;

    std::vector<DiracPoint> points() const
    {
        std::vector<DiracPoint> out;
        for (const auto& pr : pairs) out.insert(out.end(), pr.points.begin(), pr.points.end());
        return out;
    }
};

namespace detail {

inline DiracPair make_pair_of_nodes(const ModelParams& p, int family, double u, double kx, int ky_sign)
{
    DiracPair pr;
    pr.family = family;
    const double theta = std::acos(std::clamp(u, -1.0, 1.0));
    const double ky = theta / p.a_y;
    // arccos = 0 or pi: both nodes sit on the same time-reversal point.
    if (theta == 0.0 || theta == M_PI) {
        pr.merged = true;
        pr.points.push_back({kx, ky, family, 0, dispersion_f(p, kx, ky)});
        return pr;
    }
    const DiracPoint plus{kx, ky_sign * ky, family, +1, dispersion_f(p, kx, ky_sign * ky)};
    const DiracPoint minus{kx, -ky_sign * ky, family, -1, dispersion_f(p, kx, -ky_sign * ky)};
    pr.points = {plus, minus};
    pr.b_x = (plus.kx - minus.kx) / 2.0;
    pr.b_y = (plus.ky - minus.ky) / 2.0;
    pr.b0 = (plus.energy - minus.energy) / 2.0;
    return pr;
}

} // namespace detail

// Closed-form node positions of the unperturbed model (t = 1).
//   family 1: (0, +-arccos(lambda - delta)/a_y)        when |lambda - delta| <= 1
//   family 2: (pi/a_x, -+arccos(lambda + delta)/a_y)   when |lambda + delta| <= 1
inline DiracConfiguration locate(const ModelParams& p, double lambda)
{
    p.validate();
    DiracConfiguration c;
    c.phase = classify(lambda, p.delta_t);
    const double u1 = lambda - p.delta_t, u2 = lambda + p.delta_t;
    if (std::abs(u1) <= 1.0) c.pairs.push_back(detail::make_pair_of_nodes(p, 1, u1, 0.0, +1));
    if (std::abs(u2) <= 1.0) c.pairs.push_back(detail::make_pair_of_nodes(p, 2, u2, M_PI / p.a_x, -1));
    return c;
}

struct GapScanResult {
    std::vector<DiracPoint> nodes;   // refined gap minima below the threshold
    double min_gap = INFINITY;
    int grid_n = 0;
};

namespace detail {

inline double wrap_to(double k, double period)
{
    double r = std::fmod(k, period);
    if (r < -period / 2) r += period;
    if (r >= period / 2) r -= period;
    return r;
}

// Golden-section minimisation of g on [a, b].
template <class F>
double golden_min(F g, double a, double b, double tol)
{
    const double r = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - r * (b - a), d = a + r * (b - a);
    double fc = g(c), fd = g(d);
    for (int it = 0; it < 200 && std::abs(b - a) > tol; ++it) {
        if (fc <= fd) {
            b = d; d = c; fd = fc;
            c = b - r * (b - a); fc = g(c);
        } else {
            a = c; c = d; fc = fd;
            d = a + r * (b - a); fd = g(d);
        }
    }
    return (a + b) / 2.0;
}

} // namespace detail

// Brute-force search for band touchings: coarse grid of the gap, then
// alternating golden-section refinement from every local minimum. Nodes
// with refined gap below `threshold` are reported.
inline GapScanResult gap_scan(const ModelParams& p, double lambda, int grid_n = 256, double threshold = 1e-8)
{
    p.validate();
    if (grid_n < 64) throw DomainError("gap_scan needs grid_n >= 64");
    const int n = grid_n;
    const double Px = 2.0 * M_PI / p.a_x, Py = 2.0 * M_PI / p.a_y;
    const double hx = Px / n, hy = Py / n;
    std::vector<double> g(static_cast<size_t>(n) * n);
    auto at = [&](int i, int j) -> double& { return g[static_cast<size_t>((i + n) % n) * n + (j + n) % n]; };
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) at(i, j) = band_gap(p, i * hx, j * hy, lambda);

    GapScanResult res;
    res.grid_n = n;
    auto gap = [&](double kx, double ky) { return band_gap(p, kx, ky, lambda); };
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const double v = at(i, j);
            res.min_gap = std::min(res.min_gap, v);
            bool is_min = true;
            for (int di = -1; di <= 1 && is_min; ++di)
                for (int dj = -1; dj <= 1; ++dj)
                    if ((di || dj) && at(i + di, j + dj) < v) { is_min = false; break; }
            if (!is_min) continue;

            double kx = i * hx, ky = j * hy;
            double wx = 1.5 * hx, wy = 1.5 * hy;
            for (int sweep = 0; sweep < 200; ++sweep) {
                const double kx0 = kx, ky0 = ky;
                kx = detail::golden_min([&](double q) { return gap(q, ky); }, kx - wx, kx + wx, 1e-15);
                ky = detail::golden_min([&](double q) { return gap(kx, q); }, ky - wy, ky + wy, 1e-15);
                const double step = std::max(std::abs(kx - kx0), std::abs(ky - ky0));
                wx = std::max(4.0 * step, 1e-12);
                wy = std::max(4.0 * step, 1e-12);
                wx = std::min(wx, 1.5 * hx);
                wy = std::min(wy, 1.5 * hy);
                if (step < 1e-15) break;
            }
            const double gm = gap(kx, ky);
            res.min_gap = std::min(res.min_gap, gm);
            if (gm >= threshold) continue;
            kx = detail::wrap_to(kx, Px);
            ky = detail::wrap_to(ky, Py);
            bool dup = false;
            for (const auto& q : res.nodes)
                if (std::abs(detail::wrap_to(q.kx - kx, Px)) < 1e-6
                    && std::abs(detail::wrap_to(q.ky - ky, Py)) < 1e-6) dup = true;
            if (dup) continue;
            const int family = std::abs(kx) < Px / 4 ? 1 : 2;
            res.nodes.push_back({kx, ky, family, 0, dispersion_f(p, kx, ky)});
        }
    }
    std::sort(res.nodes.begin(), res.nodes.end(), [](const DiracPoint& a, const DiracPoint& b) {
        return a.kx != b.kx ? a.kx < b.kx : a.ky < b.ky;
    });
    return res;
}

} // namespace anomalylab
