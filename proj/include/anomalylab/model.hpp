#pragma once

#include <cmath>
#include <complex>
#include <string>

#include <Eigen/Dense>

#include "drive.hpp"
#include "errors.hpp"

namespace anomalylab {

using cplx = std::complex<double>;

enum class PauliChannel { Sigma1, Sigma2, Sigma3 };

inline std::string to_string(PauliChannel c)
{
    switch (c) {
    case PauliChannel::Sigma1: return "sigma1";
    case PauliChannel::Sigma2: return "sigma2";
    default: return "sigma3";
    }
}

inline PauliChannel pauli_channel_from_string(const std::string& s)
{
    if (s == "sigma1" || s == "x") return PauliChannel::Sigma1;
    if (s == "sigma2" || s == "y") return PauliChannel::Sigma2;
    if (s == "sigma3" || s == "sigmaz" || s == "z") return PauliChannel::Sigma3;
    throw ConfigError("unknown Pauli channel '" + s + "'");
}

// Static parameters of the two-band lattice model. Energies are in units of
// the spin-flip hopping; t itself defaults to one and only multiplies the
// spin-flip hopping terms (sin kx, cos ky, delta_t cos kx).
struct ModelParams {
    double t = 1.0;
    double a_x = 1.0;
    double a_y = 2.0;
    double delta_t = 0.32;      // hopping imbalance, in units of t
    double tp_x = 0.0;          // spin-conserving hoppings
    double tp_y = 0.0;
    double pert_eps1 = 0.0;     // eps1*sin(ky a_y) on pert_channel
    double pert_epsz = 0.0;     // eps_z*sigma_z, breaks PT
    PauliChannel pert_channel = PauliChannel::Sigma1;

    void validate() const
    {
        for (double v : {t, a_x, a_y, delta_t, tp_x, tp_y, pert_eps1, pert_epsz})
            if (!std::isfinite(v)) throw DomainError("model parameters must be finite");
        if (!(a_x > 0.0) || !(a_y > 0.0)) throw DomainError("lattice constants must be positive");
    }
};

// H = d0*1 + d1*sigma1 + d2*sigma2 + d3*sigma3 with real coefficients.
struct PauliVector {
    double d0 = 0.0, d1 = 0.0, d2 = 0.0, d3 = 0.0;

    double norm() const { return std::sqrt(d1 * d1 + d2 * d2 + d3 * d3); }

    Eigen::Matrix2cd matrix() const
    {
        Eigen::Matrix2cd h;
        h << cplx(d0 + d3, 0.0), cplx(d1, -d2),
             cplx(d1, d2), cplx(d0 - d3, 0.0);
        return h;
    }
};

inline void add_channel(PauliVector& v, PauliChannel c, double x)
{
    switch (c) {
    case PauliChannel::Sigma1: v.d1 += x; break;
    case PauliChannel::Sigma2: v.d2 += x; break;
    case PauliChannel::Sigma3: v.d3 += x; break;
    }
}

inline double dispersion_f(const ModelParams& p, double kx, double ky)
{
    return 2.0 * p.tp_x * std::cos(kx * p.a_x) + 2.0 * p.tp_y * std::cos(ky * p.a_y);
}

// Pauli decomposition of the Bloch Hamiltonian at a given lambda.
inline PauliVector pauli_vector(const ModelParams& p, double kx, double ky, double lambda)
{
    const double cx = std::cos(kx * p.a_x), sx = std::sin(kx * p.a_x);
    const double cy = std::cos(ky * p.a_y), sy = std::sin(ky * p.a_y);
    PauliVector v;
    v.d0 = 2.0 * p.tp_x * cx + 2.0 * p.tp_y * cy;
    v.d1 = p.t * sx;
    v.d2 = lambda - p.t * (p.delta_t * cx + cy);
    v.d3 = p.pert_epsz;
    if (p.pert_eps1 != 0.0) add_channel(v, p.pert_channel, p.pert_eps1 * sy);
    return v;
}

// d H / d kx and d H / d ky as Pauli vectors.
inline PauliVector velocity_x(const ModelParams& p, double kx, double /*ky*/)
{
    const double cx = std::cos(kx * p.a_x), sx = std::sin(kx * p.a_x);
    PauliVector v;
    v.d0 = -2.0 * p.tp_x * p.a_x * sx;
    v.d1 = p.t * p.a_x * cx;
    v.d2 = p.t * p.delta_t * p.a_x * sx;
    return v;
}

inline PauliVector velocity_y(const ModelParams& p, double /*kx*/, double ky)
{
    const double cy = std::cos(ky * p.a_y), sy = std::sin(ky * p.a_y);
    PauliVector v;
    v.d0 = -2.0 * p.tp_y * p.a_y * sy;
    v.d2 = p.t * p.a_y * sy;
    if (p.pert_eps1 != 0.0) add_channel(v, p.pert_channel, p.pert_eps1 * p.a_y * cy);
    return v;
}

struct BlochMatrix {
    Eigen::Matrix2cd h;
    double kx = 0.0, ky = 0.0, tau = 0.0;
};

inline BlochMatrix bloch_hamiltonian(const ModelParams& p, const DriveProtocol& d, double kx,
                                     double ky, double tau)
{
    return {pauli_vector(p, kx, ky, d.lambda(tau)).matrix(), kx, ky, tau};
}

struct BandPair {
    double e_minus = 0.0, e_plus = 0.0;
    Eigen::Vector2cd u_minus, u_plus;
    bool gauge_ambiguous = false;   // bands touch, eigenvectors are arbitrary
};

// Fix the phase so the first component with modulus above 1e-14 is real and
// positive; this is the documented gauge of every spinor we hand out.
inline void fix_gauge(Eigen::Vector2cd& u)
{
    const int i = std::abs(u(0)) > 1e-14 ? 0 : 1;
    const double a = std::abs(u(i));
    if (a > 0.0) u *= std::conj(u(i)) / a;
}

// Closed-form eigen-decomposition of d0 + d.sigma.
inline BandPair band_from_pauli(const PauliVector& v)
{
    BandPair b;
    const double D = v.norm();
    b.e_minus = v.d0 - D;
    b.e_plus = v.d0 + D;
    if (D < 1e-14) {
        b.gauge_ambiguous = true;
        b.u_minus << 1.0, 0.0;
        b.u_plus << 0.0, 1.0;
        return b;
    }
    // Two algebraically equivalent forms; pick the better conditioned one.
    const cplx dm(v.d1, -v.d2), dp(v.d1, v.d2);
    Eigen::Vector2cd lo1(dm, -(v.d3 + D)), lo2(D - v.d3, -dp);
    Eigen::Vector2cd lo = lo1.squaredNorm() >= lo2.squaredNorm() ? lo1 : lo2;
    Eigen::Vector2cd hi1(dm, D - v.d3), hi2(D + v.d3, dp);
    Eigen::Vector2cd hi = hi1.squaredNorm() >= hi2.squaredNorm() ? hi1 : hi2;
    b.u_minus = lo.normalized();
    b.u_plus = hi.normalized();
    fix_gauge(b.u_minus);
    fix_gauge(b.u_plus);
    return b;
}

inline BandPair band(const ModelParams& p, const DriveProtocol& d, double kx, double ky, double tau)
{
    return band_from_pauli(pauli_vector(p, kx, ky, d.lambda(tau)));
}

inline double band_gap(const ModelParams& p, double kx, double ky, double lambda)
{
    return 2.0 * pauli_vector(p, kx, ky, lambda).norm();
}

// Frobenius norm of sigma1 H^* sigma1 - H; zero exactly when H is symmetric
// under the antiunitary PT = sigma1 K.
inline double pt_defect(const Eigen::Matrix2cd& h)
{
    Eigen::Matrix2cd s1;
    s1 << 0.0, 1.0, 1.0, 0.0;
    return (s1 * h.conjugate() * s1 - h).norm();
}

inline double pt_defect(const ModelParams& p, const DriveProtocol& d, double kx, double ky, double tau)
{
    return pt_defect(bloch_hamiltonian(p, d, kx, ky, tau).h);
}

} // namespace anomalylab
