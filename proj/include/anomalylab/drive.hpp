#pragma once

#include <cmath>
#include <string>

#include "errors.hpp"

namespace anomalylab {

enum class DriveKind { Constant, PeriodicCosine };

// Time dependence of the on-site spin-flip strength lambda(tau), in units of
// the spin-flip hopping t and with tau measured in T0 = hbar/t.
//
//   PeriodicCosine: lambda(tau) = amp*cos(omega*tau)/2 + lambda0/2
//   Constant:       lambda(tau) = lambda0/2
//
// Both kinds share the lambda0/2 offset so that a constant drive is the
// omega -> 0 limit of a periodic one; use DriveProtocol::constant(lambda)
// to ask for a fixed value directly.
struct DriveProtocol {
    DriveKind kind = DriveKind::PeriodicCosine;
    double lambda0 = 2.44;
    double amp = 0.2;
    double omega = 0.1;

    static DriveProtocol constant(double lambda)
    {
        DriveProtocol d;
        d.kind = DriveKind::Constant;
        d.lambda0 = 2.0 * lambda;
        d.amp = 0.0;
        d.omega = 0.0;
        return d;
    }

    static DriveProtocol periodic(double lambda0, double amp, double omega)
    {
        DriveProtocol d;
        d.kind = DriveKind::PeriodicCosine;
        d.lambda0 = lambda0;
        d.amp = amp;
        d.omega = omega;
        d.validate();
        return d;
    }

    void validate() const
    {
        if (!std::isfinite(lambda0) || !std::isfinite(amp) || !std::isfinite(omega))
            throw DomainError("drive parameters must be finite");
        if (kind == DriveKind::PeriodicCosine && !(omega > 0.0))
            throw DomainError("periodic drive needs omega > 0");
    }

    bool periodic_kind() const { return kind == DriveKind::PeriodicCosine; }

    double period() const { return periodic_kind() ? 2.0 * M_PI / omega : INFINITY; }

    template <class T = double>
    T lambda(T tau) const
    {
        using std::cos;
        if (!periodic_kind()) return T(lambda0) / 2;
        return T(amp) * cos(T(omega) * tau) / 2 + T(lambda0) / 2;
    }

    template <class T = double>
    T lambda_prime(T tau) const
    {
        using std::sin;
        if (!periodic_kind()) return T(0);
        return -T(amp) * T(omega) * sin(T(omega) * tau) / 2;
    }

    template <class T = double>
    T lambda_second(T tau) const
    {
        using std::cos;
        if (!periodic_kind()) return T(0);
        return -T(amp) * T(omega) * T(omega) * cos(T(omega) * tau) / 2;
    }

    // lambda(tau + s) - lambda(tau) without the cancellation of a plain
    // difference; exact to rounding even for s far below ulp(tau).
    template <class T = double>
    T lambda_increment(T tau, T s) const
    {
        using std::sin;
        if (!periodic_kind()) return T(0);
        const T w = T(omega);
        return -T(amp) * sin(w * (2 * tau + s) / 2) * sin(w * s / 2);
    }

    // Upper bound of |d lambda/d tau| over the protocol. The adiabatic
    // formulas assume this is well below one.
    double slowness_bound() const { return periodic_kind() ? std::abs(amp * omega) / 2 : 0.0; }

    bool adiabaticity_warning(double threshold = 0.01) const { return slowness_bound() > threshold; }
};

inline std::string to_string(DriveKind k)
{
    return k == DriveKind::Constant ? "constant" : "periodic";
}

inline DriveKind drive_kind_from_string(const std::string& s)
{
    if (s == "constant") return DriveKind::Constant;
    if (s == "periodic" || s == "periodic_cosine") return DriveKind::PeriodicCosine;
    throw ConfigError("unknown drive kind '" + s + "'");
}

} // namespace anomalylab
