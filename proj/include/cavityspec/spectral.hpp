// spectral.hpp - continuum Landau/Beliaev spectral densities and cusp expansions

#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <string_view>

#include "cavityspec/error.hpp"
#include "cavityspec/model.hpp"

namespace cavityspec {

enum class Channel { C = 0, AC = 1, A = 2, Adot = 3 };

inline constexpr std::array<Channel, 4> all_channels{Channel::C, Channel::AC, Channel::A,
                                                     Channel::Adot};
inline constexpr std::array<Branch, 2> all_branches{Branch::Landau, Branch::Beliaev};

inline constexpr int index(Channel c) { return static_cast<int>(c); }

inline const char* to_string(Channel c) {
    switch (c) {
        case Channel::C: return "C";
        case Channel::AC: return "AC";
        case Channel::A: return "A";
        case Channel::Adot: return "Adot";
    }
    return "?";
}

inline Channel parse_channel(std::string_view s) {
    for (auto c : all_channels)
        if (s == to_string(c)) return c;
    throw ValidationError("unknown channel '" + std::string(s) + "' (expected C, AC, A, Adot)");
}

inline Branch parse_branch(std::string_view s) {
    if (s == "L" || s == "landau" || s == "Landau") return Branch::Landau;
    if (s == "B" || s == "beliaev" || s == "Beliaev") return Branch::Beliaev;
    throw ValidationError("unknown branch '" + std::string(s) + "' (expected L or B)");
}

inline double coupling(Channel c, const DerivedParams& d) { return d.gamma[index(c)]; }

inline const Supports& supports(const DerivedParams& d) { return d.supports; }

// ---------------------------------------------------------------------------
// Shape functions and thermal weights

inline double channel_shape(Channel c, Branch br, const BogoliubovFactors& f) {
    const bool landau = br == Branch::Landau;
    switch (c) {
        case Channel::C: return 2.0 * f.theta * f.theta + (landau ? 2.0 : 0.0);
        case Channel::AC: return f.theta * (2.0 * f.theta - f.phi) + (landau ? 2.0 : 0.0);
        case Channel::A:
            return 5.0 * f.theta * f.theta - 4.0 * f.phi * f.theta + 1.0 + (landau ? 3.0 : 0.0);
        case Channel::Adot: {
            const double diff = landau ? f.theta1 - f.theta2 : f.phi1 - f.phi2;
            return diff * diff;
        }
    }
    return 0.0;
}

/// Bose-Einstein occupation; beta = +inf gives exactly 0.
inline double bose(double omega, double beta) {
    if (std::isinf(beta)) return 0.0;
    const double x = beta * omega;
    if (x > 700.0) return std::exp(-x);
    return 1.0 / std::expm1(x);
}

inline double thermal_weight(Branch br, const BogoliubovFactors& f, double beta) {
    if (!(beta > 0.0)) throw DomainError("thermal_weight: beta must be > 0");
    const double nb = bose(f.omega_b, beta);
    const double nc = bose(f.omega_c, beta);
    return br == Branch::Landau ? nb - nc : 1.0 + nb + nc;
}

/// |g'| = |dω^{L/B}/dy| at the factors' y.
inline double jacobian(Branch br, const BogoliubovFactors& f) {
    return br == Branch::Landau ? std::abs(f.d_omega_c - f.d_omega_b)
                                : f.d_omega_c + f.d_omega_b;
}

/// f_x / |g'| at radial energy W > 0, the temperature-independent part of G / (P0 γ).
inline double characteristic(Channel c, Branch br, double W, const DerivedParams& d) {
    const auto f = bogoliubov_factors(W, d);
    return channel_shape(c, br, f) / jacobian(br, f);
}

// ---------------------------------------------------------------------------
// Inversion of the dispersion

namespace detail {

// Root of omega = omega^{L/B}(W). Same closed form for both branches; the
// subtraction -(omega'+2nU)/2 + X is carried out analytically as
// (X^2 - A^2/4) / (X + A/2) = delta^2 / (4 D (X + A/2)).
inline double closed_form_root(double omega, const DerivedParams& d) {
    const double nU = d.nU();
    const double wp = d.omega_c0p;
    const double delta = (omega - d.omega_0) * (omega + d.omega_0);
    const double D = (omega - wp) * (omega + wp);
    const double A = wp + 2.0 * nU;
    const double X = 0.5 * omega * std::sqrt(1.0 + 4.0 * nU * nU / D);
    return delta * delta / (4.0 * D * (X + 0.5 * A));
}

inline double bisect_root(double omega, Branch br, const DerivedParams& d) {
    double lo = 0.0, hi = d.W_edge;
    const bool increasing = br == Branch::Beliaev;
    for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        const double v = mid > 0.0 ? dispersion(mid, br, d).omega : d.omega_0;
        if ((v < omega) == increasing) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

inline bool round_trip_ok(double W, double omega, Branch br, const DerivedParams& d) {
    if (W <= 0.0) return omega == d.omega_0;
    const double back = dispersion(W, br, d).omega;
    return std::abs(back - omega) <= 1e-10 * std::abs(omega);
}

}  // namespace detail

/// Radial kinetic energy W at which the branch reaches frequency omega.
/// Accepts the closed support including its ends (ω₀ -> 0, band edge -> W_edge).
inline double invert_branch(double omega, Branch br, const DerivedParams& d) {
    const Interval& s = d.supports[br];
    if (!(omega >= s.lo && omega <= s.hi) || !(s.width() > 0.0))
        throw DomainError(std::string("invert_branch: omega outside the ") +
                          (br == Branch::Landau ? "Landau" : "Beliaev") +
                          " support: " + std::to_string(omega));
    if (omega == d.omega_0) return 0.0;
    double W = std::min(detail::closed_form_root(omega, d), d.W_edge);
    if (!(W >= 0.0) || !detail::round_trip_ok(W, omega, br, d)) {
        W = detail::bisect_root(omega, br, d);
        if (!detail::round_trip_ok(W, omega, br, d))
            throw NumericalError("invert_branch: round trip failed at omega = " +
                                 std::to_string(omega));
    }
    return W;
}

// ---------------------------------------------------------------------------
// Cusp expansions at W -> 0 on the Beliaev side (T = 0)

struct CuspCoefficients {
    double a{}, b{}, C{};
    double sign_sqrt{-1.0};  // coefficient of 2a sqrt(W)
    double sign_linear{1.0}; // coefficient of b W
    // The closed forms for A and Adot describe f/(2|g'|); norm restores f/|g'|.
    double norm{1.0};

    double characteristic_at(double W) const {
        return norm * (sign_sqrt * 2.0 * a * std::sqrt(W) + sign_linear * b * W + C);
    }
};

inline CuspCoefficients cusp_coefficients(Channel c, const DerivedParams& d) {
    const double nU = d.nU();
    if (!(nU > 0.0)) throw DomainError("cusp_coefficients: requires nU > 0");
    const double wp = d.omega_c0p, w0 = d.omega_0;
    const double s = std::sqrt(2.0 * nU);
    const double X = (wp + nU) * (wp + 2.0 * nU) / (w0 * w0);
    CuspCoefficients k;
    switch (c) {
        case Channel::C:
            k.a = (1.0 + X) / s;
            k.b = (wp / nU + 1.0) / w0 - X / w0;
            k.C = (wp + 2.0 * nU) / w0;
            break;
        case Channel::AC:
            k.a = (1.0 + 0.5 * X) / s;
            k.b = wp / (2.0 * w0 * nU) - X / (2.0 * w0);
            k.C = (wp + 2.0 * nU) / (2.0 * w0);
            break;
        case Channel::A:
            k.a = (3.0 + X) / (4.0 * s);
            k.b = (wp / nU - 1.0) / (2.0 * w0) - X / (4.0 * w0);
            k.C = (wp + 2.0 * nU) / (4.0 * w0);
            k.sign_linear = -1.0;
            k.norm = 2.0;
            break;
        case Channel::Adot: {
            const double Y = wp * (wp + nU) / (w0 * w0);
            k.a = (1.0 - Y) / (4.0 * s);
            k.b = (wp / nU - 1.0) / (4.0 * w0) + Y / (4.0 * w0);
            k.C = wp / (4.0 * w0);
            k.sign_sqrt = 1.0;
            k.sign_linear = -1.0;
            k.norm = 2.0;
            break;
        }
    }
    return k;
}

/// lim_{W->0+} of the exact f_x^B/|g'|, extrapolated linearly in √W from
/// W = w and W = 4w so the leading √W term drops out.
inline double cusp_limit_extrapolated(Channel c, const DerivedParams& d, double w = 1e-12) {
    const double g1 = characteristic(c, Branch::Beliaev, w, d);
    const double g2 = characteristic(c, Branch::Beliaev, 4.0 * w, d);
    return 2.0 * g1 - g2;
}

inline double cusp_approximant_at(Channel c, double W, const DerivedParams& d) {
    return d.prefactor * coupling(c, d) * cusp_coefficients(c, d).characteristic_at(W);
}

/// T = 0 Beliaev-side approximant P0 γ (±2a√W ± bW + C) at frequency omega.
inline double cusp_approximant(Channel c, double omega, const DerivedParams& d) {
    return cusp_approximant_at(c, invert_branch(omega, Branch::Beliaev, d), d);
}

// ---------------------------------------------------------------------------
// Spectral densities

struct SpectralOptions {
    double w_switch{1e-10};  // below this W the cusp form replaces the closed form
};

struct SpectralPoint {
    double omega{};
    Branch branch{Branch::Beliaev};
    double W{};
    double f_value{};
    double N_value{};
    double G{};
    bool in_support{false};
};

inline SpectralPoint spectral_point(Channel c, double omega, const DerivedParams& d, double beta,
                                    const SpectralOptions& opt = {}) {
    if (!(omega > 0.0)) throw DomainError("spectral_density: omega must be > 0");
    SpectralPoint pt;
    pt.omega = omega;
    const auto& sup = d.supports;
    if (omega >= d.omega_0 && omega <= sup.beliaev.hi) pt.branch = Branch::Beliaev;
    else if (omega > sup.landau.lo && omega < d.omega_0) pt.branch = Branch::Landau;
    else return pt;
    pt.in_support = true;
    pt.W = invert_branch(omega, pt.branch, d);

    const double scale = d.prefactor * coupling(c, d);
    if (pt.W < opt.w_switch) {
        if (std::isinf(beta)) {
            pt.N_value = pt.branch == Branch::Beliaev ? 1.0 : 0.0;
            if (pt.branch == Branch::Beliaev && d.nU() > 0.0) {
                const auto k = cusp_coefficients(c, d);
                pt.G = scale * k.characteristic_at(pt.W);
            }
            return pt;
        }
        pt.W = opt.w_switch;  // T > 0: the pole at ω₀ is clipped for pointwise use
    }
    const auto f = bogoliubov_factors(pt.W, d);
    pt.f_value = channel_shape(c, pt.branch, f);
    pt.N_value = thermal_weight(pt.branch, f, beta);
    pt.G = scale * pt.f_value * pt.N_value / jacobian(pt.branch, f);
    return pt;
}

/// G_x(ω): zero outside both supports, the Beliaev limit at ω = ω₀.
inline double spectral_density(Channel c, double omega, const DerivedParams& d, double beta,
                               const SpectralOptions& opt = {}) {
    return spectral_point(c, omega, d, beta, opt).G;
}

}  // namespace cavityspec
