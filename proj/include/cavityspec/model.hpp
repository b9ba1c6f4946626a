// model.hpp - physical parameters, derived constants and Bogoliubov factors
//
// Internal units: hbar = 1, omega_R = k^2/(2m) = 1, k = 1, hence m = 1/2.
// Every frequency and energy below is measured in omega_R, every momentum in k.

#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "cavityspec/error.hpp"

namespace cavityspec {

namespace constants {
inline constexpr double hbar = 1.054571817e-34;         // J s
inline constexpr double atomic_mass_unit = 1.66053906660e-27;  // kg
inline constexpr double mass_rb87 = 86.909180527 * atomic_mass_unit;
inline constexpr double mass = 0.5;    // atom mass in natural units
inline constexpr double w_edge = 0.5;  // rho_max = k/sqrt(2)  =>  rho^2/(2m) = 1/2
}  // namespace constants

enum class Branch { Landau, Beliaev };

inline const char* to_string(Branch b) { return b == Branch::Landau ? "L" : "B"; }

// How the p = 0 momentum cell is removed from continuum W-integrals.
struct IrCutoff {
    enum class Kind { Cell, None, Fixed };
    Kind kind{Kind::Cell};
    double value{0.0};  // only used for Kind::Fixed (omega_R)

    static IrCutoff cell() { return {}; }
    static IrCutoff none() { return {Kind::None, 0.0}; }
    static IrCutoff fixed(double w) { return {Kind::Fixed, w}; }
};

// Dial settings of the experiment. Defaults are the Fig. 1 caption values
// (omega_bar_P = 0.01, nU = 0.1, U0 = -1e-3, N_C = 5e4, 60 x 11 um, Rb87,
// omega_R = 2 pi x 3.56 kHz) at T = 0, with the Fig. 2 cavity settings.
struct PhysicalParams {
    double nU{0.1};
    double omega_bar_P{0.01};
    double U0_mag{1e-3};
    double N_C{5e4};
    double L_x{60.0};  // um
    double L_y{11.0};  // um
    double Delta_C{2.0};
    double kappa{1.25};
    double omega_D{1e9};
    double beta{std::numeric_limits<double>::infinity()};
    long n_max{10000};
    double omega_R_Hz{3560.0};  // omega_R / (2 pi)
    double atom_mass_kg{constants::mass_rb87};
    IrCutoff ir_cutoff{};
};

struct Interval {
    double lo{0.0};
    double hi{0.0};
    bool contains_open(double x) const { return x > lo && x < hi; }
    double width() const { return hi - lo; }
};

struct Supports {
    Interval landau;
    Interval beliaev;
    const Interval& operator[](Branch b) const { return b == Branch::Landau ? landau : beliaev; }
};

struct DerivedParams {
    PhysicalParams params;
    double omega_c0p{};   // 2 - omega_bar_P
    double omega_0{};     // checkerboard-mode frequency
    double alpha0{};      // zero-momentum rotation angle
    double phi_0{};       // cosh(alpha0) - sinh(alpha0)
    double lambda{};      // sqrt(U0_mag * omega_bar_P)
    double eta{};         // 2 nU / sqrt(N_C)
    double lambda_0{};    // sqrt(N_C) phi_0 lambda
    double gamma[4]{};    // (C, AC, A, Adot)
    double k_phys{};      // m^-1 (SI), converts momenta to k units
    double area_k2{};     // V_2D k^2
    double prefactor{};   // P0 = V_2D m / (2 pi)
    double W_edge{constants::w_edge};
    double W_ir{};        // lower limit of continuum W-integrals
    Supports supports;

    double nU() const { return params.nU; }
};

// ---------------------------------------------------------------------------

namespace detail {

struct Mode {
    double omega;  // sqrt((y+s)(y+s+2nU))
    double d_omega;
    double ch;     // cosh(alpha)
    double sh;     // sinh(alpha)
};

// Rotation of one band at radial kinetic energy y with band offset `shift`.
// tanh(2 alpha) = nU / (y + shift + nU), written without the artanh so the
// y -> 0 limit of the b band stays finite in floating point.
inline Mode rotate(double y, double shift, double nU) {
    const double e = y + shift;
    const double omega = std::sqrt(e * (e + 2.0 * nU));
    const double big = e + nU;
    Mode m{};
    m.omega = omega;
    m.d_omega = big / omega;
    m.ch = std::sqrt((big + omega) / (2.0 * omega));
    m.sh = nU / std::sqrt(2.0 * omega * (big + omega));
    return m;
}

// alpha = artanh(nU / (e + nU)) / 2 with e = y + shift, as a log of the exact ratio
// (1 + x) / (1 - x) = (e + 2 nU) / e
inline double rotation_angle(double y, double shift, double nU) {
    const double e = y + shift;
    return 0.25 * std::log1p(2.0 * nU / e);
}

inline double edge_frequency(double y, double shift, double nU) {
    return std::sqrt((y + shift) * (y + shift + 2.0 * nU));
}

}  // namespace detail

/// Check the invariants of `p` and compute every quantity that follows from it.
/// Throws ValidationError naming the first violated invariant.
inline DerivedParams validate_and_derive(const PhysicalParams& p) {
    auto require = [](bool ok, const char* what) {
        if (!ok) throw ValidationError(std::string("invalid parameters: ") + what);
    };
    require(std::isfinite(p.nU) && p.nU >= 0.0, "nU >= 0");
    require(std::isfinite(p.N_C) && p.N_C > 0.0, "N_C > 0");
    require(std::isfinite(p.U0_mag) && p.U0_mag >= 0.0, "U0_mag >= 0");
    require(std::isfinite(p.omega_bar_P) && p.omega_bar_P >= 0.0, "omega_bar_P >= 0");
    require(p.omega_bar_P < 2.0, "omega_bar_P < 2 omega_R (omega'_c0 = 2 - omega_bar_P must be positive)");
    require(std::isfinite(p.Delta_C) && p.Delta_C > 0.0, "Delta_C > 0");
    require(std::isfinite(p.kappa) && p.kappa >= 0.0, "kappa >= 0");
    require(p.omega_D > 0.0, "omega_D > 0");
    require(p.beta > 0.0, "beta > 0");
    require(p.n_max >= 1, "n_max >= 1");
    require(std::isfinite(p.L_x) && p.L_x > 0.0 && std::isfinite(p.L_y) && p.L_y > 0.0,
            "L_x, L_y > 0");
    require(std::isfinite(p.omega_R_Hz) && p.omega_R_Hz > 0.0, "omega_R_Hz > 0");
    require(std::isfinite(p.atom_mass_kg) && p.atom_mass_kg > 0.0, "atom_mass_kg > 0");
    if (p.ir_cutoff.kind == IrCutoff::Kind::Fixed)
        require(p.ir_cutoff.value >= 0.0 && p.ir_cutoff.value < constants::w_edge,
                "0 <= ir_cutoff < W_edge");

    DerivedParams d;
    d.params = p;
    const double nU = p.nU;
    d.omega_c0p = 2.0 - p.omega_bar_P;
    d.omega_0 = std::sqrt(d.omega_c0p * (d.omega_c0p + 2.0 * nU));
    d.alpha0 = detail::rotation_angle(0.0, d.omega_c0p, nU);
    d.phi_0 = std::sqrt(d.omega_c0p / d.omega_0);  // = exp(-alpha0)
    d.lambda = std::sqrt(p.U0_mag * p.omega_bar_P);
    d.eta = 2.0 * nU / std::sqrt(p.N_C);
    d.lambda_0 = std::sqrt(p.N_C) * d.phi_0 * d.lambda;
    d.gamma[0] = d.lambda * d.lambda;
    d.gamma[1] = d.lambda * d.eta * d.phi_0;
    d.gamma[2] = d.eta * d.eta * d.phi_0 * d.phi_0 / 2.0;
    d.gamma[3] = d.eta * d.eta / (2.0 * d.phi_0 * d.phi_0);

    const double omega_R = 2.0 * std::numbers::pi * p.omega_R_Hz;
    d.k_phys = std::sqrt(2.0 * p.atom_mass_kg * omega_R / constants::hbar);
    d.area_k2 = (p.L_x * 1e-6 * d.k_phys) * (p.L_y * 1e-6 * d.k_phys);
    d.prefactor = d.area_k2 * constants::mass / (2.0 * std::numbers::pi);

    switch (p.ir_cutoff.kind) {
        case IrCutoff::Kind::Cell:
            // disc of area (2 pi)^2 / V around p = 0: rho^2 = 4 pi / V, W = rho^2 / (2m)
            d.W_ir = 4.0 * std::numbers::pi / d.area_k2 / (2.0 * constants::mass);
            break;
        case IrCutoff::Kind::None: d.W_ir = 0.0; break;
        case IrCutoff::Kind::Fixed: d.W_ir = p.ir_cutoff.value; break;
    }

    const double wb = detail::edge_frequency(d.W_edge, 0.0, nU);
    const double wc = detail::edge_frequency(d.W_edge, d.omega_c0p, nU);
    d.supports.landau = {wc - wb, d.omega_0};
    d.supports.beliaev = {d.omega_0, wc + wb};
    // The Landau band collapses onto omega'_c0 when nU = 0.
    require(d.supports.beliaev.width() > 0.0 && (nU == 0.0 || d.supports.landau.width() > 0.0),
            "non-empty Landau and Beliaev supports");
    return d;
}

struct BogoliubovFactors {
    double y{};
    double alpha_b{}, alpha_c{};
    double phi1{}, phi2{}, theta1{}, theta2{};
    double phi{}, theta{};
    double omega_b{}, omega_c{};
    double d_omega_b{}, d_omega_c{};

    // Coefficients for given rotation angles only (frequencies left at zero).
    static BogoliubovFactors from_angles(double alpha_b, double alpha_c) {
        BogoliubovFactors f;
        f.alpha_b = alpha_b;
        f.alpha_c = alpha_c;
        const double cb = std::cosh(alpha_b), sb = std::sinh(alpha_b);
        const double cc = std::cosh(alpha_c), sc = std::sinh(alpha_c);
        f.phi1 = cb * cc;
        f.phi2 = sb * sc;
        f.theta1 = cb * sc;
        f.theta2 = sb * cc;
        f.phi = f.phi1 + f.phi2;
        f.theta = f.theta1 + f.theta2;
        return f;
    }
};

/// Quasiparticle frequency of `branch` at radial kinetic energy y, and dω/dy.
/// y = 0 is accepted for the Beliaev branch, where the derivative is +inf.
struct DispersionValue {
    double omega;
    double d_omega_dy;
};

inline DispersionValue dispersion(double y, Branch branch, const DerivedParams& d) {
    if (!(y >= 0.0) || y > d.W_edge)
        throw DomainError("dispersion: y outside [0, W_edge]: " + std::to_string(y));
    if (y == 0.0) {
        if (branch == Branch::Landau)
            throw DomainError("dispersion: Landau branch undefined at y = 0");
        return {d.omega_0, std::numeric_limits<double>::infinity()};
    }
    const auto b = detail::rotate(y, 0.0, d.nU());
    const auto c = detail::rotate(y, d.omega_c0p, d.nU());
    if (branch == Branch::Landau) return {c.omega - b.omega, c.d_omega - b.d_omega};
    return {c.omega + b.omega, c.d_omega + b.d_omega};
}

inline BogoliubovFactors bogoliubov_factors(double y, const DerivedParams& d) {
    if (!(y > 0.0) || !std::isfinite(y))
        throw DomainError("bogoliubov_factors: requires y > 0 (alpha_b diverges at y = 0)");
    const double nU = d.nU();
    const auto b = detail::rotate(y, 0.0, nU);
    const auto c = detail::rotate(y, d.omega_c0p, nU);
    BogoliubovFactors f;
    f.y = y;
    f.alpha_b = detail::rotation_angle(y, 0.0, nU);
    f.alpha_c = detail::rotation_angle(y, d.omega_c0p, nU);
    f.phi1 = b.ch * c.ch;
    f.phi2 = b.sh * c.sh;
    f.theta1 = b.ch * c.sh;
    f.theta2 = b.sh * c.ch;
    f.phi = f.phi1 + f.phi2;
    f.theta = f.theta1 + f.theta2;
    f.omega_b = b.omega;
    f.omega_c = c.omega;
    f.d_omega_b = b.d_omega;
    f.d_omega_c = c.d_omega;
    return f;
}

}  // namespace cavityspec
