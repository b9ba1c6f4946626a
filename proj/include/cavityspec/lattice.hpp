// lattice.hpp - brute-force discrete momentum sums, the oracle for spectral.hpp
//
// Works straight from the delta-sum form of the spectral densities: every
// lattice momentum p != 0 carries the weight gamma_x f_x(p) N(p) at the
// process frequency omega_p^{L/B}. The Bogoliubov angles are recomputed here
// from tanh(2 alpha) = nU / (omega' + nU) rather than shared with model.hpp.

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <vector>

#include "cavityspec/error.hpp"
#include "cavityspec/model.hpp"
#include "cavityspec/parallel.hpp"
#include "cavityspec/quadrature.hpp"
#include "cavityspec/spectral.hpp"

namespace cavityspec::lattice {

enum class Geometry { Disc, Square };

struct LatticeSpec {
    int scale{512};  // grid points per k along each axis
    Geometry geometry{Geometry::Disc};
};

struct DiscreteWeight {
    double omega;   // omega_p^{L/B}
    double weight;  // gamma_x f_x N_p, one mode
};

namespace detail {

inline void validate(const LatticeSpec& spec) {
    if (spec.scale < 8) throw ValidationError("lattice scale must be >= 8");
}

// Radial bound of row i in lattice units, inclusive. Rows are |i| <= imax.
inline std::int64_t row_extent(const LatticeSpec& s, std::int64_t i) {
    const std::int64_t n = s.scale;
    if (s.geometry == Geometry::Square) {
        // |p| < k/2  <=>  2|i| < n
        return (n - 1) / 2;
    }
    // i^2 + j^2 <= n^2 / 2
    const std::int64_t r2 = n * n;  // compare 2 (i^2 + j^2) <= r2
    std::int64_t j = static_cast<std::int64_t>(std::sqrt(std::max<double>(0.0, (r2 - 2 * i * i) / 2.0)));
    while (2 * (i * i + (j + 1) * (j + 1)) <= r2) ++j;
    while (j >= 0 && 2 * (i * i + j * j) > r2) --j;
    return j;
}

inline std::int64_t row_count_half(const LatticeSpec& s) {
    if (s.geometry == Geometry::Square) return (static_cast<std::int64_t>(s.scale) - 1) / 2;
    return row_extent(s, 0);
}

struct ModeData {
    double omega_L, omega_B;
    double f_L[4], f_B[4];
    double N_L, N_B;
};

inline double occupation(double omega, double beta) {
    if (std::isinf(beta)) return 0.0;
    return 1.0 / std::expm1(beta * omega);
}

inline ModeData mode(double W, const DerivedParams& d, double beta) {
    const double nU = d.nU();
    const double wp = d.omega_c0p;
    const double wb = std::sqrt(W * (W + 2.0 * nU));
    const double wc = std::sqrt((W + wp) * (W + wp + 2.0 * nU));
    const double ab = 0.5 * std::atanh(nU / (W + nU));
    const double ac = 0.5 * std::atanh(nU / (W + wp + nU));
    const double phi1 = std::cosh(ab) * std::cosh(ac);
    const double phi2 = std::sinh(ab) * std::sinh(ac);
    const double th1 = std::cosh(ab) * std::sinh(ac);
    const double th2 = std::sinh(ab) * std::cosh(ac);
    const double phi = phi1 + phi2, th = th1 + th2;

    ModeData m{};
    m.omega_L = wc - wb;
    m.omega_B = wc + wb;
    m.f_B[0] = 2.0 * th * th;
    m.f_B[1] = th * (2.0 * th - phi);
    m.f_B[2] = 5.0 * th * th - 4.0 * phi * th + 1.0;
    m.f_B[3] = (phi1 - phi2) * (phi1 - phi2);
    m.f_L[0] = m.f_B[0] + 2.0;
    m.f_L[1] = m.f_B[1] + 2.0;
    m.f_L[2] = m.f_B[2] + 3.0;
    m.f_L[3] = (th1 - th2) * (th1 - th2);
    const double nb = occupation(wb, beta), nc = occupation(wc, beta);
    m.N_L = nb - nc;
    m.N_B = 1.0 + nb + nc;
    return m;
}

// Visit every lattice point of row i (p_x = i / scale) except p = 0.
template <class Visit>
void visit_row(const LatticeSpec& s, std::int64_t i, Visit&& visit) {
    const std::int64_t jmax = row_extent(s, i);
    const double inv = 1.0 / s.scale;
    for (std::int64_t j = -jmax; j <= jmax; ++j) {
        if (i == 0 && j == 0) continue;
        const double W = static_cast<double>(i * i + j * j) * inv * inv;  // |p|^2/(2m), m = 1/2
        visit(W);
    }
}

}  // namespace detail

/// One weight per lattice point, rows p_x ascending then p_y ascending.
inline std::vector<DiscreteWeight> discrete_weights(Channel c, Branch br, const LatticeSpec& spec,
                                                    const DerivedParams& d, double beta) {
    detail::validate(spec);
    const double gamma = coupling(c, d);
    const int ci = index(c);
    const std::int64_t half = detail::row_count_half(spec);
    std::vector<DiscreteWeight> out;
    for (std::int64_t i = -half; i <= half; ++i) {
        detail::visit_row(spec, i, [&](double W) {
            const auto m = detail::mode(W, d, beta);
            if (br == Branch::Landau) out.push_back({m.omega_L, gamma * m.f_L[ci] * m.N_L});
            else out.push_back({m.omega_B, gamma * m.f_B[ci] * m.N_B});
        });
    }
    return out;
}

/// Spectral weight carried by one lattice mode once the sum is rescaled to the
/// physical area: V_2D dp^2 / (2 pi)^2.
inline double mass_per_mode(const LatticeSpec& spec, const DerivedParams& d) {
    const double dp = 1.0 / spec.scale;
    return d.area_k2 * dp * dp / (4.0 * std::numbers::pi * std::numbers::pi);
}

struct BinnedComparison {
    int scale{};
    std::vector<double> edges;            // bins + 1 frequencies
    std::vector<double> lattice_mass;     // sum of rescaled weights per bin
    std::vector<double> continuum_mass;   // integral of G over each bin
    double max_rel_dev{0.0};
    double mean_rel_dev{0.0};
    int compared_bins{0};
};

struct CompareOptions {
    unsigned jobs{1};
    double quad_tol{1e-10};
};

namespace detail {

// ∫ G dω over the frequency bin, as P0 γ ∫ f N dW with W = u^2.
inline double continuum_bin(Channel c, Branch br, double W_lo, double W_hi,
                            const DerivedParams& d, double beta, double tol) {
    if (!(W_hi > W_lo)) return 0.0;
    const auto panels = quad::geometric_panels(std::sqrt(W_lo), std::sqrt(W_hi));
    auto integrand = [&](double u) {
        const double W = u * u;
        const auto f = bogoliubov_factors(W, d);
        return 2.0 * u * channel_shape(c, br, f) * thermal_weight(br, f, beta);
    };
    return d.prefactor * coupling(c, d) * quad::integrate_doubling(integrand, panels, tol, 16, 4);
}

}  // namespace detail

inline BinnedComparison binned_at_scale(Channel c, Branch br, const LatticeSpec& spec, int bins,
                                        const DerivedParams& d, double beta,
                                        const CompareOptions& opt = {}) {
    detail::validate(spec);
    if (bins < 16) throw ValidationError("compare_binned: bins must be >= 16");
    BinnedComparison out;
    out.scale = spec.scale;
    const Interval sup = d.supports[br];
    out.edges.resize(bins + 1);
    for (int k = 0; k <= bins; ++k) out.edges[k] = sup.lo + sup.width() * k / bins;
    out.edges[bins] = sup.hi;
    out.lattice_mass.assign(bins, 0.0);
    out.continuum_mass.assign(bins, 0.0);
    if (!(sup.width() > 0.0)) return out;

    // lattice side: per-row partial bins merged in row order
    const double gamma = coupling(c, d);
    const int ci = index(c);
    const std::int64_t half = detail::row_count_half(spec);
    const std::size_t rows = static_cast<std::size_t>(2 * half + 1);
    std::vector<std::vector<double>> partial(rows);
    parallel_for(rows, opt.jobs, [&](std::size_t r) {
        auto& acc = partial[r];
        acc.assign(bins, 0.0);
        const std::int64_t i = static_cast<std::int64_t>(r) - half;
        detail::visit_row(spec, i, [&](double W) {
            const auto m = detail::mode(W, d, beta);
            const double omega = br == Branch::Landau ? m.omega_L : m.omega_B;
            const double w = br == Branch::Landau ? gamma * m.f_L[ci] * m.N_L
                                                  : gamma * m.f_B[ci] * m.N_B;
            int k = static_cast<int>(std::floor((omega - sup.lo) / sup.width() * bins));
            k = std::clamp(k, 0, bins - 1);
            acc[k] += w;
        });
    });
    const double per_mode = mass_per_mode(spec, d);
    for (const auto& acc : partial)
        for (int k = 0; k < bins; ++k) out.lattice_mass[k] += acc[k];
    for (auto& v : out.lattice_mass) v *= per_mode;

    // continuum side; at T > 0 the cusp bin needs the lattice's own p = 0 cell removed
    const double W_cut = std::isinf(beta) ? 0.0
                                          : 1.0 / (std::numbers::pi * spec.scale * spec.scale);
    for (int k = 0; k < bins; ++k) {
        double Wa = invert_branch(out.edges[k], br, d);
        double Wb = invert_branch(out.edges[k + 1], br, d);
        if (Wa > Wb) std::swap(Wa, Wb);
        out.continuum_mass[k] =
            detail::continuum_bin(c, br, std::max(Wa, W_cut), std::max(Wb, W_cut), d, beta, opt.quad_tol);
    }

    double total = 0.0;
    for (double v : out.continuum_mass) total += std::abs(v);
    double sum_dev = 0.0;
    for (int k = 0; k < bins; ++k) {
        const double cm = out.continuum_mass[k];
        if (!(std::abs(cm) > 1e-12 * total)) continue;
        const double dev = std::abs(out.lattice_mass[k] - cm) / std::abs(cm);
        out.max_rel_dev = std::max(out.max_rel_dev, dev);
        sum_dev += dev;
        ++out.compared_bins;
    }
    if (out.compared_bins > 0) out.mean_rel_dev = sum_dev / out.compared_bins;
    return out;
}

struct RefinedComparison {
    BinnedComparison base;
    BinnedComparison refined;  // at twice the scale
};

/// Binned lattice-vs-continuum comparison at `spec.scale` and at twice that
/// scale. Throws NumericalError if the bin-averaged deviation does not shrink
/// (both sides identically zero counts as converged).
inline RefinedComparison compare_binned(Channel c, Branch br, const LatticeSpec& spec, int bins,
                                        const DerivedParams& d, double beta,
                                        const CompareOptions& opt = {}) {
    RefinedComparison r;
    r.base = binned_at_scale(c, br, spec, bins, d, beta, opt);
    LatticeSpec fine = spec;
    fine.scale *= 2;
    r.refined = binned_at_scale(c, br, fine, bins, d, beta, opt);
    const bool trivial = r.base.compared_bins == 0 && r.refined.compared_bins == 0;
    if (!trivial && !(r.refined.mean_rel_dev < r.base.mean_rel_dev))
        throw NumericalError(std::string("lattice oracle not converging for channel ") +
                             to_string(c) + "/" + to_string(br));
    return r;
}

}  // namespace cavityspec::lattice
