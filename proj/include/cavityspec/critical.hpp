// critical.hpp - Dicke critical pump with and without the quasiparticle baths

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/tools/roots.hpp>

#include "cavityspec/error.hpp"
#include "cavityspec/matsubara.hpp"
#include "cavityspec/model.hpp"
#include "cavityspec/parallel.hpp"

namespace cavityspec {

struct CriticalOptions {
    double pump_tol{1e-12};
    BathOptions bath{1e-11, 32, 3};
    double scan_start{1e-4};
    double scan_factor{1.25};
    int dense_points{2000};
};

inline PhysicalParams at_pump(PhysicalParams p, double pump) {
    p.omega_bar_P = pump;
    return p;
}

/// det M(0) at pump strength `pump`, with every pump-dependent quantity re-derived.
inline double det_zero(double pump, const PhysicalParams& params, const BathToggles& t,
                       const BathOptions& bath = {}) {
    if (!(pump > 0.0 && pump < 2.0)) throw DomainError("det_zero: pump must lie in (0, 2)");
    const auto d = validate_and_derive(at_pump(params, pump));
    if (!t.quasiparticle_channels) return build_matrix(0.0, d, t).det();
    const BathTable table(d, d.params.beta, bath);
    return build_matrix(0.0, d, t, &table).det();
}

/// Natural scale of det M(0): its value with every coupling switched off.
inline double det_scale(double pump, const PhysicalParams& params) {
    const auto d = validate_and_derive(at_pump(params, pump));
    const double k = params.kappa;
    return (params.Delta_C * params.Delta_C + k * k) * d.omega_0 * d.omega_0;
}

struct PumpRoot {
    double pump{};
    double residual{};   // det M(0) / det_scale at the root
    int iterations{};
    bool monotone{true}; // det strictly decreasing over the scanned bracket
};

namespace detail {

template <class F>
std::pair<double, double> bracket_root(F&& f, const CriticalOptions& opt, bool& monotone,
                                       std::string& trace) {
    const double top = 2.0 - 1e-9;
    std::vector<std::pair<double, double>> scan;
    for (double p = opt.scan_start;; p = std::min({p * opt.scan_factor, 0.5 * (p + 2.0), top})) {
        const double v = f(p);
        scan.emplace_back(p, v);
        if (!(v > 0.0) || p >= top) break;
    }
    for (std::size_t i = 1; i < scan.size(); ++i)
        if (!(scan[i].second < scan[i - 1].second)) monotone = false;
    trace.clear();
    for (const auto& [p, v] : scan) trace += std::to_string(p) + ":" + std::to_string(v) + " ";
    if (monotone && scan.size() >= 2 && !(scan.back().second > 0.0))
        return {scan[scan.size() - 2].first, scan.back().first};
    if (scan.size() == 1 && !(scan[0].second > 0.0))
        throw NumericalError("critical_pump: det M(0) <= 0 already at the first scan point");

    // dense fallback: first sign change on a uniform grid
    const double hi = scan.back().first;
    double prev_p = 0.0;
    for (int i = 1; i <= opt.dense_points; ++i) {
        const double p = hi * i / opt.dense_points;
        const double v = f(p);
        if (!(v > 0.0)) {
            if (prev_p == 0.0) throw NumericalError("critical_pump: no positive det M(0) near pump 0");
            return {prev_p, p};
        }
        prev_p = p;
    }
    throw NumericalError("critical_pump: det M(0) has no sign change on (0, 2); scan: " + trace);
}

}  // namespace detail

/// Root of det M(0) in the pump strength: geometric bracket scan, then a
/// bracketing TOMS 748 solve down to `pump_tol`.
inline PumpRoot critical_pump(const PhysicalParams& params, const BathToggles& t,
                              const CriticalOptions& opt = {}) {
    auto f = [&](double p) { return det_zero(p, params, t, opt.bath) / det_scale(p, params); };
    PumpRoot r;
    std::string trace;
    auto [lo, hi] = detail::bracket_root(f, opt, r.monotone, trace);
    std::uintmax_t max_iter = 200;
    auto tol = [&](double a, double b) { return std::abs(b - a) <= opt.pump_tol; };
    const auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, tol, max_iter);
    r.iterations = static_cast<int>(max_iter);
    const double fa = f(a), fb = f(b);
    r.pump = std::abs(fa) <= std::abs(fb) ? a : b;
    r.residual = std::abs(fa) <= std::abs(fb) ? fa : fb;
    return r;
}

struct CriticalResult {
    double nU{};
    double pump_naked{};
    double pump_shifted{};
    double rel_shift{};
    double lambda_cr{};
    double residual_naked{};
    double residual_shifted{};
    int iterations{};
    bool monotone{true};
    std::string status{"ok"};
};

inline CriticalResult critical_point(const PhysicalParams& params, const CriticalOptions& opt = {}) {
    CriticalResult r;
    r.nU = params.nU;
    const auto naked = critical_pump(params, BathToggles::naked(), opt);
    const auto full = critical_pump(params, BathToggles{}, opt);
    r.pump_naked = naked.pump;
    r.pump_shifted = full.pump;
    r.rel_shift = (full.pump - naked.pump) / naked.pump;
    r.lambda_cr = std::sqrt(params.U0_mag * full.pump);
    r.residual_naked = naked.residual;
    r.residual_shifted = full.residual;
    r.iterations = naked.iterations + full.iterations;
    r.monotone = naked.monotone && full.monotone;
    return r;
}

/// Fixed point of the closed open-Dicke threshold
/// pump = (Δ_C² + κ²) ω₀² / (4 Δ_C N_C ω'_c0 U₀), ω₀ and ω'_c0 taken at that pump.
inline double open_dicke_pump(const PhysicalParams& params, int max_iter = 200) {
    double p = 0.0;
    for (int i = 0; i < max_iter; ++i) {
        const auto d = validate_and_derive(at_pump(params, p));
        const double next = (params.Delta_C * params.Delta_C + params.kappa * params.kappa) *
                            d.omega_0 * d.omega_0 /
                            (4.0 * params.Delta_C * params.N_C * d.omega_c0p * params.U0_mag);
        if (!(next < 2.0)) throw DomainError("open-Dicke threshold lies beyond pump = 2");
        if (std::abs(next - p) <= 1e-15 * next) return next;
        p = next;
    }
    throw NumericalError("open-Dicke fixed point iteration did not converge");
}

/// λ² from the rearranged threshold condition with R_x = ξ_x(0):
/// λ² = (Δ²+κ²)(ω₀ − R_A) / (Δ [(2√N φ₀ − R̃_AC)² + R̃_C (ω₀ − R_A)]),
/// where R̃_C = ξ_C/λ² and R̃_AC = ξ_AC/λ carry no λ.
inline double threshold_lambda_sq(const DerivedParams& d, const BathTable& table) {
    const auto& p = d.params;
    const auto xi = table.xi(0.0);
    const double lam = d.lambda;
    if (!(lam > 0.0)) throw DomainError("threshold_lambda_sq: needs pump > 0");
    const double RC = xi[index(Channel::C)] / (lam * lam);
    const double RAC = xi[index(Channel::AC)] / lam;
    const double RA = xi[index(Channel::A)];
    const double w0 = d.omega_0;
    const double a = 2.0 * std::sqrt(p.N_C) * d.phi_0 - RAC;
    return (p.Delta_C * p.Delta_C + p.kappa * p.kappa) * (w0 - RA) /
           (p.Delta_C * (a * a + RC * (w0 - RA)));
}

/// One critical point per nU; failures are recorded in `status` and the sweep continues.
inline std::vector<CriticalResult> stokes_shift_sweep(const PhysicalParams& params,
                                                      const std::vector<double>& nU_grid,
                                                      unsigned jobs = 1,
                                                      const CriticalOptions& opt = {}) {
    return parallel_map<CriticalResult>(nU_grid.size(), jobs, [&](std::size_t i) {
        PhysicalParams p = params;
        p.nU = nU_grid[i];
        try {
            return critical_point(p, opt);
        } catch (const std::exception& e) {
            CriticalResult r;
            r.nU = p.nU;
            r.pump_naked = r.pump_shifted = r.rel_shift = r.lambda_cr =
                std::numeric_limits<double>::quiet_NaN();
            r.status = std::string("error: ") + e.what();
            return r;
        }
    });
}

}  // namespace cavityspec
