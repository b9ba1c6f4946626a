// quadrature.hpp - Gauss-Legendre rules and geometric panelling in u = sqrt(W)

#pragma once

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

#include "cavityspec/error.hpp"

namespace cavityspec::quad {

struct Rule {
    std::vector<double> nodes;    // on [-1, 1], ascending
    std::vector<double> weights;
};

namespace detail {

inline Rule compute_gauss_legendre(int n) {
    Rule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p1 = 1.0, p2 = 0.0;
            for (int j = 1; j <= n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
            }
            pp = n * (z * p1 - p2) / (z * z - 1.0);
            const double z1 = z;
            z = z1 - p1 / pp;
            if (std::abs(z - z1) < 1e-15) break;
        }
        // recompute derivative at the converged root
        double p1 = 1.0, p2 = 0.0;
        for (int j = 1; j <= n; ++j) {
            const double p3 = p2;
            p2 = p1;
            p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
        }
        pp = n * (z * p1 - p2) / (z * z - 1.0);
        r.nodes[i] = -z;
        r.nodes[n - 1 - i] = z;
        r.weights[i] = r.weights[n - 1 - i] = 2.0 / ((1.0 - z * z) * pp * pp);
    }
    return r;
}

}  // namespace detail

/// n-point Gauss-Legendre rule on [-1, 1]; rules are computed once and shared.
inline const Rule& gauss_legendre(int n) {
    if (n < 1) throw DomainError("gauss_legendre: order must be >= 1");
    static std::mutex mutex;
    static std::map<int, std::unique_ptr<const Rule>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[n];
    if (!slot) slot = std::make_unique<const Rule>(detail::compute_gauss_legendre(n));
    return *slot;
}

using Panel = std::pair<double, double>;

/// Split [lo, hi] into panels whose widths halve towards `lo`, so that a
/// 1/u or u^0 endpoint behaviour is resolved with a fixed order per panel.
/// For lo == 0 the last panel is [0, hi * 2^-max_levels].
inline std::vector<Panel> geometric_panels(double lo, double hi, int max_levels = 40) {
    std::vector<Panel> panels;
    if (!(hi > lo)) return panels;
    double upper = hi;
    for (int level = 0; level < max_levels; ++level) {
        const double lower = 0.5 * upper;
        if (lower <= lo) {
            panels.emplace_back(lo, upper);
            return panels;
        }
        panels.emplace_back(lower, upper);
        upper = lower;
    }
    panels.emplace_back(lo, upper);
    return panels;
}

/// Map rule nodes onto each panel and call visit(x, w) for every node.
template <class Visit>
void for_each_node(std::span<const Panel> panels, int order, Visit&& visit) {
    const Rule& rule = gauss_legendre(order);
    for (const auto& [a, b] : panels) {
        const double half = 0.5 * (b - a), mid = 0.5 * (b + a);
        for (int i = 0; i < order; ++i) visit(mid + half * rule.nodes[i], half * rule.weights[i]);
    }
}

template <class F>
double integrate_panels(F&& f, std::span<const Panel> panels, int order) {
    double sum = 0.0;
    for_each_node(panels, order, [&](double x, double w) { sum += w * f(x); });
    return sum;
}

/// Integrate f over the panels, doubling the per-panel order until the
/// relative change drops below tol. `max_doublings` bounds the doublings;
/// failure throws NumericalError.
template <class F>
double integrate_doubling(F&& f, std::span<const Panel> panels, double tol,
                          int start_order = 32, int max_doublings = 2) {
    int order = start_order;
    double prev = integrate_panels(f, panels, order);
    for (int k = 0; k < max_doublings; ++k) {
        order *= 2;
        const double next = integrate_panels(f, panels, order);
        if (std::abs(next - prev) <= tol * std::abs(next) || next == prev) return next;
        prev = next;
    }
    throw NumericalError("Gauss-Legendre order doubling did not reach tolerance");
}

}  // namespace cavityspec::quad
