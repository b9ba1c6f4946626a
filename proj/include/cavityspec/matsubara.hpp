// matsubara.hpp - imaginary-time quadratic form of the (q_C, q_A) system and its variances

#pragma once

#include <algorithm>
#include <array>
#include <limits>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include <boost/math/special_functions/trigamma.hpp>

#include "cavityspec/error.hpp"
#include "cavityspec/model.hpp"
#include "cavityspec/quadrature.hpp"
#include "cavityspec/spectral.hpp"

namespace cavityspec {

struct BathToggles {
    bool quasiparticle_channels{true};
    bool cavity_loss{true};
    bool direct_coupling{true};

    static BathToggles naked() { return {false, true, true}; }
    static BathToggles none() { return {false, false, false}; }
};

struct MatsubaraMatrix {
    double nu{};
    double m_cc{}, m_aa{}, m_ca{};

    double det() const { return m_cc * m_aa - m_ca * m_ca; }
    double inv_cc() const { return 1.0 / (m_cc - m_ca * m_ca / m_aa); }
    double inv_aa() const { return 1.0 / (m_aa - m_ca * m_ca / m_cc); }
    double min_eigenvalue() const {
        const double mean = 0.5 * (m_cc + m_aa);
        const double half = 0.5 * (m_cc - m_aa);
        return mean - std::hypot(half, m_ca);
    }
};

using KernelValues = std::array<double, 4>;  // indexed by Channel

struct BathOptions {
    double tol{1e-9};
    int start_order{32};
    int max_doublings{2};
};

/// Quadrature nodes of both branches with the channel weights folded in, so
/// that ξ_x(ν) = Σ_k h_x[k] · 2ω_k / (ν² + ω_k²) costs one pass per ν.
class BathTable {
public:
    BathTable() = default;

    BathTable(const DerivedParams& d, double beta, const BathOptions& opt = {}) {
        if (!(beta > 0.0)) throw DomainError("bath table: beta must be > 0");
        if (!std::isinf(beta) && !(d.W_ir > 0.0))
            throw DomainError("kernel integrals diverge at finite temperature without an "
                              "infrared cutoff (ir_cutoff = none)");
        order_ = opt.start_order;
        fill(d, beta, order_);
        for (int k = 0; k <= opt.max_doublings; ++k) {
            if (k == opt.max_doublings)
                throw NumericalError("kernel quadrature did not converge after order doubling");
            BathTable finer;
            finer.fill(d, beta, 2 * order_);
            const bool done = finer.agrees_with(*this, opt.tol);
            *this = std::move(finer);
            if (done) break;
        }
    }

    KernelValues xi(double nu) const {
        KernelValues out{};
        const double nu2 = nu * nu;
        for (std::size_t k = 0; k < omega_.size(); ++k) {
            const double w = omega_[k];
            const double g = 2.0 * w / (nu2 + w * w);
            for (int c = 0; c < 4; ++c) out[c] += h_[c][k] * g;
        }
        return out;
    }

    /// ∫ G_x dω over the same W range.
    KernelValues literal_integral() const {
        KernelValues out{};
        for (int c = 0; c < 4; ++c)
            for (double h : h_[c]) out[c] += h;
        return out;
    }

    /// ∫ ω G_x dω, the coefficient of 2/ν² in the large-ν expansion of ξ_x.
    KernelValues first_moment() const {
        KernelValues out{};
        for (int c = 0; c < 4; ++c)
            for (std::size_t k = 0; k < omega_.size(); ++k) out[c] += h_[c][k] * omega_[k];
        return out;
    }

    int order() const { return order_; }
    std::size_t size() const { return omega_.size(); }

private:
    void fill(const DerivedParams& d, double beta, int order) {
        order_ = order;
        omega_.clear();
        for (auto& v : h_) v.clear();
        const double u_lo = std::sqrt(d.W_ir), u_hi = std::sqrt(d.W_edge);
        const auto panels = quad::geometric_panels(u_lo, u_hi);
        for (Branch br : all_branches) {
            quad::for_each_node(panels, order, [&](double u, double w) {
                const double W = u * u;
                const auto f = bogoliubov_factors(W, d);
                const double N = thermal_weight(br, f, beta);
                omega_.push_back(br == Branch::Landau ? f.omega_c - f.omega_b
                                                      : f.omega_c + f.omega_b);
                for (Channel c : all_channels)
                    h_[index(c)].push_back(d.prefactor * coupling(c, d) * channel_shape(c, br, f) *
                                           N * 2.0 * u * w);
            });
        }
    }

    bool agrees_with(const BathTable& coarse, double tol) const {
        const auto a = xi(0.0), b = coarse.xi(0.0);
        for (int c = 0; c < 4; ++c) {
            double scale = 0.0;
            for (std::size_t k = 0; k < omega_.size(); ++k)
                scale += std::abs(h_[c][k]) * 2.0 / omega_[k];
            if (scale == 0.0) continue;
            if (std::abs(a[c] - b[c]) > tol * scale) return false;
        }
        return true;
    }

    int order_{0};
    std::vector<double> omega_;
    std::array<std::vector<double>, 4> h_;
};

/// ξ_x(ν) = ∫ dω G_x(ω) 2ω / (ν² + ω²), evaluated as a W-integral.
inline double kernel_transform(Channel c, double nu, const DerivedParams& d, double beta,
                               const BathOptions& opt = {}) {
    return BathTable(d, beta, opt).xi(nu)[index(c)];
}

/// Drude-softened loss rate s(ν) = |ν| ω_D / (|ν| + ω_D).
inline double cavity_loss_term(double nu, const PhysicalParams& p) {
    const double a = std::abs(nu);
    if (std::isinf(p.omega_D)) return a;
    return a * p.omega_D / (a + p.omega_D);
}

inline MatsubaraMatrix build_matrix(double nu, const DerivedParams& d, const BathToggles& t,
                                    const BathTable* table = nullptr) {
    const auto& p = d.params;
    const double w0 = d.omega_0, D = p.Delta_C;
    MatsubaraMatrix m;
    m.nu = nu;
    const double nu2 = nu * nu;
    if (t.cavity_loss) {
        const double s = cavity_loss_term(nu, p) + p.kappa;
        m.m_cc = s * s + D * D;
    } else {
        m.m_cc = nu2 + D * D;
    }
    m.m_aa = nu2 + w0 * w0;
    const double direct = t.direct_coupling ? 2.0 * d.lambda_0 : 0.0;
    m.m_ca = std::sqrt(D * w0) * direct;
    if (t.quasiparticle_channels) {
        if (!table) throw ValidationError("build_matrix: quasiparticle channels need a bath table");
        const auto xi = table->xi(nu);
        m.m_cc -= D * xi[index(Channel::C)];
        m.m_aa -= w0 * xi[index(Channel::A)] + nu2 / w0 * xi[index(Channel::Adot)];
        m.m_ca = std::sqrt(D * w0) * (direct - xi[index(Channel::AC)]);
    }
    return m;
}

struct VarianceResult {
    double qC2{};
    double qA2{};
    double det0{};           // det M(0)
    double min_eigenvalue{}; // over n = 0 .. n_max
    long n_max{};
    double convergence{};    // relative change against 2 n_max
};

struct VarianceOptions {
    bool check_convergence{true};
    double convergence_tol{1e-6};
    int tail_order{32};
};

namespace detail {

struct Diagonal {
    double cc, aa;
};

inline Diagonal inverse_diagonal(double nu, const DerivedParams& d, const BathToggles& t,
                                 const BathTable* table) {
    const auto m = build_matrix(nu, d, t, table);
    return {m.inv_cc(), m.inv_aa()};
}

// Σ_{n > N} [M⁻¹]_jj(ν_n): ψ' for the leading 1/ν², the midpoint Euler-Maclaurin
// integral for the remainder.
inline Diagonal tail(long N, double beta, const DerivedParams& d, const BathToggles& t,
                     const BathTable* table, int order) {
    const double c = beta / (2.0 * std::numbers::pi);
    const double lead = c * c * boost::math::trigamma(static_cast<double>(N) + 1.0);
    auto remainder = [&](double x) {
        const auto g = inverse_diagonal(x / c, d, t, table);
        const double inv = c * c / (x * x);
        return Diagonal{g.cc - inv, g.aa - inv};
    };
    const double a = static_cast<double>(N) + 0.5;
    // x = a / s, s in (0, 1]
    Diagonal integral{0.0, 0.0};
    const std::array<quad::Panel, 4> panels{{{0.0, 0.125}, {0.125, 0.25}, {0.25, 0.5}, {0.5, 1.0}}};
    quad::for_each_node(panels, order, [&](double s, double w) {
        const auto r = remainder(a / s);
        const double jac = a / (s * s);
        integral.cc += w * jac * r.cc;
        integral.aa += w * jac * r.aa;
    });
    const double h = 1e-3 * a;
    const auto rp = remainder(a + h), rm = remainder(a - h);
    const double dcc = (rp.cc - rm.cc) / (2.0 * h), daa = (rp.aa - rm.aa) / (2.0 * h);
    return {lead + integral.cc + dcc / 24.0, lead + integral.aa + daa / 24.0};
}

struct PartialSum {
    Diagonal sum{0.0, 0.0};
    double min_eig{std::numeric_limits<double>::infinity()};
};

inline void accumulate(PartialSum& ps, long from, long to, double beta, const DerivedParams& d,
                       const BathToggles& t, const BathTable* table) {
    const double step = 2.0 * std::numbers::pi / beta;
    for (long n = from; n <= to; ++n) {
        const auto m = build_matrix(step * static_cast<double>(n), d, t, table);
        const double weight = n == 0 ? 1.0 : 2.0;
        ps.sum.cc += weight * m.inv_cc();
        ps.sum.aa += weight * m.inv_aa();
        ps.min_eig = std::min(ps.min_eig, m.min_eigenvalue());
    }
}

inline Diagonal finish(const PartialSum& ps, long N, double beta, const DerivedParams& d,
                       const BathToggles& t, const BathTable* table, int order) {
    const auto tl = tail(N, beta, d, t, table, order);
    return {(ps.sum.cc + 2.0 * tl.cc) / beta, (ps.sum.aa + 2.0 * tl.aa) / beta};
}

}  // namespace detail

/// Equal-time variances ⟨q_C²⟩, ⟨q_A²⟩ = (1/β) Σ_n [M(ν_n)⁻¹]_jj.
/// `table` must be given when the quasiparticle channels are on.
inline VarianceResult variances(const DerivedParams& d, const BathToggles& t,
                                const BathTable* table = nullptr,
                                const VarianceOptions& opt = {}) {
    const double beta = d.params.beta;
    if (std::isinf(beta))
        throw DomainError("variances: the Matsubara sum needs a finite beta");
    const long N = d.params.n_max;
    const auto m0 = build_matrix(0.0, d, t, table);
    if (!(m0.det() > 0.0) || !(m0.m_cc > 0.0) || !(m0.m_aa > 0.0))
        throw SupercriticalError("det M(0) <= 0: pump at or above the critical value");

    detail::PartialSum ps;
    detail::accumulate(ps, 0, N, beta, d, t, table);
    const auto v = detail::finish(ps, N, beta, d, t, table, opt.tail_order);

    VarianceResult r;
    r.qC2 = v.cc;
    r.qA2 = v.aa;
    r.det0 = m0.det();
    r.min_eigenvalue = ps.min_eig;
    r.n_max = N;
    if (opt.check_convergence) {
        detail::PartialSum wide = ps;
        detail::accumulate(wide, N + 1, 2 * N, beta, d, t, table);
        const auto v2 = detail::finish(wide, 2 * N, beta, d, t, table, opt.tail_order);
        r.convergence = std::max(std::abs(v2.cc - v.cc) / std::abs(v2.cc),
                                 std::abs(v2.aa - v.aa) / std::abs(v2.aa));
        if (r.convergence > opt.convergence_tol)
            throw NumericalError("Matsubara sum not converged: doubling n_max changes the "
                                 "variances by " + std::to_string(r.convergence));
    }
    return r;
}

/// Variances with the bath table built here when the toggles need one.
inline VarianceResult variances(const DerivedParams& d, const BathToggles& t,
                                const BathOptions& bath, const VarianceOptions& opt = {}) {
    if (!t.quasiparticle_channels) return variances(d, t, nullptr, opt);
    const BathTable table(d, d.params.beta, bath);
    return variances(d, t, &table, opt);
}

struct Reorganization {
    double xi0{};      // ξ_x(0) = ∫ 2 G_x / ω dω, used by the critical determinant
    double literal{};  // ∫ G_x dω
};

inline Reorganization reorganization(Channel c, const DerivedParams& d, double beta,
                                     const BathOptions& opt = {}) {
    const BathTable table(d, beta, opt);
    return {table.xi(0.0)[index(c)], table.literal_integral()[index(c)]};
}

}  // namespace cavityspec
