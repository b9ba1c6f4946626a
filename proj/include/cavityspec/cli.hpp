// cli.hpp - subcommands of the cavityspec tool
//
// Every command is a function of a resolved configuration (params.* plus its
// own section) that returns result tables. The CLI layer only resolves the
// configuration, dispatches and writes the tables; `replay` re-runs a command
// from the manifest stored in one of its output files.

#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "cavityspec/config.hpp"
#include "cavityspec/critical.hpp"
#include "cavityspec/emit.hpp"
#include "cavityspec/error.hpp"
#include "cavityspec/fit.hpp"
#include "cavityspec/lattice.hpp"
#include "cavityspec/matsubara.hpp"
#include "cavityspec/model.hpp"
#include "cavityspec/parallel.hpp"
#include "cavityspec/spectral.hpp"

namespace cavityspec::cli {

using config::Entries;
using emit::Cell;
using emit::Table;

inline constexpr double nan = std::numeric_limits<double>::quiet_NaN();

struct Output {
    std::vector<Table> tables;
    int exit_code{0};
};

struct Command {
    const char* name;
    const char* help;
    Entries own_keys;
    std::function<Output(const Entries&, unsigned jobs)> run;
};

namespace detail {

inline std::vector<Channel> channels_of(const config::View& v, const std::string& key) {
    std::vector<Channel> out;
    for (const auto& s : v.strings(key)) {
        if (s == "all") return {all_channels.begin(), all_channels.end()};
        out.push_back(parse_channel(s));
    }
    if (out.empty()) throw ValidationError("key '" + key + "' selects no channel");
    return out;
}

inline std::vector<Branch> branches_of(const config::View& v, const std::string& key) {
    std::vector<Branch> out;
    for (const auto& s : v.strings(key)) {
        if (s == "both") return {Branch::Landau, Branch::Beliaev};
        out.push_back(parse_branch(s));
    }
    if (out.empty()) throw ValidationError("key '" + key + "' selects no branch");
    return out;
}

inline Table make_table(std::string name, std::vector<std::string> columns) {
    Table t;
    t.name = std::move(name);
    t.columns = std::move(columns);
    return t;
}

inline std::vector<double> grid(const config::View& v, const std::string& section) {
    const auto explicit_values = v.list(section + ".values");
    if (!explicit_values.empty()) return explicit_values;
    const long n = v.integer(section + ".points");
    const double a = v.num(section + ".start"), b = v.num(section + ".stop");
    if (n < 1) throw ValidationError(section + ".points must be >= 1");
    std::vector<double> out;
    for (long i = 0; i < n; ++i) out.push_back(n == 1 ? a : a + (b - a) * i / (n - 1));
    return out;
}

inline BathOptions bath_options(const config::View& v) {
    BathOptions b;
    b.tol = v.num("numerics.bath_tol");
    return b;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// derive

inline Output run_derive(const Entries& e, unsigned) {
    const auto d = validate_and_derive(config::to_params(e));
    auto t = detail::make_table("derive", {"quantity", "value"});
    auto add = [&](const char* k, double v) { t.add({std::string(k), v}); };
    add("omega_c0p", d.omega_c0p);
    add("omega_0", d.omega_0);
    add("alpha0", d.alpha0);
    add("phi_0", d.phi_0);
    add("lambda", d.lambda);
    add("eta", d.eta);
    add("lambda_0", d.lambda_0);
    add("gamma_C", d.gamma[0]);
    add("gamma_AC", d.gamma[1]);
    add("gamma_A", d.gamma[2]);
    add("gamma_Adot", d.gamma[3]);
    add("k_phys_per_m", d.k_phys);
    add("area_k2", d.area_k2);
    add("prefactor_P0", d.prefactor);
    add("W_edge", d.W_edge);
    add("W_ir", d.W_ir);
    add("landau_lo", d.supports.landau.lo);
    add("landau_hi", d.supports.landau.hi);
    add("beliaev_lo", d.supports.beliaev.lo);
    add("beliaev_hi", d.supports.beliaev.hi);
    return {{std::move(t)}};
}

// ---------------------------------------------------------------------------
// spectral

inline Output run_spectral(const Entries& e, unsigned) {
    const config::View v(e);
    const auto d = validate_and_derive(config::to_params(e));
    const auto chans = detail::channels_of(v, "spectral.channels");
    const auto branches = detail::branches_of(v, "spectral.branches");
    const long n = v.integer("spectral.points");
    if (n < 2) throw ValidationError("spectral.points must be >= 2");
    SpectralOptions opt;
    opt.w_switch = v.num("spectral.w_switch");

    std::vector<std::string> cols{"branch", "omega", "W"};
    for (auto c : chans) cols.push_back(std::string("G_") + to_string(c));
    auto t = detail::make_table("spectral", cols);
    for (Branch br : branches) {
        const Interval s = d.supports[br];
        if (!(s.width() > 0.0)) continue;
        for (long i = 0; i < n; ++i) {
            // Landau: [lo, ω₀) ; Beliaev: [ω₀, hi]
            const double omega = br == Branch::Landau ? s.lo + s.width() * i / n
                                                      : s.lo + s.width() * i / (n - 1);
            std::vector<Cell> row{std::string(to_string(br)), omega, nan};
            for (auto c : chans) {
                const auto pt = spectral_point(c, omega, d, d.params.beta, opt);
                row[2] = pt.W;
                row.push_back(pt.G);
            }
            t.add(std::move(row));
        }
    }
    return {{std::move(t)}};
}

// ---------------------------------------------------------------------------
// cusp

inline Output run_cusp(const Entries& e, unsigned) {
    const config::View v(e);
    const auto d = validate_and_derive(config::to_params(e));
    const auto chans = detail::channels_of(v, "cusp.channels");
    const long n = v.integer("cusp.points");
    const double lo = v.num("cusp.delta_min"), hi = v.num("cusp.delta_max");
    const double fit_lo = v.num("cusp.fit_min"), fit_hi = v.num("cusp.fit_max");
    if (n < 2 || !(lo > 0.0) || !(hi > lo)) throw ValidationError("cusp grid: need points >= 2 and 0 < delta_min < delta_max");
    if (!(hi < d.supports.beliaev.width())) throw ValidationError("cusp.delta_max exceeds the Beliaev support");

    auto t = detail::make_table("cusp", {"channel", "delta_omega", "W", "G_exact", "G_approx", "rel_err"});
    auto fits = detail::make_table("cusp_fit", {"channel", "slope_vs_delta_omega", "slope_vs_W", "C_closed",
                                                 "norm", "limit_extrapolated", "limit_rel_dev"});
    for (auto c : chans) {
        const auto k = cusp_coefficients(c, d);
        const double scale = d.prefactor * coupling(c, d);
        const double limit = k.norm * k.C;
        std::vector<double> dx, dw, dy;
        for (long i = 0; i < n; ++i) {
            const double delta = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
            const double omega = d.omega_0 + delta;
            const double W = invert_branch(omega, Branch::Beliaev, d);
            const double exact = scale * characteristic(c, Branch::Beliaev, W, d);
            const double approx = scale * k.characteristic_at(W);
            t.add({std::string(to_string(c)), delta, W, exact, approx, (approx - exact) / exact});
        }
        // fit over a log grid restricted to the fit window
        const int m = 61;
        for (int i = 0; i < m; ++i) {
            const double delta = fit_lo * std::pow(fit_hi / fit_lo, static_cast<double>(i) / (m - 1));
            const double W = invert_branch(d.omega_0 + delta, Branch::Beliaev, d);
            const double g = characteristic(c, Branch::Beliaev, W, d);
            dx.push_back(delta);
            dw.push_back(W);
            dy.push_back(std::abs(g - limit));
        }
        const auto fo = power_law_fit(dx, dy);
        const auto fw = power_law_fit(dw, dy);
        const double ext = cusp_limit_extrapolated(c, d);
        fits.add({std::string(to_string(c)), fo.slope, fw.slope, k.C, k.norm, ext,
                  (ext - limit) / limit});
    }
    return {{std::move(t), std::move(fits)}};
}

// ---------------------------------------------------------------------------
// kernels

inline Output run_kernels(const Entries& e, unsigned) {
    const config::View v(e);
    const auto d = validate_and_derive(config::to_params(e));
    const BathTable table(d, d.params.beta, detail::bath_options(v));
    const long n = v.integer("kernels.points");
    const double nu_max = v.num("kernels.nu_max");
    if (n < 1 || !(nu_max >= 0.0)) throw ValidationError("kernels grid: need points >= 1 and nu_max >= 0");
    auto t = detail::make_table("kernels", {"nu", "xi_C", "xi_AC", "xi_A", "xi_Adot"});
    for (long i = 0; i < n; ++i) {
        const double nu = n == 1 ? 0.0 : nu_max * i / (n - 1);
        const auto xi = table.xi(nu);
        t.add({nu, xi[0], xi[1], xi[2], xi[3]});
    }
    auto r = detail::make_table("reorganization", {"channel", "gamma", "xi0", "literal_integral"});
    const auto xi0 = table.xi(0.0);
    const auto lit = table.literal_integral();
    for (auto c : all_channels)
        r.add({std::string(to_string(c)), coupling(c, d), xi0[index(c)], lit[index(c)]});
    return {{std::move(t), std::move(r)}};
}

// ---------------------------------------------------------------------------
// observe

namespace detail {

struct VariancePair {
    double qC2{nan}, qA2{nan}, det0{nan};
    std::string status{"ok"};
};

inline VariancePair safe_variances(const PhysicalParams& p, const BathToggles& t,
                                   const BathOptions& bath, const VarianceOptions& vo) {
    VariancePair out;
    try {
        const auto d = validate_and_derive(p);
        const auto r = variances(d, t, bath, vo);
        out.qC2 = r.qC2;
        out.qA2 = r.qA2;
        out.det0 = r.det0;
    } catch (const SupercriticalError&) {
        out.status = "supercritical";
    } catch (const NumericalError& ex) {
        out.status = std::string("numerical: ") + ex.what();
    }
    return out;
}

}  // namespace detail

inline Output run_observe(const Entries& e, unsigned jobs) {
    const config::View v(e);
    const auto base = config::to_params(e);
    validate_and_derive(base);
    if (std::isinf(base.beta)) throw ValidationError("observe needs a finite params.beta");
    const bool pump_sweep = v.is("observe.sweep", "pump");
    if (!pump_sweep && !v.is("observe.sweep", "nU"))
        throw ValidationError("observe.sweep must be 'pump' or 'nU'");
    const bool normalized = v.flag("observe.normalized");
    const auto xs = detail::grid(v, "observe");
    const BathOptions bath = detail::bath_options(v);
    VarianceOptions vo;
    vo.check_convergence = v.flag("numerics.check_convergence");

    std::optional<CriticalResult> shared;
    if (pump_sweep) shared = critical_point(base);

    auto t = detail::make_table(
        "observe", {"x", "pump", "nU", "pump_cr", "pump_cr_naked", "ratio", "ratio_naked", "qC2",
                    "qA2", "qC2_naked", "qA2_naked", "rel_C", "rel_A", "qC2_naked_same_ratio",
                    "qA2_naked_same_ratio", "rel_C_normalized", "rel_A_normalized", "det0",
                    "det0_naked", "status"});
    auto rows = parallel_map<std::vector<Cell>>(xs.size(), jobs, [&](std::size_t i) {
        PhysicalParams p = base;
        const double x = xs[i];
        if (!pump_sweep) p.nU = x;
        const CriticalResult cr = shared ? *shared : critical_point(p);
        double pump = pump_sweep ? (normalized ? x * cr.pump_shifted : x) : p.omega_bar_P;
        p.omega_bar_P = pump;
        const auto full = detail::safe_variances(p, BathToggles{}, bath, vo);
        const auto naked = detail::safe_variances(p, BathToggles::naked(), bath, vo);
        const double ratio = pump / cr.pump_shifted;
        PhysicalParams q = p;
        q.omega_bar_P = ratio * cr.pump_naked;
        const auto same = detail::safe_variances(q, BathToggles::naked(), bath, vo);
        std::string status = full.status;
        if (status == "ok") status = naked.status;
        if (status == "ok") status = same.status;
        return std::vector<Cell>{x, pump, p.nU, cr.pump_shifted, cr.pump_naked, ratio,
                                 pump / cr.pump_naked, full.qC2, full.qA2, naked.qC2, naked.qA2,
                                 full.qC2 / naked.qC2 - 1.0, full.qA2 / naked.qA2 - 1.0, same.qC2,
                                 same.qA2, full.qC2 / same.qC2 - 1.0, full.qA2 / same.qA2 - 1.0,
                                 full.det0, naked.det0, status};
    });
    for (auto& r : rows) t.add(std::move(r));
    return {{std::move(t)}};
}

// ---------------------------------------------------------------------------
// critical

inline Output run_critical(const Entries& e, unsigned jobs) {
    const config::View v(e);
    const auto base = config::to_params(e);
    validate_and_derive(base);
    std::vector<double> grid = v.list("critical.values");
    if (grid.empty()) {
        if (v.integer("critical.points") == 0) grid = {base.nU};
        else grid = detail::grid(v, "critical");
    }
    const auto results = stokes_shift_sweep(base, grid, jobs);
    auto t = detail::make_table("critical", {"nU", "pump_naked", "pump_shifted", "rel_shift",
                                             "lambda_cr", "open_dicke_pump", "residual_naked",
                                             "residual_shifted", "iterations", "monotone", "status"});
    std::vector<double> xs, ys;
    bool failed = false;
    for (const auto& r : results) {
        double od = nan;
        try {
            PhysicalParams p = base;
            p.nU = r.nU;
            od = open_dicke_pump(p);
        } catch (const std::exception&) {
        }
        t.add({r.nU, r.pump_naked, r.pump_shifted, r.rel_shift, r.lambda_cr, od, r.residual_naked,
               r.residual_shifted, static_cast<double>(r.iterations), r.monotone ? 1.0 : 0.0, r.status});
        if (r.status == "ok") {
            xs.push_back(r.nU);
            ys.push_back(r.rel_shift);
        } else {
            failed = true;
        }
    }
    Output out;
    out.tables.push_back(std::move(t));
    auto f = detail::make_table("critical_fit", {"points", "slope", "intercept", "r2"});
    bool distinct = xs.size() >= 2 && std::adjacent_find(xs.begin(), xs.end(), std::not_equal_to<>()) != xs.end();
    if (distinct) {
        const auto lf = linear_fit(xs, ys);
        f.add({static_cast<double>(xs.size()), lf.slope, lf.intercept, lf.r2});
    }
    out.tables.push_back(std::move(f));
    if (failed) out.exit_code = 3;
    return out;
}

// ---------------------------------------------------------------------------
// oracle

inline Output run_oracle(const Entries& e, unsigned jobs) {
    const config::View v(e);
    const auto d = validate_and_derive(config::to_params(e));
    lattice::LatticeSpec spec;
    spec.scale = static_cast<int>(v.integer("oracle.scale"));
    if (v.is("oracle.geometry", "disc")) spec.geometry = lattice::Geometry::Disc;
    else if (v.is("oracle.geometry", "square")) spec.geometry = lattice::Geometry::Square;
    else throw ValidationError("oracle.geometry must be 'disc' or 'square'");
    const int bins = static_cast<int>(v.integer("oracle.bins"));
    lattice::CompareOptions opt;
    opt.jobs = jobs;

    auto bins_t = detail::make_table("oracle_bins", {"channel", "branch", "scale", "bin", "omega_lo",
                                                     "omega_hi", "lattice", "continuum", "rel_dev"});
    auto summary = detail::make_table("oracle", {"channel", "branch", "scale", "max_rel_dev",
                                                 "mean_rel_dev", "refined_scale", "refined_max_rel_dev",
                                                 "refined_mean_rel_dev", "status"});
    Output out;
    for (auto c : detail::channels_of(v, "oracle.channels")) {
        for (auto br : detail::branches_of(v, "oracle.branches")) {
            const auto a = lattice::binned_at_scale(c, br, spec, bins, d, d.params.beta, opt);
            auto fine = spec;
            fine.scale *= 2;
            const auto b = lattice::binned_at_scale(c, br, fine, bins, d, d.params.beta, opt);
            for (const auto* r : {&a, &b})
                for (int k = 0; k < bins; ++k) {
                    const double cm = r->continuum_mass[k], lm = r->lattice_mass[k];
                    bins_t.add({std::string(to_string(c)), std::string(to_string(br)),
                                static_cast<double>(r->scale), static_cast<double>(k), r->edges[k],
                                r->edges[k + 1], lm, cm, cm != 0.0 ? std::abs(lm - cm) / std::abs(cm) : nan});
                }
            const bool trivial = a.compared_bins == 0 && b.compared_bins == 0;
            const bool ok = trivial || b.mean_rel_dev < a.mean_rel_dev;
            if (!ok) out.exit_code = 3;
            summary.add({std::string(to_string(c)), std::string(to_string(br)),
                         static_cast<double>(a.scale), a.max_rel_dev, a.mean_rel_dev,
                         static_cast<double>(b.scale), b.max_rel_dev, b.mean_rel_dev,
                         std::string(ok ? "ok" : "not_converging")});
        }
    }
    out.tables.push_back(std::move(summary));
    out.tables.push_back(std::move(bins_t));
    return out;
}

// ---------------------------------------------------------------------------
// registry

inline const std::vector<Command>& commands() {
    static const std::vector<Command> list{
        {"derive", "print the derived parameters", {}, run_derive},
        {"spectral", "spectral densities G_x(omega) on a frequency grid",
         {{"spectral.channels", "all"}, {"spectral.branches", "both"}, {"spectral.points", "400"},
          {"spectral.w_switch", "1e-10"}},
         run_spectral},
        {"cusp", "exact vs cusp approximant near omega_0, with power-law fits",
         {{"cusp.channels", "all"}, {"cusp.points", "61"}, {"cusp.delta_min", "1e-7"},
          {"cusp.delta_max", "0.1"}, {"cusp.fit_min", "1e-7"}, {"cusp.fit_max", "1e-4"}},
         run_cusp},
        {"kernels", "Matsubara kernels xi_x(nu) and reorganization energies",
         {{"kernels.points", "81"}, {"kernels.nu_max", "40"}, {"numerics.bath_tol", "1e-9"}},
         run_kernels},
        {"observe", "variance sweep over the pump or nU",
         {{"observe.sweep", "pump"}, {"observe.normalized", "true"}, {"observe.start", "0"},
          {"observe.stop", "0.999"}, {"observe.points", "50"}, {"observe.values", ""},
          {"numerics.bath_tol", "1e-9"}, {"numerics.check_convergence", "true"}},
         run_observe},
        {"critical", "critical pump with and without baths (Stokes shift)",
         {{"critical.values", ""}, {"critical.start", "0.005"}, {"critical.stop", "0.1"},
          {"critical.points", "0"}},
         run_critical},
        {"oracle", "lattice-sum vs continuum binned comparison",
         {{"oracle.scale", "512"}, {"oracle.bins", "32"}, {"oracle.geometry", "disc"},
          {"oracle.channels", "all"}, {"oracle.branches", "both"}},
         run_oracle},
    };
    return list;
}

inline const Command& find_command(const std::string& name) {
    for (const auto& c : commands())
        if (name == c.name) return c;
    throw ValidationError("unknown command '" + name + "'");
}

inline Entries schema_of(const Command& c) {
    Entries s = config::params_schema();
    for (const auto& [k, v] : c.own_keys) s[k] = v;
    return s;
}

/// Resolve file entries and overrides against the command schema.
inline Entries resolve(const Command& c, const Entries& file, const Entries& overrides) {
    Entries e = schema_of(c);
    config::overlay(e, file);
    config::overlay(e, overrides);
    return e;
}

/// Run a command and stamp tool.* keys into every table manifest.
inline Output execute(const Command& c, const Entries& resolved, unsigned jobs,
                      const std::string& prefix = "", const std::string& figure = "") {
    Output out = c.run(resolved, jobs);
    for (auto& t : out.tables) {
        t.manifest = resolved;
        t.manifest["tool.command"] = c.name;
        t.manifest["tool.table"] = t.name;
        t.manifest["tool.version"] = emit::tool_version;
        if (!figure.empty()) t.manifest["tool.figure"] = figure;
        if (!prefix.empty()) {
            // main table -> prefix, "<command>_fit" -> prefix_fit, others -> prefix_<name>
            const std::string lead = std::string(c.name) + "_";
            if (t.name == c.name) t.name = prefix;
            else if (t.name.rfind(lead, 0) == 0) t.name = prefix + "_" + t.name.substr(lead.size());
            else t.name = prefix + "_" + t.name;
        }
        t.manifest["tool.output"] = t.name;
    }
    return out;
}

// ---------------------------------------------------------------------------
// figure recipes

struct Recipe {
    std::string output;  // file stem for the command's main table
    std::string command;
    Entries settings;
};

inline Entries fig2_params() {
    return {{"params.nU", "0.016"}, {"params.beta", "1710"}, {"params.Delta_C", "2"},
            {"params.kappa", "1.25"}, {"params.omega_D", "1000000000"}, {"params.n_max", "10000"}};
}

inline Entries merged(Entries a, const Entries& b) {
    for (const auto& [k, v] : b) a[k] = v;
    return a;
}

inline std::vector<Recipe> figure_recipes(const std::string& fig) {
    const Entries pump_sweep{{"observe.sweep", "pump"}, {"observe.normalized", "true"},
                             {"observe.start", "0"}, {"observe.stop", "0.999"},
                             {"observe.points", "50"}};
    if (fig == "fig1") {
        std::vector<Recipe> r;
        for (auto c : all_channels)
            r.push_back({std::string("fig1_") + to_string(c), "spectral",
                         {{"spectral.channels", to_string(c)}, {"spectral.branches", "B"},
                          {"params.beta", "inf"}}});
        return r;
    }
    if (fig == "figS1") return {{"figS1", "cusp", {{"params.beta", "inf"}}}};
    if (fig == "fig2")
        return {{"fig2", "observe", merged(fig2_params(), pump_sweep)},
                {"fig2_critical", "critical", fig2_params()}};
    if (fig == "fig3") {
        std::vector<Recipe> r;
        for (const char* pump : {"0.01", "0.02"}) {
            Entries s = merged(fig2_params(), {{"observe.sweep", "nU"}, {"observe.start", "0.005"},
                                               {"observe.stop", "0.1"}, {"observe.points", "20"},
                                               {"params.omega_bar_P", pump}});
            r.push_back({std::string("fig3_pump_") + pump, "observe", s});
        }
        return r;
    }
    if (fig == "figS2") {
        const Entries left = merged(fig2_params(), {{"params.beta", "1.71"}});
        const Entries right = merged(left, {{"params.Delta_C", "20"}});
        return {{"figS2_left", "observe", merged(left, pump_sweep)},
                {"figS2_left_critical", "critical", left},
                {"figS2_right", "observe", merged(right, pump_sweep)},
                {"figS2_right_critical", "critical", right}};
    }
    if (fig == "figS3") {
        const Entries s = merged(fig2_params(), {{"params.beta", "1.71"}, {"params.Delta_C", "2000"},
                                                 {"params.kappa", "1250"}});
        return {{"figS3", "observe", merged(s, pump_sweep)}, {"figS3_critical", "critical", s}};
    }
    if (fig == "figS4")
        return {{"figS4", "critical",
                 merged(fig2_params(), {{"critical.start", "0.005"}, {"critical.stop", "0.1"},
                                        {"critical.points", "20"}})}};
    throw ValidationError("unknown figure '" + fig + "' (fig1 fig2 fig3 figS1 figS2 figS3 figS4)");
}

inline Output run_figure(const std::string& fig, unsigned jobs) {
    Output out;
    for (const auto& r : figure_recipes(fig)) {
        const auto& cmd = find_command(r.command);
        auto o = execute(cmd, resolve(cmd, {}, r.settings), jobs, r.output, fig);
        for (auto& t : o.tables) out.tables.push_back(std::move(t));
        out.exit_code = std::max(out.exit_code, o.exit_code);
    }
    return out;
}

/// Re-run the command recorded in an output file's manifest; returns that one table.
inline Output run_replay(const std::filesystem::path& file, unsigned jobs) {
    Entries m = emit::read_manifest(file);
    auto take = [&](const std::string& k) {
        auto it = m.find(k);
        if (it == m.end()) throw ValidationError("manifest lacks '" + k + "'");
        std::string v = it->second;
        m.erase(it);
        return v;
    };
    const std::string command = take("tool.command");
    const std::string table = take("tool.table");
    const std::string output = take("tool.output");
    const std::string version = take("tool.version");
    std::string figure;
    if (m.count("tool.figure")) figure = take("tool.figure");
    if (version != emit::tool_version)
        throw ValidationError("manifest was written by version " + version);
    const auto& cmd = find_command(command);
    Output all = execute(cmd, resolve(cmd, {}, m), jobs, "", figure);
    Output out;
    out.exit_code = all.exit_code;
    for (auto& t : all.tables)
        if (t.manifest["tool.table"] == table) {
            t.name = output;
            t.manifest["tool.output"] = output;
            out.tables.push_back(std::move(t));
        }
    return out;
}

// ---------------------------------------------------------------------------
// entry point

inline void write_error(std::ostream& err, const char* kind, const std::string& msg, int code) {
    nlohmann::ordered_json j;
    j["error"] = kind;
    j["message"] = msg;
    j["exit_code"] = code;
    err << j.dump() << '\n';
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
    CLI::App app{"cavityspec: quasiparticle baths of a cavity BEC"};
    app.require_subcommand(1);
    app.fallthrough();
    std::string config_path, out_dir, format = "csv";
    int jobs = 0;
    std::vector<std::string> sets;
    app.add_option("--config", config_path, "configuration file (key = value, [section] headers)");
    app.add_option("--out-dir", out_dir, "write one file per table here instead of stdout");
    app.add_option("--jobs", jobs, "worker threads (default: CAVITYSPEC_JOBS or all cores)");
    app.add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--set", sets, "override a configuration key, section.key=value");

    std::map<std::string, CLI::App*> subs;
    std::map<std::string, std::string> shortcut_values;
    auto shortcut = [&](CLI::App* s, const std::string& flag, const std::string& key) {
        s->add_option(flag, shortcut_values[key], "shortcut for --set " + key + "=...");
    };
    for (const auto& c : commands()) subs[c.name] = app.add_subcommand(c.name, c.help);
    shortcut(subs["spectral"], "--channel", "spectral.channels");
    shortcut(subs["spectral"], "--branch", "spectral.branches");
    shortcut(subs["spectral"], "--points", "spectral.points");
    shortcut(subs["observe"], "--sweep", "observe.sweep");
    shortcut(subs["observe"], "--points", "observe.points");
    shortcut(subs["oracle"], "--scale", "oracle.scale");
    shortcut(subs["oracle"], "--bins", "oracle.bins");
    shortcut(subs["oracle"], "--geometry", "oracle.geometry");
    std::string figure, replay_file;
    auto* fig_cmd = app.add_subcommand("figures", "canned runs behind each figure");
    fig_cmd->add_option("figure", figure, "fig1|fig2|fig3|figS1|figS2|figS3|figS4")->required();
    auto* replay_cmd = app.add_subcommand("replay", "re-run the command recorded in an output file");
    replay_cmd->add_option("file", replay_file, "CSV or JSON written by cavityspec")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        write_error(err, "usage", e.what(), 2);
        return 2;
    }

    try {
        const emit::Format fmt = emit::parse_format(format);
        const unsigned workers = resolve_jobs(jobs);
        Output result;
        if (fig_cmd->parsed()) {
            if (!config_path.empty() || !sets.empty())
                throw ValidationError("figures use fixed recipes; --config and --set are not accepted");
            if (out_dir.empty()) out_dir = "figures";
            result = run_figure(figure, workers);
        } else if (replay_cmd->parsed()) {
            result = run_replay(replay_file, workers);
        } else {
            const Command* cmd = nullptr;
            for (const auto& c : commands())
                if (subs[c.name]->parsed()) cmd = &c;
            Entries file = config_path.empty() ? Entries{} : config::load(config_path);
            Entries overrides;
            for (const auto& s : sets) {
                auto [k, v] = config::parse_override(s);
                overrides[k] = v;
            }
            for (const auto& [k, v] : shortcut_values)
                if (!v.empty() && k.rfind(std::string(cmd->name) + ".", 0) == 0) overrides[k] = v;
            result = execute(*cmd, resolve(*cmd, file, overrides), workers);
        }
        for (const auto& t : result.tables) {
            if (out_dir.empty()) {
                emit::write(out, t, fmt);
            } else {
                emit::write_file(out_dir, t, fmt);
            }
        }
        if (result.exit_code == 3) write_error(err, "numerical", "one or more points did not converge; see status columns", 3);
        return result.exit_code;
    } catch (const ValidationError& e) {
        write_error(err, "validation", e.what(), 2);
        return 2;
    } catch (const NumericalError& e) {
        write_error(err, "numerical", e.what(), 3);
        return 3;
    } catch (const std::exception& e) {
        write_error(err, "io", e.what(), 1);
        return 1;
    }
}

}  // namespace cavityspec::cli
