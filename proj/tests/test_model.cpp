#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "cavityspec/model.hpp"

using namespace cavityspec;

namespace {

DerivedParams fig1() { return validate_and_derive(PhysicalParams{}); }

void expect_validation(PhysicalParams p, const char* fragment) {
    try {
        validate_and_derive(p);
        FAIL() << "expected ValidationError mentioning " << fragment;
    } catch (const ValidationError& e) {
        EXPECT_NE(std::string(e.what()).find(fragment), std::string::npos) << e.what();
    }
}

}  // namespace

TEST(Derive, Fig1Values) {
    const auto d = fig1();
    EXPECT_DOUBLE_EQ(d.omega_c0p, 1.99);
    EXPECT_NEAR(d.omega_0, 2.0876, 1e-4);
    EXPECT_NEAR(d.phi_0, 0.9764, 1e-4);
    EXPECT_NEAR(d.eta, 8.9443e-4, 1e-8);
    EXPECT_NEAR(d.lambda, 3.1623e-3, 1e-7);
    EXPECT_NEAR(d.k_phys, 7.824e6, 0.001e6);
    EXPECT_NEAR(d.area_k2, 4.04e4, 0.01e4);
    EXPECT_DOUBLE_EQ(d.W_edge, 0.5);
    EXPECT_NEAR(d.prefactor, d.area_k2 / (4.0 * std::numbers::pi), 1e-9 * d.prefactor);
}

TEST(Derive, AlgebraicIdentitiesHold) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> nu(0.0, 0.5), pump(0.0, 1.9), nc(1e3, 1e6);
    for (int i = 0; i < 200; ++i) {
        PhysicalParams p;
        p.nU = nu(rng);
        p.omega_bar_P = pump(rng);
        p.N_C = nc(rng);
        const auto d = validate_and_derive(p);
        const double w2 = d.omega_c0p * (d.omega_c0p + 2.0 * p.nU);
        EXPECT_NEAR(d.omega_0 * d.omega_0, w2, 1e-12 * w2);
        EXPECT_NEAR(d.phi_0 * d.phi_0, d.omega_c0p / d.omega_0, 1e-12);
        EXPECT_NEAR(d.phi_0, std::cosh(d.alpha0) - std::sinh(d.alpha0), 1e-12);
        EXPECT_NEAR(d.eta, 2.0 * p.nU / std::sqrt(p.N_C), 1e-12 * (d.eta + 1e-300));
        EXPECT_LT(d.supports.landau.hi, d.supports.beliaev.hi);
        EXPECT_DOUBLE_EQ(d.supports.landau.hi, d.omega_0);
        EXPECT_DOUBLE_EQ(d.supports.beliaev.lo, d.omega_0);
    }
}

TEST(Derive, CouplingList) {
    const auto d = fig1();
    EXPECT_DOUBLE_EQ(d.gamma[0], d.lambda * d.lambda);
    EXPECT_DOUBLE_EQ(d.gamma[1], d.lambda * d.eta * d.phi_0);
    EXPECT_DOUBLE_EQ(d.gamma[2], d.eta * d.eta * d.phi_0 * d.phi_0 / 2.0);
    EXPECT_DOUBLE_EQ(d.gamma[3], d.eta * d.eta / (2.0 * d.phi_0 * d.phi_0));
    EXPECT_NEAR(d.lambda_0, std::sqrt(5e4) * d.phi_0 * d.lambda, 1e-15);
}

TEST(Derive, ValidationErrorsNameTheInvariant) {
    PhysicalParams p;
    p.omega_bar_P = 2.0;
    expect_validation(p, "omega_bar_P < 2");
    p = {};
    p.nU = -0.1;
    expect_validation(p, "nU >= 0");
    p = {};
    p.N_C = 0;
    expect_validation(p, "N_C > 0");
    p = {};
    p.Delta_C = 0;
    expect_validation(p, "Delta_C > 0");
    p = {};
    p.beta = 0;
    expect_validation(p, "beta > 0");
    p = {};
    p.n_max = 0;
    expect_validation(p, "n_max >= 1");
    p = {};
    p.kappa = -1;
    expect_validation(p, "kappa >= 0");
}

TEST(Derive, InfraredCellCutoff) {
    auto d = fig1();
    EXPECT_NEAR(d.W_ir, 1.0 / d.prefactor, 1e-15);
    PhysicalParams p;
    p.ir_cutoff = IrCutoff::none();
    EXPECT_EQ(validate_and_derive(p).W_ir, 0.0);
    p.ir_cutoff = IrCutoff::fixed(1e-3);
    EXPECT_EQ(validate_and_derive(p).W_ir, 1e-3);
}

TEST(Dispersion, Fig1Examples) {
    const auto d = fig1();
    const auto f = bogoliubov_factors(0.5, d);
    EXPECT_NEAR(f.omega_b, 0.59161, 1e-5);
    EXPECT_NEAR(f.omega_c, 2.58807, 1e-5);
    EXPECT_NEAR(dispersion(0.5, Branch::Beliaev, d).omega, 3.1797, 1e-4);
    EXPECT_NEAR(dispersion(0.32010, Branch::Landau, d).omega, 2.0000, 1e-4);
    EXPECT_DOUBLE_EQ(dispersion(0.0, Branch::Beliaev, d).omega, d.omega_0);
    EXPECT_NEAR(dispersion(1e-14, Branch::Beliaev, d).omega, d.omega_0, 1e-6);
}

TEST(Dispersion, DomainErrors) {
    const auto d = fig1();
    EXPECT_THROW(dispersion(-1e-3, Branch::Beliaev, d), DomainError);
    EXPECT_THROW(dispersion(0.5 + 1e-12, Branch::Landau, d), DomainError);
    EXPECT_THROW(dispersion(0.0, Branch::Landau, d), DomainError);
}

TEST(Dispersion, MonotoneAndDerivativeMatchesFiniteDifference) {
    const auto d = fig1();
    double prev_b = 0.0, prev_l = 1e9;
    for (int i = 1; i <= 500; ++i) {
        const double y = 0.5 * i / 500;
        const double wb = dispersion(y, Branch::Beliaev, d).omega;
        const double wl = dispersion(y, Branch::Landau, d).omega;
        EXPECT_GT(wb, prev_b);
        EXPECT_LT(wl, prev_l);
        prev_b = wb;
        prev_l = wl;
    }
    const double h = 1e-6, y = 0.25;
    for (Branch br : {Branch::Landau, Branch::Beliaev}) {
        const double fd = (dispersion(y + h, br, d).omega - dispersion(y - h, br, d).omega) / (2 * h);
        const double an = dispersion(y, br, d).d_omega_dy;
        EXPECT_NEAR(fd / an, 1.0, 1e-6);
    }
}

TEST(Bogoliubov, ZeroInteraction) {
    PhysicalParams p;
    p.nU = 0.0;
    const auto d = validate_and_derive(p);
    for (double y : {1e-6, 0.1, 0.5}) {
        const auto f = bogoliubov_factors(y, d);
        EXPECT_EQ(f.phi1, 1.0);
        EXPECT_EQ(f.phi2, 0.0);
        EXPECT_EQ(f.theta1, 0.0);
        EXPECT_EQ(f.theta2, 0.0);
        EXPECT_DOUBLE_EQ(f.omega_c, y + d.omega_c0p);
    }
}

TEST(Bogoliubov, Fig1AnglesAndIdentities) {
    const auto d = fig1();
    const auto f = bogoliubov_factors(0.5, d);
    EXPECT_NEAR(f.alpha_b, 0.0841, 1e-4);
    EXPECT_NEAR(f.alpha_c, 0.0193, 1e-4);
    for (double y : {1e-12, 1e-8, 1e-4, 0.01, 0.3, 0.5}) {
        const auto g = bogoliubov_factors(y, d);
        EXPECT_NEAR(g.phi * g.phi - g.theta * g.theta, 1.0, 1e-10 * g.phi * g.phi);
        const double a = g.phi1 - g.phi2, b = g.theta1 - g.theta2;
        EXPECT_NEAR(a * a - b * b, 1.0, 1e-10);
        // the algebraic forms agree with cosh/sinh of the artanh angles; the
        // artanh route loses digits near the cusp, where its argument tends to 1
        if (y < 1e-6) continue;
        EXPECT_NEAR(g.phi, std::cosh(g.alpha_b + g.alpha_c), 1e-10 * g.phi);
        EXPECT_NEAR(g.theta, std::sinh(g.alpha_b + g.alpha_c), 1e-10 * g.phi);
        EXPECT_NEAR(g.d_omega_b, (y + d.nU()) / g.omega_b, 1e-12 * g.d_omega_b);
    }
    EXPECT_THROW(bogoliubov_factors(0.0, d), DomainError);
}

TEST(Bogoliubov, SmallInteractionLimit) {
    PhysicalParams p;
    p.nU = 1e-9;
    const auto d = validate_and_derive(p);
    const auto f = bogoliubov_factors(0.2, d);
    EXPECT_LT(f.theta, 1e-8);
    EXPECT_NEAR(f.omega_b, 0.2, 1e-8);
}
