#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "heun/bethe_solver.hpp"

using namespace heun;

namespace {

std::vector<double> real_sorted(const std::vector<BetheSolution>& sols) {
    std::vector<double> v;
    for (const auto& s : sols) v.push_back(s.w.real());
    return sorted(v);
}

std::vector<double> oracle(const HeunParams& p) {
    return oracle_spectrum(build_w(p, build_spin_rep(p.spin))).eigenvalues;
}

}  // namespace

TEST_CASE("recurrence top identity holds for the inhomogeneous coefficients") {
    for (int two_s = 1; two_s <= 8; ++two_s) {
        const auto p = HeunParams::from_phase(Spin(two_s), 0.7 + 0.1 * two_s, 0.3, -0.2, 0.45);
        const HeunRecurrence rec(inhom_coeffs(p));
        CHECK(rec.top_identity_residual() < 1e-10 * (1.0 + rec.coeffs().inhom_strength));
    }
}

TEST_CASE("consistency polynomial from the recurrence matches the symbolic one") {
    const auto p = HeunParams::from_phase(Spin(4), 1.1, 0.3, -0.2, 0.45);
    const auto [co, cp] = inhom_char_poly(p);
    const HeunRecurrence rec(co);
    CHECK(cp.P.degree() == 5);
    for (cplx mu : {cplx(0.3, 0.1), cplx(-1.2, 0.4), cplx(2.0, -0.7)}) {
        const auto v = rec.evaluate(mu);
        CHECK(std::abs(v.P - cp.P(mu)) < 1e-10 * std::max(1.0, std::abs(v.P)));
        CHECK(std::abs(v.dP - cp.P.derivative()(mu)) < 1e-9 * std::max(1.0, std::abs(v.dP)));
    }
}

TEST_CASE("spin 1/2 reproduces the two-level spectrum") {
    const auto p = HeunParams::from_phase(Spin(1), 0.8, 0.4, 0.25, -0.3);
    const auto b = bethe_spectrum(p, "inhom");
    REQUIRE(b.solutions.size() == 2);
    CHECK(max_sorted_gap(b.spectrum.eigenvalues, oracle(p)) < 1e-9);
}

TEST_CASE("fixture spectrum at s = 1") {
    const auto p = HeunParams::from_phase(Spin(2), 0.7, 0.3, -0.1, 0.5);
    const std::vector<double> expect = {-0.4784647429077803, 2.255804905355985, 2.9088185385766097};
    const auto b = bethe_spectrum(p);
    CHECK(b.route == "inhom");
    CHECK(max_sorted_gap(b.spectrum.eigenvalues, expect) < 1e-9);
}

TEST_CASE("inhomogeneous completeness and cross-checks") {
    for (int two_s = 1; two_s <= 8; ++two_s) {
        CAPTURE(two_s);
        const auto p = HeunParams::from_phase(Spin(two_s), 0.5 + 0.2 * two_s, 0.3, -0.2, 0.45);
        SolveWarnings warn;
        const auto sols = inhom_solve(p, &warn);
        REQUIRE(sols.size() == p.spin.dim());
        const auto ref = oracle(p);
        const double scale = 1.0 + std::abs(ref.front()) + std::abs(ref.back());
        CHECK(max_sorted_gap(real_sorted(sols), ref) < 1e-8 * scale);
        for (const auto& s : sols) {
            CHECK(std::abs(s.w - s.w_closed) < 1e-8 * scale);
            CHECK(std::abs(s.w - s.w_mu_form) < 1e-8 * scale);
            CHECK(std::abs(s.w.imag()) < 1e-8 * scale);
            CHECK(s.residuals.bethe_eq < 1e-7);
            CHECK(s.residuals.heun_eq < 1e-8);
            CHECK(s.residuals.z_map < 1e-10);
        }
    }
}

TEST_CASE("variant forms disagree with the derived ones") {
    const auto p = HeunParams::from_phase(Spin(3), 0.9, 0.3, -0.2, 0.45);
    const auto sols = inhom_solve(p);
    double closed_alt = 0, mu_variant = 0, unfactored_eq = 0;
    for (const auto& s : sols) {
        closed_alt = std::max(closed_alt, std::abs(*s.w_closed_alt - s.w));
        mu_variant = std::max(mu_variant, std::abs(*s.w_mu_form_variant - s.w));
        unfactored_eq = std::max(unfactored_eq, s.residuals.unfactored_eq);
    }
    CHECK(closed_alt > 1e-3);
    CHECK(mu_variant > 1e-3);
    CHECK(unfactored_eq > 1e-3);
}

TEST_CASE("Bethe residual discriminates") {
    const auto p = HeunParams::from_phase(Spin(3), 0.9, 0.3, -0.2, 0.45);
    const auto sols = inhom_solve(p);
    CVector bogus = sols[0].z;
    bogus[0] *= cplx(1.05, 0.02);
    const auto r = bethe_residual(bogus, p, Regime::inhom);
    CHECK(*std::max_element(r.begin(), r.end()) > 1e-3);
    CVector clash = sols[0].z;
    clash[1] = clash[0];
    CHECK_THROWS_AS(bethe_residual(clash, p, Regime::inhom), SingularConfiguration);
}

TEST_CASE("ODE residual detects a wrong accessory parameter") {
    const auto p = HeunParams::from_phase(Spin(4), 1.0, 0.3, -0.2, 0.45);
    const HeunRecurrence rec(inhom_coeffs(p));
    const auto mus = rec.mu_roots();
    const auto c = rec.evaluate(mus[0]).c;
    CHECK(rec.ode_residual(c, mus[0], cplx(0.4, 0.7)) < 1e-11);
    CHECK(rec.ode_residual(c, mus[0] + 0.1, cplx(0.4, 0.7)) > 1e-4);
}

TEST_CASE("homogeneous condition and branch split, s = 3/2") {
    const auto p = HeunParams::from_phase(Spin(3), std::numbers::pi / 2, 0.0, 0.7, 0.0);
    const auto hc = homog_condition(p);
    REQUIRE(hc.M.has_value());
    CHECK(*hc.M == 1);
    const auto b = bethe_spectrum(p);
    CHECK(b.route == "homog");
    REQUIRE(b.solutions.size() == 4);
    CHECK(max_sorted_gap(b.spectrum.eigenvalues, oracle(p)) < 1e-8);
    int hi = 0, lo = 0;
    for (const auto& s : b.solutions) {
        (s.regime == Regime::homog_highest ? hi : lo)++;
        CHECK(std::abs(s.w - s.w_closed) < 1e-8);
        CHECK(std::abs(s.w - s.w_mu_form) < 1e-8);
        if (s.residuals.bethe_eq >= 0) CHECK(s.residuals.bethe_eq < 1e-7);
        CHECK(s.residuals.heun_eq < 1e-10);
    }
    CHECK(hi == 2);
    CHECK(lo == 2);
    CHECK(stabilization_product(p, 1) < 1e-10);
    CHECK(stabilization_product(p, 0) > 1e-3);
}

TEST_CASE("homogeneous branches at generic phase and several spins") {
    for (int two_s = 2; two_s <= 7; ++two_s) {
        for (int M = 0; M <= two_s - 1; ++M) {
            CAPTURE(two_s);
            CAPTURE(M);
            const double phi = 1.0, r1 = 0.35;
            const cplx a = std::polar(1.0, phi);
            // choose rho2 so that the condition holds with the given M
            const cplx x = kI * (a * a - 1.0) * r1 / (4.0 * a);
            const double r2 = ((M - (two_s / 2.0 - 0.5) - x) * 4.0 * a / (a * a + 1.0)).real();
            const auto p = HeunParams::from_phase(Spin(two_s), phi, r1, r2, 0.0);
            const auto hc = homog_condition(p);
            REQUIRE(hc.M.has_value());
            CHECK(*hc.M == M);
            const auto sols = homog_solve(p);
            const auto ref = oracle(p);
            const double scale = 1.0 + std::abs(ref.front()) + std::abs(ref.back());
            CHECK(max_sorted_gap(real_sorted(sols), ref) < 1e-7 * scale);
            for (const auto& s : sols) CHECK(std::abs(s.w - s.w_closed) < 1e-7 * scale);
            CHECK(stabilization_product(p, M) < 1e-9 * scale * scale);
        }
    }
}

TEST_CASE("auto branch falls back to the inhomogeneous route") {
    const auto p = HeunParams::from_phase(Spin(3), 0.9, 0.3, -0.2, 0.45);
    CHECK_FALSE(homog_condition(p).M.has_value());
    CHECK(bethe_spectrum(p).route == "inhom");
    CHECK_THROWS_AS(homog_solve(p), InvalidArgument);
    CHECK_THROWS_AS(bethe_spectrum(p, "bogus"), InvalidArgument);
}

TEST_CASE("Bethe vectors are eigenvectors") {
    const auto p = HeunParams::from_phase(Spin(3), std::numbers::pi / 2, 0.0, 0.7, 0.0);
    const auto rep = build_spin_rep(p.spin);
    const CMatrix w = build_w(p, rep);
    for (const auto& s : homog_solve(p)) {
        if (s.residuals.bethe_eq < 0) continue;
        const auto bv = bethe_vector(s.z, s.regime == Regime::homog_highest ? Weight::highest : Weight::lowest, p, rep);
        const CVector diff = axpy(-s.w, bv.coordinates, w * bv.coordinates);
        CHECK(norm(diff) < 1e-7 * norm(bv.coordinates) * (1.0 + std::abs(s.w)));
    }
}

TEST_CASE("E operator through the Bethe route") {
    for (int two_s = 1; two_s <= 6; ++two_s) {
        CAPTURE(two_s);
        for (double r : {0.2, 0.5, 0.8}) {
            const auto e = e_spectrum(Spin(two_s), r);
            const double scale = 1.0 + e.oracle.back();
            if (two_s % 2 == 0) {
                CHECK_FALSE(e.e1_regularized);
                CHECK(max_sorted_gap(e.e1, e.oracle) < 1e-8 * scale);
                CHECK(max_sorted_gap(e.e1_transfer, e.oracle) < 1e-8 * scale);
            } else {
                CHECK(e.e1_regularized);
                CHECK(max_sorted_gap(e.e1, e.oracle) < 1e-4 * scale);
                CHECK(max_sorted_gap(e.e2, e.oracle) < 1e-8 * scale);
            }
        }
    }
    const auto half = e_spectrum(Spin(1), 0.3);
    CHECK(std::abs(half.e2[0] - 1.3) < 1e-12);
    CHECK(std::abs(half.e2[1] - 1.3) < 1e-12);
    CHECK_THROWS_AS(e_spectrum(Spin(2), 1.0), ParameterOutOfRange);
    CHECK_THROWS_AS(e_spectrum(Spin(2), 0.0), ParameterOutOfRange);
}
