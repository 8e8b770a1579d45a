#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "heun/gaudin.hpp"

using namespace heun;

namespace {
HeunParams params(int two_s) { return HeunParams::from_phase(Spin(two_s), 0.9, 0.3, -0.4, 0.6); }
}  // namespace

TEST_CASE("r-matrix") {
    CHECK(cybe_residual(0.3, cplx(1.7, 0.2), -0.8) < 1e-12);
    CHECK(std::abs(r_matrix(2.0, 3.0)(0, 3) - -0.4) < 1e-15);
    CHECK(r21_consistency_residual(cplx(0.4, 0.1), cplx(-1.2, 0.7)) < 1e-15);
    CHECK_THROWS_AS(r_matrix(0.5, 0.5), SpectralSingularity);
    CHECK_THROWS_AS(r_matrix(0.5, 2.0), SpectralSingularity);
    CHECK_THROWS_AS(r_matrix(0.0, 2.0), SpectralSingularity);
    CHECK_THROWS_AS(r_matrix(0.3, 0.0), SpectralSingularity);
}

TEST_CASE("K-matrix") {
    const auto p = params(2);
    const auto rep = build_spin_rep(p.spin);
    const auto k0 = k_matrix(0.0, p, rep);
    CHECK(k0.A.max_abs() < 1e-15);
    CHECK(k0.C.max_abs() < 1e-15);
    CHECK(k0.D.max_abs() < 1e-15);
    CHECK(max_abs_diff(k0.B, 4.0 * rep.j1) < 1e-14);
    CHECK(max_abs_diff(k_matrix(1e-8, p, rep).full(), k0.full()) < 1e-6);
    CHECK(std::abs(k_matrix(cplx(0.3, 0.8), p, rep).full().trace()) < 1e-14);
    CHECK(reflection_residual_k(cplx(0.4, 0.3), cplx(-1.3, 0.5), p, rep) < 1e-10);
    CHECK_THROWS_AS(k_matrix(p.a, p, rep), SpectralSingularity);
}

TEST_CASE("magnetic-field matrix") {
    const auto zero = HeunParams::from_phase(Spin(1), 0.9, 0, 0, 0);
    CHECK(c_matrix(cplx(0.3, 0.2), zero).max_abs() == 0.0);
    const auto p = params(1);
    const auto rep = build_spin_rep(Spin(1));
    const CMatrix expect = (2 * p.rho2) * rep.j1 + (2.0 * kI * p.rho2) * rep.j2 + (2.0 * kI * p.rho3) * rep.j3 +
                           p.rho3 * CMatrix::identity(2);
    CHECK(max_abs_diff(c_matrix(0.0, p), expect) < 1e-15);
    CHECK(std::abs(c_matrix(0.0, p)(1, 0)) < 1e-15);
    CHECK(reflection_residual_c(cplx(0.4, 0.3), cplx(-1.3, 0.5), p) < 1e-12);
    CHECK_THROWS_AS(c_matrix(1.0, p), SpectralSingularity);
}

TEST_CASE("transfer matrix") {
    for (int two_s = 1; two_s <= 4; ++two_s) {
        const auto p = params(two_s);
        const auto rep = build_spin_rep(p.spin);
        CHECK(transfer(0.0, p, rep).max_abs() < 1e-12);
        CHECK(commutator(transfer(cplx(0.4, 0.3), p, rep), transfer(cplx(-1.3, 0.5), p, rep)).max_abs() < 1e-10);
        CHECK(max_abs_diff(heun_from_transfer(p, rep), build_w(p, rep)) < 1e-8);
        CHECK(gauge_transfer_defect(cplx(0.7, -0.2), p, rep) < 1e-11);
    }
}

TEST_CASE("gauge blocks on weight vectors, s = 3/2") {
    const auto p = params(3);
    const auto rep = build_spin_rep(p.spin);
    const RepScalars sc(p);
    const auto wv = weight_vectors(p, rep);
    for (cplx u : {cplx(0.4, 0.3), cplx(-1.7, 0.2), cplx(2.1, -0.9)}) {
        const auto g = gauge_blocks(u, p, rep);
        CHECK(norm(axpy(-sc.alpha(u), wv.highest, g.A * wv.highest)) < 1e-10);
        CHECK(norm(axpy(-sc.delta(u), wv.highest, g.D * wv.highest)) < 1e-10);
        CHECK(std::abs(sc.alpha(u) + sc.delta(u) - 2.0 * p.rho3) < 1e-14);
        for (int n = 0; n <= 4; ++n) {
            CHECK(norm(axpy(-u * sc.gamma(n), wv.highest, shifted_c(u, n, p, rep) * wv.highest)) < 1e-10);
            CHECK(norm(axpy(-sc.beta(n) / u, wv.lowest, shifted_b(u, n, p, rep) * wv.lowest)) < 1e-10);
        }
    }
    // gamma and beta are linear in n
    CHECK(std::abs(sc.gamma(3) - 2.0 * sc.gamma(2) + sc.gamma(1)) < 1e-14);
    CHECK(std::abs(sc.beta(3) - 2.0 * sc.beta(2) + sc.beta(1)) < 1e-14);
}

TEST_CASE("derivatives of alpha") {
    const RepScalars sc(params(3));
    const cplx u(0.4, 0.3);
    const double h = 1e-5;
    const cplx fd = (sc.alpha(u + h) - sc.alpha(u - h)) / (2 * h);
    CHECK(std::abs(sc.alpha(Dual::var(u)).d - fd) < 1e-8);
    CHECK(std::abs(sc.alpha(Dual::var(u)).v - sc.alpha(u)) < 1e-15);
}

TEST_CASE("tilde generator diagnostics") {
    const auto p = params(3);
    const auto rep = build_spin_rep(p.spin);
    const auto d = naive_tilde_diagnostic(p, rep);
    CHECK(d.j3_nilpotency < 1e-10);   // naive J3~ is nilpotent
    CHECK(d.su2_defect > 1e-3);       // so the naive triple is not an su(2) triple
    CHECK(d.derived_eigen_defect < 1e-10);
}

TEST_CASE("Bethe vectors") {
    const auto p = params(2);
    const auto rep = build_spin_rep(p.spin);
    const auto wv = weight_vectors(p, rep);
    const auto v0 = bethe_vector({}, Weight::highest, p, rep);
    CHECK(norm(axpy(-1.0, wv.highest, v0.coordinates)) < 1e-15);
    const auto l0 = bethe_vector({}, Weight::lowest, p, rep);
    CHECK(norm(axpy(-1.0, wv.lowest, l0.coordinates)) < 1e-15);

    const cplx z1(0.4, 0.7), z2(-1.1, 0.3);
    for (Weight w : {Weight::highest, Weight::lowest}) {
        const auto a = bethe_vector({z1, z2}, w, p, rep).coordinates;
        const auto b = bethe_vector({z2, z1}, w, p, rep).coordinates;
        CHECK(norm(axpy(-1.0, a, b)) < 1e-9 * norm(a));
    }
    CHECK_THROWS_AS(bethe_vector({z1, z2, z1}, Weight::highest, p, rep), InvalidArgument);
}

TEST_CASE("structure report") {
    for (int two_s = 1; two_s <= 3; ++two_s) {
        const auto r = verify_structure(params(two_s), 42, 30);
        for (const auto& row : r.rows) {
            INFO(row.name << " " << row.residual);
            CHECK(row.passed());
        }
        CHECK(r.weight_vector_choice == "tilde_j3_eigenvector");
    }
}
