#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "heun/heun_operators.hpp"

using namespace heun;

TEST_CASE("rho4 and rho5 from a unit phase are real") {
    for (double phi : {0.3, 0.7, std::numbers::pi / 2, 2.5}) {
        const auto p = HeunParams::from_phase(Spin(2), phi, 0.3, -0.7, 0.2);
        CHECK(std::abs(p.rho4().imag()) < 1e-12);
        CHECK(std::abs(p.rho5().imag()) < 1e-12);
        CHECK(std::abs(p.rho4().real() - 2.0 / std::tan(phi)) < 1e-14);
        const double cot = std::cos(phi) / std::sin(phi);
        CHECK(std::abs(p.rho5().real() - 0.5 * p.rho2 * (p.rho1 - p.rho2 * cot)) < 1e-14);
    }
}

TEST_CASE("phase must avoid a = +-1") {
    CHECK_THROWS_AS(HeunParams::from_phase(Spin(1), 0.0, 0, 0, 0), ParameterOutOfRange);
    CHECK_THROWS_AS(HeunParams::from_complex_a(Spin(1), -1.0, 0, 0, 0), ParameterOutOfRange);
}

TEST_CASE("spin 1/2 closed form") {
    const auto p = HeunParams::from_phase(Spin(1), 0.9, 0.4, -0.3, 0.8);
    const auto rep = build_spin_rep(p.spin);
    const CMatrix w = build_w(p, rep);
    CHECK(hermitian_defect(w) < 1e-12);
    const auto sp = oracle_spectrum(w);
    const double c = (p.rho4() / 4.0 + p.rho5()).real();
    const double r = 0.5 * std::sqrt(0.16 + 0.09 + 0.64);
    CHECK(std::abs(sp.eigenvalues[0] - (c - r)) < 1e-12);
    CHECK(std::abs(sp.eigenvalues[1] - (c + r)) < 1e-12);
}

TEST_CASE("pure quadratic part is Hermitian and invariant under the pi rotation about J3") {
    for (int two_s = 1; two_s <= 6; ++two_s) {
        const auto p = HeunParams::from_phase(Spin(two_s), 1.1, 0, 0, 0).with_rho5(0.0);
        const auto rep = build_spin_rep(p.spin);
        const CMatrix w = build_w(p, rep);
        CHECK(hermitian_defect(w) < 1e-12);
        CVector ph(rep.spin.dim());
        for (std::size_t k = 0; k < ph.size(); ++k) ph[k] = (k % 2 == 0) ? 1.0 : -1.0;
        const CMatrix u = CMatrix::diagonal(ph);
        CHECK(max_abs_diff(u * w * u, w) < 1e-14);
    }
}

TEST_CASE("spin 1 fixture") {
    const auto p = HeunParams::from_phase(Spin(2), 0.7, 0.3, -0.1, 0.5);
    const auto sp = oracle_spectrum(build_w(p, build_spin_rep(p.spin)));
    CHECK(std::abs(sp.eigenvalues[0] - -0.4784647429077803) < 1e-12);
    CHECK(std::abs(sp.eigenvalues[1] - 2.255804905355985) < 1e-12);
    CHECK(std::abs(sp.eigenvalues[2] - 2.9088185385766097) < 1e-12);
}

TEST_CASE("rho5 override shifts the spectrum") {
    const auto p = HeunParams::from_phase(Spin(3), 0.7, 0.3, -0.1, 0.5);
    const auto rep = build_spin_rep(p.spin);
    const auto a = oracle_spectrum(build_w(p, rep)).eigenvalues;
    const auto b = oracle_spectrum(build_w(p.with_rho5(p.rho5().real() + 1.25), rep)).eigenvalues;
    for (std::size_t k = 0; k < a.size(); ++k) CHECK(std::abs(b[k] - a[k] - 1.25) < 1e-12);
}

TEST_CASE("spin mismatch") {
    const auto p = HeunParams::from_phase(Spin(2), 0.7, 0, 0, 0);
    CHECK_THROWS_AS(build_w(p, build_spin_rep(Spin(3))), SpinMismatch);
}

TEST_CASE("bilinear form") {
    const auto rep = build_spin_rep(Spin(3));
    CHECK(max_abs_diff(build_w_bilinear(0.3, 0.2, {0, 0, 0, 0, 1}, rep), CMatrix::identity(4)) < 1e-15);
    const std::array<double, 5> r{0.4, 0.7, -0.2, 0.9, 0.3};
    const CMatrix collapsed = (2 * r[1]) * (rep.j1 * rep.j1) + (r[2] + r[3]) * rep.j1 + r[4] * CMatrix::identity(4);
    CHECK(max_abs_diff(build_w_bilinear(1.0, 0.0, r, rep), collapsed) < 1e-14);
    CHECK_THROWS_AS(build_w_bilinear(0.0, 0.0, r, rep), DegenerateX);

    for (auto [al, be] : {std::pair{0.6, 0.8}, std::pair{-1.3, 0.4}, std::pair{0.2, -0.9}}) {
        const auto t = translate_bilinear(al, be, r);
        const CMatrix rho_form = t.scale * build_w_general(t.rho1, t.rho2, t.rho3, 2.0 / std::tan(t.phi),
                                                           t.shift / t.scale, rep);
        CHECK(max_abs_diff(build_w_bilinear(al, be, r, rep), rho_form) < 1e-12);
    }
}

TEST_CASE("operator E") {
    const auto half = build_spin_rep(Spin(1));
    CHECK(max_abs_diff(build_e(Spin(1), 0.3, half), 1.3 * CMatrix::identity(2)) < 1e-14);

    for (int two_s = 1; two_s <= 6; ++two_s) {
        const auto rep = build_spin_rep(Spin(two_s));
        const double s = 0.5 * two_s;
        std::vector<double> expect;
        for (int k = 0; k <= two_s; ++k) expect.push_back(4 * (s * (s + 1) - (s - k) * (s - k)));
        CHECK(max_sorted_gap(oracle_spectrum(build_e(Spin(two_s), 1.0, rep)).eigenvalues, expect) < 1e-12);
    }

    // 3x3 case against the roots of its characteristic polynomial
    const auto rep = build_spin_rep(Spin(2));
    const CMatrix e = build_e(Spin(2), 0.5, rep);
    const cplx tr = e.trace();
    cplx minors = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j) minors += e(i, i) * e(j, j) - e(i, j) * e(j, i);
    const cplx det = e(0, 0) * (e(1, 1) * e(2, 2) - e(1, 2) * e(2, 1)) -
                     e(0, 1) * (e(1, 0) * e(2, 2) - e(1, 2) * e(2, 0)) +
                     e(0, 2) * (e(1, 0) * e(2, 1) - e(1, 1) * e(2, 0));
    const auto roots = poly_roots(CPolynomial({-det, minors, -tr, 1.0}));
    const auto sp = oracle_spectrum(e).eigenvalues;
    for (int k = 0; k < 3; ++k) CHECK(std::abs(roots[k] - sp[k]) < 1e-10);
    CHECK(std::abs(sp[0] - 2.0) < 1e-12);
    CHECK(std::abs(sp[1] - 4.0) < 1e-12);
    CHECK(std::abs(sp[2] - 6.0) < 1e-12);
}

TEST_CASE("Krawtchouk T operator") {
    const auto rep1 = build_spin_rep(Spin(1));
    const CMatrix t1 = build_t_kraw(Spin(1), 0.4, 0, 0, rep1);
    CHECK(hermitian_defect(t1) < 1e-14);

    const auto rep = build_spin_rep(Spin(7));
    const double th = std::numbers::pi / 4;
    const CMatrix t = build_t_kraw(Spin(7), th, 2, 3, rep);
    const double mu = 7 - 4 - 1, nu = 6 + 1 - 7;
    const CMatrix expect = anticommutator(rep.j1, rep.j3) + mu * rep.j3 + nu * rep.j1;
    CHECK(max_abs_diff(t, expect) < 1e-14);

    const CMatrix g = build_t_kraw(Spin(10), 0.6, 4, 3, build_spin_rep(Spin(10)));
    CHECK(hermitian_defect(g) < 1e-14);
    for (std::size_t i = 0; i < g.rows(); ++i)
        for (std::size_t j = 0; j < g.cols(); ++j)
            if (i + 1 < j || j + 1 < i) CHECK(std::abs(g(i, j)) < 1e-12);

    CHECK_THROWS_AS(build_t_kraw(Spin(2), 0.3, 3, 0, build_spin_rep(Spin(2))), IndexOutOfRange);
    CHECK_THROWS_AS(build_t_kraw(Spin(2), 0.3, 0, -1, build_spin_rep(Spin(2))), IndexOutOfRange);
}

TEST_CASE("oracle on a diagonal matrix") {
    const auto sp = oracle_spectrum(CMatrix::diagonal({3.0, 1.0, 2.0}));
    CHECK(sp.eigenvalues == std::vector<double>{1.0, 2.0, 3.0});
    CHECK(sp.method == Method::oracle);
}
