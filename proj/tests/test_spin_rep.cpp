#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "heun/spin_rep.hpp"

using namespace heun;

TEST_CASE("spin 1/2 matrices") {
    const auto rep = build_spin_rep(Spin(1));
    CHECK(max_abs_diff(rep.j1, CMatrix(2, 2, {0.0, 0.5, 0.5, 0.0})) < 1e-15);
    CHECK(max_abs_diff(rep.j2, CMatrix(2, 2, {0.0, cplx(0, -0.5), cplx(0, 0.5), 0.0})) < 1e-15);
    CHECK(max_abs_diff(rep.j3, CMatrix(2, 2, {0.5, 0.0, 0.0, -0.5})) < 1e-15);
}

TEST_CASE("spin 1 matrices") {
    const auto rep = build_spin_rep(Spin(2));
    const double r = 1.0 / std::sqrt(2.0);
    CHECK(max_abs_diff(rep.j3, CMatrix::diagonal({1.0, 0.0, -1.0})) < 1e-15);
    CHECK(max_abs_diff(rep.j1, CMatrix(3, 3, {0.0, r, 0.0, r, 0.0, r, 0.0, r, 0.0})) < 1e-15);
}

TEST_CASE("defining relations, Casimir and weights up to two_s = 40") {
    for (int two_s = 0; two_s <= 40; ++two_s) {
        const auto rep = build_spin_rep(Spin(two_s));
        const double s = 0.5 * two_s;
        CHECK(su2_relation_defect(rep.j1, rep.j2, rep.j3) < 1e-12);
        const CMatrix cas = rep.j1 * rep.j1 + rep.j2 * rep.j2 + rep.j3 * rep.j3;
        CHECK(max_abs_diff(cas, (s * (s + 1)) * CMatrix::identity(rep.spin.dim())) < 1e-12);
        CHECK(norm(rep.jplus * rep.highest) < 1e-14);
        CHECK(norm(rep.jminus * rep.lowest) < 1e-14);
        CHECK(norm(axpy(-s, rep.highest, rep.j3 * rep.highest)) < 1e-14);
        CHECK(norm(axpy(s, rep.lowest, rep.j3 * rep.lowest)) < 1e-14);
        CHECK(max_abs_diff(rep.jplus, rep.j1 + kI * rep.j2) < 1e-14);
        CHECK(max_abs_diff(rep.jminus, rep.j1 - kI * rep.j2) < 1e-14);
        CHECK(hermitian_defect(rep.j1) == 0.0);
        CHECK(hermitian_defect(rep.j2) == 0.0);
    }
}

TEST_CASE("negative spin rejected") { CHECK_THROWS_AS(Spin(-1), InvalidArgument); }
