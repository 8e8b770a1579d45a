#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "heun/gaudin.hpp"
#include "heun/krawtchouk_chain.hpp"

using namespace heun;

TEST_CASE("Krawtchouk polynomials") {
    for (int x = 0; x <= 6; ++x) {
        CHECK(krawtchouk_poly(0, x, 0.3, 6) == doctest::Approx(1.0));
        CHECK(krawtchouk_poly(1, x, 0.3, 6) == doctest::Approx(1.0 - x / (0.3 * 6)).epsilon(1e-14));
    }
    // duality K_n(x) = K_x(n)
    CHECK(krawtchouk_poly(2, 3, 0.4, 7) == doctest::Approx(krawtchouk_poly(3, 2, 0.4, 7)).epsilon(1e-13));
    CHECK_THROWS_AS(krawtchouk_poly(8, 1, 0.3, 7), ParameterOutOfRange);
    CHECK_THROWS_AS(krawtchouk_poly(1, 1, 1.3, 7), ParameterOutOfRange);
}

TEST_CASE("overlap matrix diagonalizes the Hamiltonian") {
    for (int two_s : {2, 5, 10, 20})
        for (double theta : {0.17, 0.6, 1.35}) {
            CAPTURE(two_s);
            CAPTURE(theta);
            const ChainSpec spec(Spin(two_s), theta, 0, 0);
            const auto rep = build_spin_rep(spec.spin);
            const CMatrix u = overlap_matrix(spec.spin, spec.theta);
            CHECK(max_abs_diff(u.adjoint() * u, CMatrix::identity(spec.spin.dim())) < 1e-9);
            std::vector<cplx> omega;
            for (int k = 0; k <= two_s; ++k) omega.push_back(k - two_s / 2.0);
            CHECK(max_abs_diff(hamiltonian(spec, rep) * u, u * CMatrix::diagonal(omega)) < 1e-9);
        }
}

TEST_CASE("Hamiltonian") {
    const ChainSpec spec(Spin(7), 0.45, 2, 3);
    const auto rep = build_spin_rep(spec.spin);
    const CMatrix h = hamiltonian(spec, rep);
    const auto ev = hermitian_eigen(h).values;
    for (int k = 0; k <= 7; ++k) CHECK(std::abs(ev[static_cast<std::size_t>(k)] - (k - 3.5)) < 1e-10);
    const double s = 3.5;
    for (int n = 0; n < 7; ++n)
        CHECK(std::abs(std::abs(h(static_cast<std::size_t>(n), static_cast<std::size_t>(n) + 1)) -
                       std::sin(0.9) / 2 * std::sqrt((n + 1.0) * (2 * s - n))) < 1e-14);
    CHECK(max_abs_diff(hamiltonian(ChainSpec(Spin(3), 0.0, 0, 0), build_spin_rep(Spin(3))), build_spin_rep(Spin(3)).j3) == 0.0);
}

TEST_CASE("correlation matrix") {
    const ChainSpec spec(Spin(8), 0.7, 3, 4);
    const auto cm = correlation(spec);
    CHECK(max_abs_diff(cm.full * cm.full, cm.full) < 1e-10);
    CHECK(std::abs(cm.full.trace() - 4.0) < 1e-10);
    CHECK(hermitian_defect(cm.chopped) < 1e-14);
    CHECK(max_abs_diff(correlation_krawtchouk_sum(spec), cm.full) < 1e-9);
    const auto all = correlation(ChainSpec(Spin(6), 0.7, 6, 2));
    CHECK(max_abs_diff(all.full, CMatrix::identity(7)) < 1e-12);
    CHECK_THROWS_AS(ChainSpec(Spin(6), 0.7, 7, 2), IndexOutOfRange);
    CHECK_THROWS_AS(ChainSpec(Spin(6), 0.7, 2, -1), IndexOutOfRange);
}

TEST_CASE("T commutes with the chopped correlation matrix") {
    const ChainSpec spec(Spin(10), 0.6, 4, 3);
    const auto rep = build_spin_rep(spec.spin);
    const CMatrix t = commuting_t(spec, rep);
    CHECK(hermitian_defect(t) < 1e-14);
    double offband = 0;
    for (std::size_t i = 0; i < t.rows(); ++i)
        for (std::size_t j = 0; j < t.cols(); ++j)
            if (i > j + 1 || j > i + 1) offband = std::max(offband, std::abs(t(i, j)));
    CHECK(offband < 1e-12);
    const CMatrix tr = t.block(0, 0, 4, 4);
    CHECK(commutator(tr, correlation(spec).chopped).max_abs() < 1e-10);
}

TEST_CASE("T is the Heun operator up to scale and shift") {
    for (int two_s : {3, 6, 10}) {
        const ChainSpec spec(Spin(two_s), 0.55, 1, 2);
        const auto rep = build_spin_rep(spec.spin);
        const HeunParams p = chain_heun_params(spec);
        CHECK(std::abs(p.rho5() - spec.mu() * spec.nu() / (2.0 * std::sin(1.1))) < 1e-12);
        const CMatrix w = build_w(p, rep);
        const CMatrix lhs = std::sin(1.1) * (w - p.rho5() * CMatrix::identity(spec.spin.dim()));
        CHECK(max_sorted_gap(hermitian_eigen(lhs).values, hermitian_eigen(commuting_t(spec, rep)).values) < 1e-10);
    }
}

TEST_CASE("P(T) reconstruction") {
    const ChainSpec spec(Spin(10), 0.6, 4, 3);
    const auto pt = spectrum_via_pt(spec);
    CHECK_FALSE(pt.fallback);
    CHECK(pt.reconstruction < 1e-8);
    CHECK(max_sorted_gap(pt.c_eigenvalues, hermitian_eigen(correlation(spec).chopped).values) < 1e-8);

    // the monomial coefficients reproduce C as well
    const auto rep = build_spin_rep(spec.spin);
    const CMatrix tr = commuting_t(spec, rep).block(0, 0, 4, 4);
    CMatrix acc(4, 4), pw = CMatrix::identity(4);
    for (const auto& a : pt.coefficients) {
        acc += a * pw;
        pw = pw * tr;
    }
    CHECK(max_abs_diff(acc, correlation(spec).chopped) < 1e-8);

    const auto single = spectrum_via_pt(ChainSpec(Spin(6), 0.8, 2, 0));
    REQUIRE(single.coefficients.size() == 1);
    CHECK(std::abs(single.coefficients[0] - correlation(ChainSpec(Spin(6), 0.8, 2, 0)).chopped(0, 0)) < 1e-15);
}

TEST_CASE("entanglement entropy") {
    const ChainSpec spec(Spin(10), 0.6, 4, 3);
    const auto e = entanglement_entropy(spec);
    CHECK(e.value > 0.0);
    CHECK(std::abs(e.value - e.complement) < 1e-8);
    // regression value from the chopped eigenvalues
    CHECK(e.value == doctest::Approx(entropy_from_eigenvalues(e.eigenvalues)));
    CHECK(std::abs(entanglement_entropy(ChainSpec(Spin(10), 0.6, 4, 10)).value) < 1e-8);
    CHECK(std::abs(entanglement_entropy(ChainSpec(Spin(10), 0.6, 10, 3)).value) < 1e-8);
    CHECK(entropy_from_eigenvalues({0.5}) == doctest::Approx(std::log(2.0)));
    CHECK(entropy_from_eigenvalues({-1e-12, 1.0 + 1e-12}) == 0.0);
    CHECK_THROWS_AS(entropy_from_eigenvalues({1.1}), SpectrumOutOfRange);
}

TEST_CASE("T spectrum through the Bethe equations") {
    const ChainSpec spec(Spin(6), 0.5, 2, 2);
    const auto rep = build_spin_rep(spec.spin);
    const auto oracle = hermitian_eigen(commuting_t(spec, rep).block(0, 0, 3, 3)).values;
    const auto tb = t_spectrum_via_bethe(spec);
    REQUIRE(tb.values.size() == 3);
    std::vector<double> t;
    for (const auto& v : tb.values) {
        t.push_back(v.t);
        if (v.beq_residual >= 0) CHECK(v.beq_residual < 1e-7);
    }
    CHECK(max_sorted_gap(t, oracle) < 1e-7);

    const ChainSpec zero(Spin(5), 0.4, 1, 0);
    const auto tz = t_spectrum_via_bethe(zero);
    REQUIRE(tz.values.size() == 1);
    CHECK(std::abs(tz.values[0].t - commuting_t(zero, build_spin_rep(zero.spin))(0, 0).real()) < 1e-12);
}

TEST_CASE("T spectrum through the Bethe equations, s = 10 sweep") {
    for (int K : {0, 7, 20}) {
        for (int l = 0; l <= 20; l += 3) {
            CAPTURE(K);
            CAPTURE(l);
            const ChainSpec spec(Spin(20), 0.6, K, l);
            const auto n = static_cast<std::size_t>(l) + 1;
            const auto oracle = hermitian_eigen(commuting_t(spec, build_spin_rep(spec.spin)).block(0, 0, n, n)).values;
            std::vector<double> t;
            for (const auto& v : t_spectrum_via_bethe(spec).values) t.push_back(v.t);
            CHECK(max_sorted_gap(t, oracle) < 1e-7);
        }
    }
}
