#include "heun/heun_operators.hpp"

#include <cmath>
#include <numbers>

namespace heun {

namespace {

void check_a(cplx a) {
    if (std::abs(a - 1.0) < 1e-12 || std::abs(a + 1.0) < 1e-12)
        throw ParameterOutOfRange("a must differ from +1 and -1");
    if (std::abs(a) < 1e-12) throw ParameterOutOfRange("a must be nonzero");
}

void check_finite(double x, const char* what) {
    if (!std::isfinite(x)) throw NonFinite(what);
}

}  // namespace

HeunParams HeunParams::from_phase(Spin s, double phi, double r1, double r2, double r3) {
    check_finite(phi, "phi");
    check_finite(r1, "rho1");
    check_finite(r2, "rho2");
    check_finite(r3, "rho3");
    HeunParams p;
    p.spin = s;
    p.a = std::polar(1.0, phi);
    p.rho1 = r1;
    p.rho2 = r2;
    p.rho3 = r3;
    if (std::abs(std::sin(phi)) < 1e-12) throw ParameterOutOfRange("phi must not be a multiple of pi");
    return p;
}

HeunParams HeunParams::from_complex_a(Spin s, cplx a, double r1, double r2, double r3) {
    check_finite(r1, "rho1");
    check_finite(r2, "rho2");
    check_finite(r3, "rho3");
    check_a(a);
    HeunParams p;
    p.spin = s;
    p.a = a;
    p.rho1 = r1;
    p.rho2 = r2;
    p.rho3 = r3;
    p.expert = std::abs(std::abs(a) - 1.0) > 1e-14;
    return p;
}

cplx HeunParams::rho4() const {
    const cplx a2 = a * a;
    return 2.0 * kI * (a2 + 1.0) / (a2 - 1.0);
}

cplx HeunParams::rho5_derived() const {
    const cplx a2 = a * a;
    return rho1 * rho2 / 2.0 + kI * rho2 * rho2 * (1.0 + a2) / (2.0 * (1.0 - a2));
}

cplx HeunParams::rho5() const { return rho5_override ? cplx(*rho5_override) : rho5_derived(); }

HeunParams HeunParams::with_rho5(double r5) const {
    HeunParams p = *this;
    p.rho5_override = r5;
    return p;
}

HeunParams HeunParams::with_rho(double r1, double r2, double r3) const {
    HeunParams p = *this;
    p.rho1 = r1;
    p.rho2 = r2;
    p.rho3 = r3;
    return p;
}

std::string to_string(Method m) {
    switch (m) {
        case Method::oracle: return "oracle";
        case Method::bethe: return "bethe";
        case Method::bargmann: return "bargmann";
    }
    return "unknown";
}

CMatrix build_w_general(cplx r1, cplx r2, cplx r3, cplx r4, cplx r5, const SpinRep& rep) {
    const std::size_t d = rep.spin.dim();
    return r1 * rep.j1 + r2 * rep.j2 + r3 * rep.j3 + anticommutator(rep.j1, rep.j2) + r4 * (rep.j1 * rep.j1) +
           r5 * CMatrix::identity(d);
}

CMatrix build_w(const HeunParams& p, const SpinRep& rep) {
    if (!(p.spin == rep.spin))
        throw SpinMismatch("params two_s=" + std::to_string(p.spin.two_s) +
                           ", rep two_s=" + std::to_string(rep.spin.two_s));
    return build_w_general(p.rho1, p.rho2, p.rho3, p.rho4(), p.rho5(), rep);
}

CMatrix build_w_bilinear(double alpha, double beta, const std::array<double, 5>& r, const SpinRep& rep) {
    if (alpha == 0.0 && beta == 0.0) throw DegenerateX("alpha = beta = 0 gives X = 0");
    const CMatrix x = alpha * rep.j1 + cplx(beta) * rep.j2;
    const CMatrix& y = rep.j1;
    return r[0] * commutator(x, y) + r[1] * anticommutator(x, y) + r[2] * x + r[3] * y +
           r[4] * CMatrix::identity(rep.spin.dim());
}

BilinearTranslation translate_bilinear(double alpha, double beta, const std::array<double, 5>& r) {
    if (alpha == 0.0 && beta == 0.0) throw DegenerateX("alpha = beta = 0 gives X = 0");
    if (beta == 0.0 || r[1] == 0.0)
        throw InvalidArgument("translation to the rho form needs beta != 0 and r2 != 0");
    BilinearTranslation t;
    t.phi = std::atan2(beta, alpha);
    if (t.phi < 0) t.phi += std::numbers::pi;  // cot is pi-periodic
    t.scale = r[1] * beta;
    t.rho1 = (r[2] * alpha + r[3]) / t.scale;
    t.rho2 = r[2] / r[1];
    t.rho3 = -kI * r[0] / r[1];
    t.shift = r[4];
    return t;
}

double e_inhomogeneity(double r) {
    if (!(r > 0.0)) throw ParameterOutOfRange("r must be positive");
    const double q = std::sqrt(r);
    return (1.0 - q) / (1.0 + q);
}

CMatrix build_e(Spin s, double r, const SpinRep& rep) {
    if (!(r > 0.0)) throw ParameterOutOfRange("r must be positive");
    if (!(s == rep.spin)) throw SpinMismatch("build_e");
    return 4.0 * (rep.j1 * rep.j1 + r * (rep.j2 * rep.j2));
}

CMatrix build_t_kraw(Spin s, double theta, int K, int ell, const SpinRep& rep) {
    if (K < 0 || K > s.two_s) throw IndexOutOfRange("K must lie in [0, 2s]");
    if (ell < 0 || ell > s.two_s) throw IndexOutOfRange("ell must lie in [0, 2s]");
    if (!(s == rep.spin)) throw SpinMismatch("build_t_kraw");
    const double mu = s.two_s - 2.0 * K - 1.0;
    const double nu = 2.0 * ell + 1.0 - s.two_s;
    const CMatrix h = std::cos(2 * theta) * rep.j3 + cplx(std::sin(2 * theta)) * rep.j1;
    return anticommutator(h, rep.j3) + mu * rep.j3 + nu * h;
}

Spectrum oracle_spectrum(const CMatrix& m, double hermitian_tol) {
    Spectrum sp;
    sp.eigenvalues = hermitian_eigen(m, hermitian_tol).values;
    sp.method = Method::oracle;
    return sp;
}

}  // namespace heun
