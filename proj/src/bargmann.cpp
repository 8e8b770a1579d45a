#include "heun/bargmann.hpp"

#include <algorithm>
#include <cmath>

namespace heun {

namespace {

void require_phase(const HeunParams& p) {
    if (std::abs(std::abs(p.a) - 1.0) > 1e-12) throw InvalidArgument("the Bargmann realization needs |a| = 1");
    if (std::abs(p.a - 1.0) < 1e-12 || std::abs(p.a + 1.0) < 1e-12) throw InvalidArgument("a = +-1 is excluded");
}

// log sqrt(k! (2s-k)!)
double log_weight(int k, int two_s) { return 0.5 * (std::lgamma(k + 1.0) + std::lgamma(two_s - k + 1.0)); }

}  // namespace

BargmannMatrix bargmann_matrix(const HeunParams& p) {
    require_phase(p);
    const int d = static_cast<int>(p.spin.dim());
    const double s = p.spin.s();
    const cplx a = p.a, a2 = a * a;
    const cplx r4 = p.rho4(), r5 = p.rho5();
    const cplx f = kI / (a2 - 1.0);
    CMatrix img(static_cast<std::size_t>(d) + 2, static_cast<std::size_t>(d));
    auto at = [&](int row, int col) -> cplx& { return img(static_cast<std::size_t>(row), static_cast<std::size_t>(col)); };
    for (int k = 0; k < d; ++k) {
        const double dk = k, kk = dk * (dk - 1.0);
        if (k >= 2) {
            at(k + 2, k) += f * a2 * kk;
            at(k, k) += -f * (a2 + 1.0) * kk;
            at(k - 2, k) += f * kk;
        }
        if (k >= 1) {
            at(k + 2, k) += (1.0 - 2.0 * s) / 2.0 * (r4 + 2.0 * kI) * dk;
            at(k, k) += -(1.0 - 2.0 * s) / 2.0 * r4 * dk;
            at(k + 1, k) += -(p.rho1 + kI * p.rho2) / 2.0 * dk;
            at(k, k) += -p.rho3 * dk;
            at(k - 1, k) += (p.rho1 - kI * p.rho2) / 2.0 * dk;
        }
        at(k + 2, k) += s * s * r4 + 2.0 * kI * s * s - s * r4 / 2.0 - kI * s;
        at(k + 1, k) += s * (p.rho1 + kI * p.rho2);
        at(k, k) += s * p.rho3 + s * r4 / 2.0 + r5;
    }
    BargmannMatrix out{img.block(0, 0, static_cast<std::size_t>(d), static_cast<std::size_t>(d)), img, 0.0};
    for (int r = d; r < d + 2; ++r)
        for (int c = 0; c < d; ++c) out.degree_defect = std::max(out.degree_defect, std::abs(at(r, c)));
    return out;
}

BargmannEigen bargmann_eigen(const HeunParams& p, double hermitian_tol) {
    const BargmannMatrix bm = bargmann_matrix(p);
    const int two_s = p.spin.two_s;
    const std::size_t d = p.spin.dim();
    CMatrix h(d, d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
            h(i, j) = bm.m(i, j) * std::exp(log_weight(static_cast<int>(i), two_s) - log_weight(static_cast<int>(j), two_s));
    const EigenResult er = hermitian_eigen(h, hermitian_tol);
    BargmannEigen out;
    out.spectrum.eigenvalues = er.values;
    out.spectrum.method = Method::bargmann;
    for (std::size_t k = 0; k < d; ++k) {
        CVector v = er.vectors.column(k);
        for (std::size_t i = 0; i < d; ++i) v[i] *= std::exp(-log_weight(static_cast<int>(i), two_s));
        out.monomial_vectors.push_back(v);
    }
    return out;
}

Spectrum bargmann_spectrum(const HeunParams& p, double hermitian_tol) { return bargmann_eigen(p, hermitian_tol).spectrum; }

namespace {

struct ReducedCoeffs {
    double s, sigma;
    cplx b, e0, e1, e2, E, F, kappa;

    cplx diag(int n) const {
        const double t = n + sigma;
        return -(t * (t - 1.0) * (1.0 + b) + t * F);
    }
    cplx up(int n) const { return b * (n + 1.0 + sigma) * (n + sigma + e0); }
    cplx low(int n) const {
        const double t = n - 1.0 + sigma;
        return t * (t - 1.0) + t * E + kappa;
    }
};

ReducedCoeffs reduced_coeffs(const HeunParams& p, double sigma) {
    ReducedCoeffs rc;
    rc.s = p.spin.s();
    rc.sigma = sigma;
    rc.b = p.a * p.a;
    rc.e0 = 0.5;
    rc.e1 = (1.0 - 2.0 * rc.s - kI * p.rho3) / 2.0;
    rc.e2 = (1.0 - 2.0 * rc.s + kI * p.rho3) / 2.0;
    rc.kappa = (2.0 * rc.s - 1.0) * rc.s / 2.0;
    rc.E = rc.e0 + rc.e1 + rc.e2;
    rc.F = rc.e0 * (1.0 + rc.b) + rc.e1 * rc.b + rc.e2;
    return rc;
}

// numerator of the potential term and the sum of its term magnitudes
std::pair<cplx, double> potential_numerator(const HeunParams& p, cplx w, cplx y) {
    const double s = p.spin.s();
    const cplx b = p.a * p.a;
    const cplx shift = p.rho5() - p.rho5_derived();
    const cplx terms[] = {2.0 * (2.0 * s - 1.0) * s * y, kI * s * p.rho3 * (1.0 - b), s * (b + 1.0),
                          -kI * (w - shift) * (1.0 - b)};
    cplx sum = 0.0;
    double mag = 0.0;
    for (const cplx t : terms) {
        sum += t;
        mag += std::abs(t);
    }
    return {sum, mag};
}

double y_residual(const HeunParams& p, const ReducedCoeffs& rc, cplx w, const CPolynomial& P, cplx y) {
    const CPolynomial P1 = P.derivative(), P2 = P1.derivative();
    const double sg = rc.sigma;
    const cplx ys = std::pow(y, sg);
    const cplx psi = ys * P(y);
    const cplx d1 = sg * ys / y * P(y) + ys * P1(y);
    const cplx d2 = sg * (sg - 1.0) * ys / (y * y) * P(y) + 2.0 * sg * ys / y * P1(y) + ys * P2(y);
    const cplx t1 = d2;
    const cplx t2 = (rc.e0 / y + rc.e1 / (y - 1.0) + rc.e2 / (y - rc.b)) * d1;
    const auto [num, mag] = potential_numerator(p, w, y);
    const cplx pre = psi / (4.0 * y * (y - 1.0) * (y - rc.b));
    const cplx t3 = num * pre;
    const double size = std::abs(t1) + std::abs(t2) + mag * std::abs(pre);
    return size == 0.0 ? 0.0 : std::abs(t1 + t2 + t3) / size;
}

const std::array<cplx, 4> kSamples = {cplx(0.3, 0.2), cplx(1.7, -0.4), cplx(-0.6, 0.9), cplx(0.8, 1.3)};

}  // namespace

ReducedHeun heun_ode_reduction(const HeunParams& p) {
    if (p.rho1 != 0.0 || p.rho2 != 0.0) throw NotReduced("the reduction needs rho1 = rho2 = 0");
    require_phase(p);
    const double s = p.spin.s();
    const cplx b = p.a * p.a;
    ReducedHeun out;
    out.singularities = {0.0, 1.0, b};
    const ReducedCoeffs base = reduced_coeffs(p, 0.0);
    out.exponents = {base.e0, base.e1, base.e2};
    out.kappa = base.kappa;
    const cplx shift = p.rho5() - p.rho5_derived();

    for (double sigma : {0.0, 0.5}) {
        // polynomial degree J from J + sigma in {s, s - 1/2}
        const double top = std::abs(std::fmod(s - sigma, 1.0)) < 1e-12 ? s : s - 0.5;
        const int J = static_cast<int>(std::lround(top - sigma));
        if (J < 0) continue;
        const ReducedCoeffs rc = reduced_coeffs(p, sigma);
        // det(T - q) through the continuant
        CPolynomial prev({1.0}), cur({rc.diag(0), -1.0});
        for (int n = 1; n <= J; ++n) {
            const CPolynomial next = CPolynomial({rc.diag(n), -1.0}) * cur - (rc.low(n) * rc.up(n - 1)) * prev;
            prev = cur;
            cur = next;
        }
        const CVector qs = J == 0 ? CVector{rc.diag(0)} : poly_roots(cur);
        for (const cplx q : qs) {
            ReducedSolution sol;
            sol.sigma = sigma;
            sol.q = q;
            sol.w = (4.0 * q + kI * s * p.rho3 * (1.0 - b) + s * (b + 1.0)) / (kI * (1.0 - b)) + shift;
            sol.p.assign(static_cast<std::size_t>(J) + 1, 0.0);
            sol.p[0] = 1.0;
            for (int n = 0; n < J; ++n) {
                const auto i = static_cast<std::size_t>(n);
                const cplx lowterm = n > 0 ? rc.low(n) * sol.p[i - 1] : cplx(0.0);
                sol.p[i + 1] = ((q - rc.diag(n)) * sol.p[i] - lowterm) / rc.up(n);
            }
            const CPolynomial P(sol.p);
            for (const cplx y : kSamples) sol.ode_residual = std::max(sol.ode_residual, y_residual(p, rc, sol.w, P, y));
            out.solutions.push_back(sol);
        }
    }
    std::sort(out.solutions.begin(), out.solutions.end(),
              [](const ReducedSolution& x, const ReducedSolution& y) { return x.w.real() < y.w.real(); });
    return out;
}

double reduced_ode_residual(const HeunParams& p, cplx w, const CVector& phi, cplx z) {
    const CPolynomial P(phi), P1 = P.derivative(), P2 = P1.derivative();
    const cplx a2 = p.a * p.a;
    const cplx y = a2 * z * z;
    const cplx dz = 1.0 / (2.0 * a2 * z), d2z = -1.0 / (4.0 * a2 * a2 * z * z * z);
    const cplx psi = P(z), p1 = P1(z) * dz, p2 = P2(z) * dz * dz + P1(z) * d2z;
    const ReducedCoeffs rc = reduced_coeffs(p, 0.0);
    const cplx t2 = (rc.e0 / y + rc.e1 / (y - 1.0) + rc.e2 / (y - a2)) * p1;
    const auto [num, mag] = potential_numerator(p, w, y);
    const cplx pre = psi / (4.0 * y * (y - 1.0) * (y - a2));
    const cplx t3 = num * pre;
    const double size = std::abs(p2) + std::abs(t2) + mag * std::abs(pre);
    return size == 0.0 ? 0.0 : std::abs(p2 + t2 + t3) / size;
}

}  // namespace heun
