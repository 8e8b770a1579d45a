#include "heun/bethe_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace heun {

namespace {

constexpr double kSingularGuard = 1e-10;

struct Shifts {
    cplx x, y0, y1;  // i(a^2-1)rho1/(4a), (a-1)^2 rho2/(4a), (a+1)^2 rho2/(4a)
};

Shifts shifts(const HeunParams& p) {
    const cplx a = p.a;
    return {kI * (a * a - 1.0) * p.rho1 / (4.0 * a), (a - 1.0) * (a - 1.0) * p.rho2 / (4.0 * a),
            (a + 1.0) * (a + 1.0) * p.rho2 / (4.0 * a)};
}

cplx rho5_shift(const HeunParams& p) { return p.rho5() - p.rho5_derived(); }

cplx z_from_Z(cplx Z) {
    // z^2 + (4Z - 2) z + 1 = 0; keep the root with |z| >= 1
    const cplx b = 4.0 * Z - 2.0;
    const cplx disc = std::sqrt(b * b - 4.0);
    cplx z1 = (-b + disc) / 2.0, z2 = (-b - disc) / 2.0;
    return std::abs(z1) >= std::abs(z2) ? z1 : z2;
}

CVector inverted(const CVector& z) {
    CVector r(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) r[i] = 1.0 / z[i];
    return r;
}

double max_or_zero(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, x);
    return m;
}

void check_configuration(const CVector& z, const HeunParams& p) {
    const cplx a = p.a;
    for (std::size_t k = 0; k < z.size(); ++k) {
        const cplx zk = z[k];
        if (std::abs(zk) < kSingularGuard || std::abs(zk * zk - 1.0) < kSingularGuard ||
            std::abs(zk - a) < kSingularGuard || std::abs(a * zk - 1.0) < kSingularGuard)
            throw SingularConfiguration("root " + std::to_string(k) + " sits on a singular point");
        for (std::size_t q = k + 1; q < z.size(); ++q)
            if (std::abs(zk - z[q]) < kSingularGuard || std::abs(zk * z[q] - 1.0) < kSingularGuard)
                throw SingularConfiguration("roots " + std::to_string(k) + " and " + std::to_string(q) +
                                            " coincide up to inversion");
    }
}

// sum over p != k of z_p (z_k^2 - 1) / ((z_k - z_p)(z_k z_p - 1))
cplx pair_sum(const CVector& z, std::size_t k) {
    cplx s = 0.0;
    for (std::size_t q = 0; q < z.size(); ++q)
        if (q != k) s += z[q] * (z[k] * z[k] - 1.0) / ((z[k] - z[q]) * (z[k] * z[q] - 1.0));
    return s;
}

std::vector<double> inhom_residual_impl(const CVector& z, const HeunParams& p, bool corrected) {
    check_configuration(z, p);
    const RepScalars sc(p);
    const cplx a = p.a;
    const double G = std::norm(sc.gamma(p.spin.two_s + 1));
    std::vector<double> out;
    for (std::size_t k = 0; k < z.size(); ++k) {
        const cplx zk = z[k];
        const cplx lhs = (sc.alpha(zk) - sc.delta(zk)) / 4.0 + (zk * zk + 1.0) / (zk * zk - 1.0) + pair_sum(z, k);
        const cplx f = (zk - a) * (a * zk - 1.0) / a;
        cplx rhs = G / (2.0 * (zk * zk - 1.0));
        if (corrected) rhs *= f;
        for (std::size_t q = 0; q < z.size(); ++q)
            if (q != k) rhs *= z[q] * f / ((zk - z[q]) * (zk * z[q] - 1.0));
        out.push_back(std::abs(lhs - rhs));
    }
    return out;
}

std::vector<cplx> sample_points() {
    std::vector<cplx> x;
    for (int k = 0; k < 20; ++k) x.push_back(std::polar(0.45 + 0.13 * k, 0.3 + 0.9 * k));
    return x;
}

}  // namespace

std::string to_string(Regime r) {
    switch (r) {
        case Regime::inhom: return "inhom";
        case Regime::homog_highest: return "homog_highest";
        case Regime::homog_lowest: return "homog_lowest";
    }
    return "unknown";
}

HeunRecurrence::HeunRecurrence(HeunODECoeffs co) : co_(co) {
    if (co_.degree < 0) throw InvalidArgument("negative polynomial degree");
}

cplx HeunRecurrence::upper(int n) const { return co_.A * static_cast<double>(n + 1) * (static_cast<double>(n) + co_.a0); }

cplx HeunRecurrence::mid(int n) const {
    const double dn = n;
    return dn * ((1.0 + co_.A) * (co_.a0 + dn - 1.0) + co_.a1 * co_.A + co_.a2);
}

cplx HeunRecurrence::lower(int n) const {
    if (co_.regime == Regime::inhom) {
        const cplx sigma = co_.a0 + co_.a1 + co_.a2;
        return static_cast<double>(n - 1) * (static_cast<double>(n - 2) + sigma) + co_.a3;
    }
    const double k = co_.degree + 1 - n;
    return k * k;
}

cplx HeunRecurrence::rhs(int n) const {
    if (co_.regime != Regime::inhom) return 0.0;
    const int N = co_.degree;
    return co_.inhom_strength * binomial(N + 1, n) * std::pow(-co_.A, N + 1 - n);
}

HeunRecurrence::Values HeunRecurrence::evaluate(cplx mu) const {
    const int N = co_.degree;
    Values v;
    v.c.assign(static_cast<std::size_t>(N) + 2, 0.0);
    v.dc.assign(static_cast<std::size_t>(N) + 2, 0.0);
    v.c[static_cast<std::size_t>(N)] = 1.0;
    const cplx sc = co_.mu_scale;
    for (int n = N; n >= 1; --n) {
        const auto i = static_cast<std::size_t>(n);
        const cplx low = lower(n);
        const cplx num = (mu * sc + mid(n)) * v.c[i] + rhs(n) - upper(n) * v.c[i + 1];
        const cplx dnum = sc * v.c[i] + (mu * sc + mid(n)) * v.dc[i] - upper(n) * v.dc[i + 1];
        const double size = std::abs(mu * sc) + std::abs(mid(n)) + std::abs(upper(n)) + 1.0;
        if (std::abs(low) < 1e-13 * size)
            throw DegenerateRecurrence("coefficient of c_" + std::to_string(n - 1) + " vanishes");
        v.c[i - 1] = num / low;
        v.dc[i - 1] = dnum / low;
    }
    v.P = upper(0) * v.c[1] - (mu * sc + mid(0)) * v.c[0] - rhs(0);
    v.dP = upper(0) * v.dc[1] - sc * v.c[0] - (mu * sc + mid(0)) * v.dc[0];
    v.c.resize(static_cast<std::size_t>(N) + 1);
    v.dc.resize(static_cast<std::size_t>(N) + 1);
    return v;
}

std::vector<CPolynomial> HeunRecurrence::coefficient_polys() const {
    const int N = co_.degree;
    std::vector<CPolynomial> c(static_cast<std::size_t>(N) + 2);
    c[static_cast<std::size_t>(N)] = CPolynomial({1.0});
    const CPolynomial muX({0.0, co_.mu_scale});
    for (int n = N; n >= 1; --n) {
        const auto i = static_cast<std::size_t>(n);
        const cplx low = lower(n);
        if (std::abs(low) < 1e-13)
            throw DegenerateRecurrence("coefficient of c_" + std::to_string(n - 1) + " vanishes");
        const CPolynomial num = muX * c[i] + mid(n) * c[i] + CPolynomial({rhs(n)}) - upper(n) * c[i + 1];
        c[i - 1] = (1.0 / low) * num;
    }
    c.resize(static_cast<std::size_t>(N) + 1);
    return c;
}

CPolynomial HeunRecurrence::char_poly() const {
    const auto c = coefficient_polys();
    const CPolynomial c1 = c.size() > 1 ? c[1] : CPolynomial();
    const CPolynomial muX({0.0, co_.mu_scale});
    return upper(0) * c1 - muX * c[0] - CPolynomial({rhs(0)});
}

double HeunRecurrence::top_identity_residual() const {
    return std::abs(lower(co_.degree + 1) - rhs(co_.degree + 1));
}

CVector HeunRecurrence::mu_roots() const {
    const int n = co_.degree + 1;
    if (std::abs(co_.mu_scale) < 1e-300) throw DegenerateRecurrence("mu does not enter the recurrence");
    auto ev = [this](cplx mu) {
        const auto v = evaluate(mu);
        return std::make_pair(v.P, v.dP);
    };
    // seeds around the centroid of the roots, read off the two leading coefficients
    const CPolynomial P = char_poly();
    const auto& pc = P.coeffs();
    if (P.degree() != n) throw DegenerateRecurrence("consistency polynomial has the wrong degree");
    const cplx lead = pc.back();
    const cplx center = -pc[static_cast<std::size_t>(n - 1)] / (static_cast<double>(n) * lead);
    double radius = std::pow(std::abs(P(center) / lead), 1.0 / n);
    if (!(radius > 0) || !std::isfinite(radius)) radius = 1.0;

    CVector roots;
    bool done = false;
    for (double grow : {1.5, 4.0, 0.5, 10.0}) {
        try {
            roots = aberth(ev, static_cast<std::size_t>(n), circle_seeds(static_cast<std::size_t>(n), grow * radius, center));
            done = true;
            break;
        } catch (const NoConvergence&) {
        }
    }
    if (!done) throw NoConvergence("no Aberth seeding converged for P(mu)");
    for (auto& mu : roots) {
        const auto v = evaluate(mu);
        if (v.dP != 0.0) {
            const cplx nx = mu - v.P / v.dP;
            if (std::abs(evaluate(nx).P) <= std::abs(v.P)) mu = nx;
        }
    }
    sort_canonical(roots);
    return roots;
}

double HeunRecurrence::ode_residual(const CVector& c, cplx mu, cplx x) const {
    const CPolynomial y(c);
    const CPolynomial y1 = y.derivative();
    const CPolynomial y2 = y1.derivative();
    const cplx A = co_.A;
    const cplx t1 = x * (x - 1.0) * (x - A) * y2(x);
    const cplx t2 = (co_.a0 * (x - 1.0) * (x - A) + co_.a1 * x * (x - A) + co_.a2 * x * (x - 1.0)) * y1(x);
    const cplx t3 = co_.mu_scale * (x - mu) * y(x);
    const cplx t4 = co_.inhom_strength * std::pow(x - A, co_.degree + 1);
    const double size = std::abs(t1) + std::abs(t2) + std::abs(t3) + std::abs(t4);
    return size == 0.0 ? 0.0 : std::abs(t1 + t2 + t3 - t4) / size;
}

HeunODECoeffs inhom_coeffs(const HeunParams& p) {
    const Shifts sh = shifts(p);
    const cplx a = p.a;
    const RepScalars sc(p);
    HeunODECoeffs co;
    co.regime = Regime::inhom;
    co.degree = p.spin.two_s;
    co.A = -(a - 1.0) * (a - 1.0) / (4.0 * a);
    co.a0 = 1.0 - sh.x - sh.y0;
    co.a1 = 1.0 - sh.x - sh.y1;
    co.a2 = -static_cast<double>(p.spin.two_s);
    co.inhom_strength = std::norm(sc.gamma(p.spin.two_s + 1));
    const double two_s = p.spin.two_s;
    co.a3 = co.inhom_strength - two_s * (two_s - 1.0 + co.a0 + co.a1 + co.a2);
    co.mu_scale = co.a3;
    return co;
}

HeunODECoeffs homog_coeffs(const HeunParams& p, int M, bool lowest) {
    if (M < 0) throw InvalidArgument("negative branch degree");
    const Shifts sh = shifts(p);
    const cplx a = p.a;
    HeunODECoeffs co;
    co.regime = lowest ? Regime::homog_lowest : Regime::homog_highest;
    co.degree = M;
    co.A = -(a - 1.0) * (a - 1.0) / (4.0 * a);
    const double sg = lowest ? 1.0 : -1.0;
    co.a0 = 1.0 + sg * (sh.x + sh.y0);
    co.a1 = 1.0 + sg * (sh.x + sh.y1);
    co.a2 = -static_cast<double>(p.spin.two_s);
    co.inhom_strength = 0.0;
    co.a3 = static_cast<double>(M) * M;
    co.mu_scale = co.a3;
    return co;
}

std::pair<HeunODECoeffs, CharPoly> inhom_char_poly(const HeunParams& p) {
    const HeunODECoeffs co = inhom_coeffs(p);
    const HeunRecurrence rec(co);
    CharPoly cp;
    cp.c = rec.coefficient_polys();
    cp.P = rec.char_poly();
    return {co, cp};
}

std::vector<double> bethe_residual(const CVector& z, const HeunParams& p, Regime regime) {
    if (regime == Regime::inhom) return inhom_residual_impl(z, p, true);
    check_configuration(z, p);
    const RepScalars sc(p);
    std::vector<double> out;
    for (std::size_t k = 0; k < z.size(); ++k) {
        const cplx zk = z[k];
        const cplx field = regime == Regime::homog_highest ? (sc.alpha(zk) - sc.delta(zk)) / 4.0
                                                           : (sc.delta_bar(zk) - sc.alpha_bar(zk)) / 4.0;
        out.push_back(std::abs(field + (zk * zk + 1.0) / (zk * zk - 1.0) + pair_sum(z, k)));
    }
    return out;
}

std::vector<double> unfactored_inhom_residual(const CVector& z, const HeunParams& p) {
    return inhom_residual_impl(z, p, false);
}

cplx transfer_eigenvalue(cplx u, const CVector& z, Regime regime, const HeunParams& p) {
    const RepScalars sc(p);
    const Dual du = Dual::var(u);
    const bool low = regime == Regime::homog_lowest;
    const Dual al = low ? sc.alpha_bar(du) : sc.alpha(du);
    const Dual de = low ? sc.delta_bar(du) : sc.delta(du);
    const double sg = low ? -1.0 : 1.0;
    const cplx u2 = u * u;
    const cplx diff = al.v - de.v;
    cplx total = al.v * al.v + de.v * de.v + 2.0 +
                 sg * (2.0 * u * (al.d - de.d) + 2.0 * (u2 + 1.0) / (u2 - 1.0) * diff);
    for (std::size_t k = 0; k < z.size(); ++k) {
        const cplx zk = z[k];
        cplx inner = sg * diff / 4.0 + (u2 + 1.0) / (u2 - 1.0);
        for (std::size_t q = 0; q < z.size(); ++q)
            if (q != k) inner += (u2 - 1.0) * zk * z[q] / (u * (zk - z[q]) * (zk * z[q] - 1.0));
        total += 16.0 * zk * (u2 - 1.0) / ((u - zk) * (u * zk - 1.0)) * inner;
    }
    if (regime == Regime::inhom) {
        const cplx a = p.a;
        const cplx g = sc.gamma(p.spin.two_s + 1);
        cplx prod = -8.0 * std::conj(g);
        for (const auto& zq : z) prod *= (u - a) * (a * u - 1.0) * zq / (a * (u - zq) * (u * zq - 1.0));
        total += g * prod;
    }
    return total;
}

// Lambda is analytic in a disc around u = 0 whose radius is set by the nearest of 1, a and the roots,
// so its derivative comes from the trapezoid rule on a circle inside that disc.
cplx eigenvalue_w(const CVector& z, Regime regime, const HeunParams& p, double rel_tol) {
    const cplx a = p.a;
    double dist = std::min({std::abs(a), 1.0 / std::abs(a), 1.0});
    for (const auto& zk : z) dist = std::min({dist, std::abs(zk), 1.0 / std::abs(zk)});
    const double radius = 0.5 * dist;
    auto D = [&](int n) {
        cplx acc = 0.0;
        for (int k = 0; k < n; ++k) {
            const cplx e = std::polar(1.0, 2.0 * std::numbers::pi * (k + 0.5) / n);
            acc += transfer_eigenvalue(radius * e, z, regime, p) / e;
        }
        return acc / (static_cast<double>(n) * radius);
    };
    const cplx coarse = D(32), fine = D(64);
    if (std::abs(fine - coarse) > rel_tol * std::max(1.0, std::abs(fine)))
        throw ExtrapolationUnstable("contour derivative estimates differ by " + std::to_string(std::abs(fine - coarse)));
    return a / (8.0 * kI * (1.0 - a * a)) * fine + rho5_shift(p);
}

namespace {

// closed forms and mu forms of the eigenvalue for one solution
void fill_cross_checks(BetheSolution& sol, const HeunParams& p, const HeunRecurrence& rec) {
    const cplx a = p.a;
    const double s = p.spin.s();
    const RepScalars sc(p);
    const cplx shift = rho5_shift(p);
    const HeunODECoeffs& co = rec.coeffs();
    const int N = co.degree;
    if (sol.regime == Regime::inhom) {
        const double g2 = std::norm(sc.gamma(p.spin.two_s));
        const double G = co.inhom_strength;
        const cplx base = p.rho1 * p.rho2 / 2.0 + (s * (a * a + 1.0) * p.rho1 - kI * s * (a * a - 1.0) * p.rho2) / (2.0 * a) +
                          kI * (a * a + 1.0) * (4.0 * s * s - p.rho2 * p.rho2) / (2.0 * (a * a - 1.0));
        const cplx c0 = base + 2.0 * kI * s * g2 * (a - 1.0) / (a + 1.0);
        sol.w_closed = c0 - 4.0 * a * kI * g2 / (1.0 - a * a) * sol.sum_Z + shift;
        sol.w_closed_alt = base + 2.0 * kI * s * G * (a - 1.0) / (a + 1.0) - 4.0 * a * kI * G / (1.0 - a * a) * sol.sum_Z + shift;
        sol.w_mu_form = c0 + 4.0 * kI * a / (1.0 - a * a) * (sol.mu * co.a3 - G * (N + 1.0) * co.A + rec.mid(N)) + shift;
        sol.w_mu_form_variant = 4.0 * a * kI * co.a3 * sol.mu / (1.0 - a * a) + p.rho1 * (p.rho2 / 2.0 - s) -
                                kI * (a * a + 1.0) * (p.rho2 * p.rho2 - 2.0 * s * (s + 1.0)) / (2.0 * (a * a - 1.0)) +
                                kI * (a - 1.0) * (p.rho2 - G) / (a + 1.0) + 2.0 * kI * s * (s - 1.0) * a / (a * a - 1.0) + shift;
        return;
    }
    const double sg = sol.regime == Regime::homog_lowest ? 1.0 : -1.0;
    const cplx base = kI / (a * a - 1.0) * (s * (a * a + 1.0) - 2.0 * N * a + sg * a * p.rho2);
    sol.w_closed = base + 4.0 * kI * a / (a * a - 1.0) * sol.sum_Z + shift;
    const cplx sumz_mu = N == 0 ? cplx(0.0) : -(sol.mu * co.mu_scale + rec.mid(N));
    sol.w_mu_form = base + 4.0 * kI * a / (a * a - 1.0) * sumz_mu + shift;
    if (sol.regime == Regime::homog_highest) {
        const double M = N;
        sol.w_mu_form_variant =
            4.0 * kI * a * sol.mu * M * M / (1.0 - a * a) +
            kI / (1.0 - a * a) * (((a * a + 1.0) * s + a * p.rho2) * (2.0 * M + 1.0) - M * M * (a - 1.0) * (a - 1.0)) + shift;
    }
}

BetheSolution build_solution(const HeunParams& p, const HeunRecurrence& rec, cplx mu, SolveWarnings* warn) {
    const HeunODECoeffs& co = rec.coeffs();
    const int N = co.degree;
    BetheSolution sol;
    sol.regime = co.regime;
    sol.mu = mu;
    sol.c = N == 0 ? CVector{1.0} : rec.evaluate(mu).c;
    sol.sum_Z = N >= 1 ? -sol.c[static_cast<std::size_t>(N - 1)] : cplx(0.0);
    auto note = [&](const std::string& m) {
        if (warn) warn->messages.push_back(to_string(co.regime) + " mu=" + std::to_string(mu.real()) + ": " + m);
    };

    try {
        if (N >= 1) sol.Z = poly_roots(CPolynomial(sol.c));
        for (const auto& Z : sol.Z) sol.z.push_back(z_from_Z(Z));
        for (std::size_t k = 0; k < sol.Z.size(); ++k)
            sol.residuals.z_map = std::max(sol.residuals.z_map,
                                           std::abs((2.0 - sol.z[k] - 1.0 / sol.z[k]) / 4.0 - sol.Z[k]));
    } catch (const Error& e) {
        sol.roots_ok = false;
        note(std::string("root extraction failed: ") + e.what());
    }

    if (sol.roots_ok) {
        try {
            const double r_direct = max_or_zero(bethe_residual(sol.z, p, sol.regime));
            const double r_inv = max_or_zero(bethe_residual(inverted(sol.z), p, sol.regime));
            if (r_inv < r_direct) sol.z = inverted(sol.z);
            sol.residuals.bethe_eq = std::min(r_direct, r_inv);
            sol.residuals.bethe_eq_inverted = std::max(r_direct, r_inv);
            if (sol.regime == Regime::inhom)
                sol.residuals.unfactored_eq = max_or_zero(unfactored_inhom_residual(sol.z, p));
        } catch (const SingularConfiguration& e) {
            sol.residuals.bethe_eq = sol.residuals.bethe_eq_inverted = sol.residuals.unfactored_eq = -1.0;
            note(std::string("Bethe residual not evaluable: ") + e.what());
        }
    }
    for (const auto& x : sample_points())
        sol.residuals.heun_eq = std::max(sol.residuals.heun_eq, rec.ode_residual(sol.c, mu, x));

    fill_cross_checks(sol, p, rec);
    sol.w = sol.w_closed;
    if (sol.roots_ok) {
        try {
            sol.w = eigenvalue_w(sol.z, sol.regime, p);
        } catch (const Error& e) {
            note(std::string("transfer route failed, closed form used: ") + e.what());
        }
    }
    if (sol.residuals.bethe_eq > 1e-6) note("Bethe residual " + std::to_string(sol.residuals.bethe_eq));
    return sol;
}

void flag_repeated(const CVector& mus, SolveWarnings* warn) {
    if (!warn) return;
    for (std::size_t i = 0; i < mus.size(); ++i)
        for (std::size_t j = i + 1; j < mus.size(); ++j)
            if (std::abs(mus[i] - mus[j]) < 1e-8) warn->messages.push_back("RepeatedMuRoots: near-degenerate mu roots");
}

}  // namespace

std::vector<BetheSolution> inhom_solve(const HeunParams& p, SolveWarnings* warn) {
    if (p.spin.two_s < 1) throw InvalidArgument("the Bethe route needs two_s >= 1");
    const HeunRecurrence rec(inhom_coeffs(p));
    const CVector mus = rec.mu_roots();
    flag_repeated(mus, warn);
    std::vector<BetheSolution> out;
    for (const auto& mu : mus) out.push_back(build_solution(p, rec, mu, warn));
    return out;
}

HomogeneousCondition homog_condition(const HeunParams& p, double tol) {
    const cplx a = p.a;
    HomogeneousCondition hc;
    hc.value = p.spin.s() - 0.5 + kI * (a * a - 1.0) * p.rho1 / (4.0 * a) + (a * a + 1.0) * p.rho2 / (4.0 * a);
    const double m = std::round(hc.value.real());
    hc.defect = std::abs(hc.value - m);
    if (std::abs(p.rho3) <= tol && hc.defect < tol && m >= 0 && m <= p.spin.two_s - 1) hc.M = static_cast<int>(m);
    return hc;
}

std::vector<BetheSolution> homog_branch(const HeunParams& p, int M, bool lowest, SolveWarnings* warn) {
    const HeunRecurrence rec(homog_coeffs(p, M, lowest));
    if (M == 0) return {build_solution(p, rec, 0.0, warn)};
    const CVector mus = rec.mu_roots();
    flag_repeated(mus, warn);
    std::vector<BetheSolution> out;
    for (const auto& mu : mus) out.push_back(build_solution(p, rec, mu, warn));
    return out;
}

std::vector<BetheSolution> homog_solve(const HeunParams& p, SolveWarnings* warn) {
    const HomogeneousCondition hc = homog_condition(p);
    if (!hc.M) throw InvalidArgument("parameters do not satisfy the homogeneous condition");
    const int M = *hc.M;
    const int Mbar = p.spin.two_s - 1 - M;
    auto hi = homog_branch(p, M, false, warn);
    auto lo = homog_branch(p, Mbar, true, warn);
    if (hi.size() != static_cast<std::size_t>(M + 1) || lo.size() != static_cast<std::size_t>(p.spin.two_s - M))
        throw BranchCountMismatch("branch sizes " + std::to_string(hi.size()) + " + " + std::to_string(lo.size()));
    hi.insert(hi.end(), lo.begin(), lo.end());
    if (hi.size() != p.spin.dim()) throw BranchCountMismatch("union does not cover the spectrum");
    return hi;
}

CMatrix w_in_tilde_basis(const HeunParams& p, const SpinRep& rep) {
    const CMatrix tj = tilde_j3(p, rep);
    const std::size_t d = rep.spin.dim();
    CMatrix v(d, d);
    for (std::size_t k = 0; k < d; ++k) v.set_column(k, null_vector(tj, p.spin.s() - static_cast<double>(k)));
    return inverse(v) * build_w(p, rep) * v;
}

double stabilization_product(const HeunParams& p, int M) {
    if (M < 0 || M + 1 > p.spin.two_s) throw IndexOutOfRange("cut index outside the spin domain");
    const CMatrix w = w_in_tilde_basis(p, build_spin_rep(p.spin));
    const auto m = static_cast<std::size_t>(M);
    return std::abs(w(m, m + 1) * w(m + 1, m));
}

BetheSpectrum bethe_spectrum(const HeunParams& p, const std::string& branch) {
    BetheSpectrum out;
    const HomogeneousCondition hc = homog_condition(p);
    bool homog = false;
    if (branch == "auto") homog = hc.M.has_value();
    else if (branch == "homog") homog = true;
    else if (branch != "inhom") throw InvalidArgument("unknown branch '" + branch + "'");
    out.route = homog ? "homog" : "inhom";
    out.solutions = homog ? homog_solve(p, &out.warnings) : inhom_solve(p, &out.warnings);
    for (const auto& s : out.solutions) out.spectrum.eigenvalues.push_back(s.w.real());
    std::sort(out.spectrum.eigenvalues.begin(), out.spectrum.eigenvalues.end());
    out.spectrum.method = Method::bethe;
    return out;
}

ESpectrum e_spectrum(Spin sp, double r) {
    ESpectrum out;
    out.r = r;
    if (!(r > 0.0 && r < 1.0)) throw ParameterOutOfRange("r must lie in (0, 1)");
    out.a = e_inhomogeneity(r);
    const double a = out.a;
    const double s = sp.s();
    const auto rep = build_spin_rep(sp);
    out.oracle = oracle_spectrum(build_e(sp, r, rep)).eigenvalues;
    const HeunParams p = HeunParams::from_complex_a(sp, a, 0.0, 0.0, 0.0);
    const cplx fac = 4.0 * kI * (1.0 - a) / (1.0 + a);
    const double ap1 = (a + 1.0) * (a + 1.0);

    auto e1_of = [&](const BetheSolution& sol, const HeunParams& q) {
        const double g2 = std::norm(RepScalars(q).gamma(sp.two_s));
        const cplx sum_zz = 2.0 * sp.two_s - 4.0 * sol.sum_Z;  // sum of z + 1/z
        return 2.0 * s * (4.0 * s * s + 1.0) * (a * a + 1.0) / ap1 - 4.0 * a * g2 / ap1 * sum_zz;
    };
    auto e1_pass = [&](const HeunParams& q, std::vector<double>& e1, std::vector<double>& et,
                       std::vector<BetheSolution>* keep) {
        const auto sols = inhom_solve(q);
        for (const auto& sol : sols) {
            e1.push_back(e1_of(sol, q).real());
            et.push_back((fac * sol.w).real());
        }
        std::sort(e1.begin(), e1.end());
        std::sort(et.begin(), et.end());
        if (keep) *keep = sols;
    };

    if (!sp.half_integer()) {
        e1_pass(p, out.e1, out.e1_transfer, &out.solutions);
        return out;
    }

    // gamma_{s+1/2} = 0 makes the recurrence degenerate; regularize with rho3 = eta
    out.e1_regularized = true;
    const double eta = 1e-3;
    std::vector<double> e_a, e_b, t_a, t_b;
    e1_pass(p.with_rho(0.0, 0.0, eta), e_a, t_a, nullptr);
    e1_pass(p.with_rho(0.0, 0.0, eta / 2), e_b, t_b, nullptr);
    for (std::size_t k = 0; k < e_a.size(); ++k) {
        out.e1.push_back((4.0 * e_b[k] - e_a[k]) / 3.0);
        out.e1_transfer.push_back((4.0 * t_b[k] - t_a[k]) / 3.0);
    }

    const int M = (sp.two_s - 1) / 2;
    const int Mbar = sp.two_s - 1 - M;
    for (const auto& sol : homog_branch(p, M, false)) {
        const cplx sum_zz = 2.0 * M - 4.0 * sol.sum_Z;
        out.e2.push_back((4.0 * s * (a * a + 1.0) / ap1 - 4.0 * a / ap1 * sum_zz).real());
        out.solutions.push_back(sol);
    }
    for (const auto& sol : homog_branch(p, Mbar, true)) {
        out.e2.push_back((fac * sol.w).real());
        out.solutions.push_back(sol);
    }
    std::sort(out.e2.begin(), out.e2.end());
    return out;
}

}  // namespace heun
