#include "heun/gaudin.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace heun {

namespace {

constexpr double kGuard = 1e-12;

void guard(cplx x, const char* what) {
    if (std::abs(x) < kGuard) throw SpectralSingularity(what);
}

CMatrix identity(std::size_t n) { return CMatrix::identity(n); }

// Embed an operator on aux (x) quantum (dims 2, d) into aux1 (x) aux2 (x) quantum.
// leg 0 puts the aux index on aux1, leg 1 on aux2.
CMatrix embed_aux(const CMatrix& k, std::size_t d, int leg) {
    CMatrix r(4 * d, 4 * d);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j)
            for (std::size_t o = 0; o < 2; ++o)
                for (std::size_t a = 0; a < d; ++a)
                    for (std::size_t b = 0; b < d; ++b) {
                        const cplx v = k(i * d + a, j * d + b);
                        if (v == 0.0) continue;
                        const std::size_t row = leg == 0 ? (i * 2 + o) * d + a : (o * 2 + i) * d + a;
                        const std::size_t col = leg == 0 ? (j * 2 + o) * d + b : (o * 2 + j) * d + b;
                        r(row, col) = v;
                    }
    return r;
}

template <class T>
T alpha_impl(T u, const HeunParams& p, double s) {
    const cplx a = p.a;
    const T one(1.0);
    const T u2m1 = u * u - one;
    const T au1 = T(a) * u - one;
    const T amu = T(a) - u;
    return T(p.rho3) + T(2.0 * a * s) * u2m1 / (au1 * amu) -
           T(kI * (a * a - 1.0) * p.rho1 / (2.0 * a)) * (u * u + one) / u2m1 -
           T(p.rho2 / (2.0 * a)) * (amu * amu + au1 * au1) / u2m1;
}

CMatrix gauge_conjugate(const CMatrix& x, cplx u, std::size_t d) {
    const CMatrix m = gauge_matrix(u);
    const CMatrix mi = inverse(m);
    return kron(mi, identity(d)) * x * kron(m, identity(d));
}

}  // namespace

CMatrix OperatorKMatrix::full() const {
    const std::size_t d = A.rows();
    CMatrix m(2 * d, 2 * d);
    m.set_block(0, 0, A);
    m.set_block(0, d, B);
    m.set_block(d, 0, C);
    m.set_block(d, d, D);
    return m;
}

CMatrix r_matrix(cplx u, cplx v) {
    guard(u, "r(u,v) needs u != 0");
    guard(v, "r(u,v) needs v != 0");
    guard(u - v, "r(u,v) needs u != v");
    guard(u * v - 1.0, "r(u,v) needs uv != 1");
    const cplx f = 1.0 / ((u - v) * (u * v - 1.0));
    const cplx d = u * (1.0 - v * v);
    CMatrix r(4, 4);
    r(0, 0) = d;
    r(0, 3) = -2.0 * (u - v);
    r(1, 1) = -d;
    r(1, 2) = -2.0 * v * (u * v - 1.0);
    r(2, 1) = -2.0 * u * (u * v - 1.0);
    r(2, 2) = -d;
    r(3, 0) = -2.0 * u * v * (u - v);
    r(3, 3) = d;
    return f * r;
}

CMatrix swap_operator() {
    CMatrix p(4, 4);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) p(2 * i + j, 2 * j + i) = 1.0;
    return p;
}

CMatrix r21_matrix(cplx v, cplx u) {
    const CMatrix p = swap_operator();
    return p * r_matrix(v, u) * p;
}

OperatorKMatrix k_matrix(cplx u, const HeunParams& p, const SpinRep& rep) {
    if (!(p.spin == rep.spin)) throw SpinMismatch("k_matrix");
    const cplx a = p.a;
    const cplx den = (1.0 - a * u) * (u - a);
    guard(den, "K(u) needs (1 - a u)(u - a) != 0");
    const cplx pre = 2.0 / den;
    const cplx a2m1 = a * a - 1.0;
    OperatorKMatrix k;
    k.A = (pre * u * a2m1) * rep.j3;
    k.B = pre * ((a * a * u - 2.0 * a + u) * rep.j1 - kI * u * a2m1 * rep.j2);
    k.C = pre * (-u * (a * a - 2.0 * a * u + 1.0) * rep.j1 + kI * u * a2m1 * rep.j2);
    k.D = -k.A;
    return k;
}

CMatrix c_matrix(cplx u, const HeunParams& p) {
    const cplx a = p.a;
    guard(u * u - 1.0, "c(u) needs u^2 != 1");
    const cplx f = 2.0 * kI * u * (a * a - 1.0) * p.rho1 / (a * (u * u - 1.0)) +
                   2.0 * (a * u - 1.0) * (a - u) * p.rho2 / (a * (u * u - 1.0));
    // f j1 + 2i rho2 j2 + 2i rho3 j3 + rho3 I with spin-1/2 j's
    CMatrix c(2, 2);
    c(0, 0) = kI * p.rho3 + p.rho3;
    c(1, 1) = -kI * p.rho3 + p.rho3;
    c(0, 1) = 0.5 * f + p.rho2;
    c(1, 0) = 0.5 * f - p.rho2;
    return c;
}

CMatrix dressed_k(cplx u, const HeunParams& p, const SpinRep& rep) {
    return k_matrix(u, p, rep).full() + kron(c_matrix(u, p), identity(rep.spin.dim()));
}

CMatrix transfer(cplx u, const HeunParams& p, const SpinRep& rep) {
    const std::size_t d = rep.spin.dim();
    const CMatrix k = dressed_k(u, p, rep);
    const CMatrix k2 = k * k;
    return k2.block(0, 0, d, d) + k2.block(d, d, d, d);
}

CMatrix gauge_matrix(cplx u) {
    guard(u, "M(u) needs u != 0");
    return CMatrix(2, 2, {0.5, 1.0 / u, -u / 2.0, 1.0});
}

double cybe_residual(cplx u1, cplx u2, cplx u3) {
    const CMatrix i2 = identity(2);
    const CMatrix p = swap_operator();
    const CMatrix p23 = kron(i2, p);
    const CMatrix p12 = kron(p, i2);
    const CMatrix r13 = p23 * kron(r_matrix(u1, u3), i2) * p23;
    const CMatrix r23 = kron(i2, r_matrix(u2, u3));
    const CMatrix r12 = kron(r_matrix(u1, u2), i2);
    const CMatrix r21 = p12 * kron(r_matrix(u2, u1), i2) * p12;
    return (commutator(r13, r23) - commutator(r21, r13) - commutator(r23, r12)).max_abs();
}

double r21_consistency_residual(cplx u, cplx v) {
    // r21 from the swap conjugation against the explicit index relabelling
    const CMatrix r = r_matrix(v, u);
    const CMatrix r21 = r21_matrix(v, u);
    double m = 0.0;
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j)
            for (std::size_t k = 0; k < 2; ++k)
                for (std::size_t l = 0; l < 2; ++l)
                    m = std::max(m, std::abs(r21(2 * i + j, 2 * k + l) - r(2 * j + i, 2 * l + k)));
    return m;
}

namespace {

double reflection_residual_full(const CMatrix& ku, const CMatrix& kv, const CMatrix& r12, const CMatrix& r21v,
                                std::size_t d) {
    const CMatrix k1 = embed_aux(ku, d, 0);
    const CMatrix k2 = embed_aux(kv, d, 1);
    const CMatrix id = identity(d);
    const CMatrix R12 = kron(r12, id);
    const CMatrix R21 = kron(r21v, id);
    return (commutator(k1, k2) - commutator(R21, k1) - commutator(k2, R12)).max_abs();
}

}  // namespace

double reflection_residual_k(cplx u, cplx v, const HeunParams& p, const SpinRep& rep) {
    return reflection_residual_full(k_matrix(u, p, rep).full(), k_matrix(v, p, rep).full(), r_matrix(u, v),
                                    r21_matrix(v, u), rep.spin.dim());
}

double reflection_residual_dressed(cplx u, cplx v, const HeunParams& p, const SpinRep& rep) {
    return reflection_residual_full(dressed_k(u, p, rep), dressed_k(v, p, rep), r_matrix(u, v), r21_matrix(v, u),
                                    rep.spin.dim());
}

double reflection_residual_c(cplx u, cplx v, const HeunParams& p) {
    const CMatrix i2 = identity(2);
    const CMatrix c1 = kron(c_matrix(u, p), i2);
    const CMatrix c2 = kron(i2, c_matrix(v, p));
    return (commutator(r21_matrix(v, u), c1) + commutator(c2, r_matrix(u, v))).max_abs();
}

double reflection_residual_tilde(cplx u, cplx v, const HeunParams& p, const SpinRep& rep) {
    const std::size_t d = rep.spin.dim();
    const CMatrix mu = gauge_matrix(u), mv = gauge_matrix(v);
    const CMatrix muv = kron(mu, mv), mvu = kron(mv, mu);
    const CMatrix rt12 = inverse(muv) * r_matrix(u, v) * muv;
    const CMatrix pswap = swap_operator();
    const CMatrix rt21 = pswap * (inverse(mvu) * r_matrix(v, u) * mvu) * pswap;
    const CMatrix ku = gauge_conjugate(k_matrix(u, p, rep).full(), u, d);
    const CMatrix kv = gauge_conjugate(k_matrix(v, p, rep).full(), v, d);
    return reflection_residual_full(ku, kv, rt12, rt21, d);
}

double gauge_transfer_defect(cplx u, const HeunParams& p, const SpinRep& rep) {
    const std::size_t d = rep.spin.dim();
    const CMatrix kt = gauge_conjugate(dressed_k(u, p, rep), u, d);
    const CMatrix k2 = kt * kt;
    return max_abs_diff(k2.block(0, 0, d, d) + k2.block(d, d, d, d), transfer(u, p, rep));
}

GaugeBlocks gauge_blocks(cplx u, const HeunParams& p, const SpinRep& rep) {
    const std::size_t d = rep.spin.dim();
    const CMatrix t = gauge_conjugate(dressed_k(u, p, rep), u, d);
    return {t.block(0, 0, d, d), t.block(0, d, d, d), t.block(d, 0, d, d), t.block(d, d, d, d)};
}

CMatrix shifted_b(cplx u, int n, const HeunParams& p, const SpinRep& rep) {
    guard(u, "B(u,n) needs u != 0");
    return gauge_blocks(u, p, rep).B - (2.0 * (2.0 * n - 1.0) / u) * identity(rep.spin.dim());
}

CMatrix shifted_c(cplx u, int n, const HeunParams& p, const SpinRep& rep) {
    return gauge_blocks(u, p, rep).C + ((2.0 * n - 1.0) * u / 2.0) * identity(rep.spin.dim());
}

cplx RepScalars::alpha(cplx u) const { return alpha_impl<cplx>(u, p, p.spin.s()); }
cplx RepScalars::delta(cplx u) const { return 2.0 * p.rho3 - alpha(u); }
cplx RepScalars::alpha_bar(cplx u) const { return alpha_impl<cplx>(u, p, -p.spin.s()); }
cplx RepScalars::delta_bar(cplx u) const { return 2.0 * p.rho3 - alpha_bar(u); }
Dual RepScalars::alpha(Dual u) const { return alpha_impl<Dual>(u, p, p.spin.s()); }
Dual RepScalars::delta(Dual u) const { return Dual(2.0 * p.rho3) - alpha(u); }
Dual RepScalars::alpha_bar(Dual u) const { return alpha_impl<Dual>(u, p, -p.spin.s()); }
Dual RepScalars::delta_bar(Dual u) const { return Dual(2.0 * p.rho3) - alpha_bar(u); }

cplx RepScalars::gamma(int n) const {
    const cplx a = p.a;
    const double s = p.spin.s();
    return -s + n - 0.5 - kI * (a * a - 1.0) * p.rho1 / (4.0 * a) - (a * a + 1.0) * p.rho2 / (4.0 * a) +
           kI * p.rho3 / 2.0;
}

cplx RepScalars::beta(int n) const {
    const cplx a = p.a;
    const double s = p.spin.s();
    return 4.0 * (-s - n + 0.5 + kI * (a * a - 1.0) * p.rho1 / (4.0 * a) + (a * a + 1.0) * p.rho2 / (4.0 * a) +
                  kI * p.rho3 / 2.0);
}

CMatrix tilde_j3(const HeunParams& p, const SpinRep& rep) {
    const cplx a = p.a;
    return (-(a * a + 1.0) / (2.0 * a)) * rep.j1 + (kI * (a * a - 1.0) / (2.0 * a)) * rep.j2;
}

NaiveTildeDiagnostic naive_tilde_diagnostic(const HeunParams& p, const SpinRep& rep) {
    const cplx a = p.a, a2 = a * a;
    const CMatrix t1 = (-(a2 - 1.0) * (a2 - 4.0) / (8.0 * a2)) * rep.j1 +
                       (kI * (a2 + 1.0) * (a2 - 4.0) / (8.0 * a2)) * rep.j2 + ((a2 + 4.0) / (4.0 * a)) * rep.j3;
    const CMatrix t2 = (kI * (a2 - 1.0) * (a2 + 4.0) / (8.0 * a2)) * rep.j1 +
                       ((a2 + 1.0) * (a2 + 4.0) / (8.0 * a2)) * rep.j2 + (-kI * (a2 - 4.0) / (4.0 * a)) * rep.j3;
    const CMatrix t3 = (-(a2 - 1.0) / (2.0 * a)) * rep.j1 + (kI * (a2 - 1.0) / (2.0 * a)) * rep.j2;
    NaiveTildeDiagnostic d;
    d.su2_defect = su2_relation_defect(t1, t2, t3);
    CMatrix pw = CMatrix::identity(rep.spin.dim());
    for (int k = 0; k <= rep.spin.two_s; ++k) pw = pw * t3;
    d.j3_nilpotency = pw.max_abs();
    const CMatrix tj = tilde_j3(p, rep);
    const double s = p.spin.s();
    for (int k = 0; k <= rep.spin.two_s; ++k) {
        const CVector v = null_vector(tj, s - k);
        d.derived_eigen_defect = std::max(d.derived_eigen_defect, norm(axpy(-(s - k), v, tj * v)));
    }
    return d;
}

CVector null_vector(const CMatrix& a, cplx lambda) {
    const std::size_t n = a.rows();
    const double scale = std::max(1.0, a.max_abs());
    CMatrix shifted = a - (lambda + cplx(1e-10 * scale, 1e-11 * scale)) * CMatrix::identity(n);
    CVector x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = cplx(1.0 + 0.1 * static_cast<double>(i), 0.3 - 0.05 * static_cast<double>(i));
    for (int it = 0; it < 4; ++it) {
        x = lu_solve(shifted, x);
        const double nx = norm(x);
        if (!(nx > 0) || !std::isfinite(nx)) throw NoConvergence("inverse iteration broke down");
        for (auto& z : x) z /= nx;
    }
    double big = 0.0;
    for (const auto& z : x) big = std::max(big, std::abs(z));
    for (const auto& z : x)
        if (std::abs(z) > 1e-12 * big) {
            const cplx ph = std::conj(z) / std::abs(z);
            for (auto& w : x) w *= ph;
            break;
        }
    return x;
}

WeightVectors weight_vectors(const HeunParams& p, const SpinRep& rep) {
    const CMatrix tj = tilde_j3(p, rep);
    const double s = p.spin.s();
    return {null_vector(tj, s), null_vector(tj, -s)};
}

BetheVector bethe_vector(const CVector& roots, Weight w, const HeunParams& p, const SpinRep& rep) {
    if (roots.size() > static_cast<std::size_t>(p.spin.two_s))
        throw InvalidArgument("at most 2s Bethe roots");
    const WeightVectors wv = weight_vectors(p, rep);
    CVector v = w == Weight::highest ? wv.highest : wv.lowest;
    double scale = 1.0;
    const int m = static_cast<int>(roots.size());
    for (int k = m; k >= 1; --k) {
        const cplx z = roots[static_cast<std::size_t>(k - 1)];
        const CMatrix op = w == Weight::highest ? shifted_b(z, k, p, rep) : shifted_c(z, 1 - k, p, rep);
        scale *= std::max(1.0, op.max_abs());
        v = op * v;
    }
    if (!(norm(v) > 1e-13 * scale)) throw ZeroVector("Bethe vector vanishes for these roots");
    return {v, roots, w};
}

CMatrix heun_from_transfer(const HeunParams& p, const SpinRep& rep, double h) {
    auto deriv = [&](double step) {
        return (1.0 / (2.0 * step)) * (transfer(step, p, rep) - transfer(-step, p, rep));
    };
    const CMatrix d0 = deriv(h), d1 = deriv(h / 2), d2 = deriv(h / 4);
    const CMatrix r0 = (1.0 / 3.0) * (4.0 * d1 - d0);
    const CMatrix r1 = (1.0 / 3.0) * (4.0 * d2 - d1);
    const CMatrix dd = (1.0 / 15.0) * (16.0 * r1 - r0);
    const cplx a = p.a;
    return (a / (8.0 * kI * (1.0 - a * a))) * dd;
}

bool StructureReport::all_passed() const {
    return std::all_of(rows.begin(), rows.end(), [](const CheckRow& r) { return r.passed(); });
}

double SeededUniform::next() {
    // splitmix64
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return static_cast<double>(z >> 11) * 0x1.0p-53;
}

cplx random_spectral_point(SeededUniform& rng, const HeunParams& p, const CVector& avoid) {
    const cplx a = p.a;
    for (int tries = 0; tries < 10000; ++tries) {
        const cplx u(rng.range(-2.0, 2.0), rng.range(-2.0, 2.0));
        bool ok = std::abs(u) > 0.15 && std::abs(u * u - 1.0) > 0.15 && std::abs(u - a) > 0.15 &&
                  std::abs(a * u - 1.0) > 0.15;
        for (const auto& v : avoid) ok = ok && std::abs(u - v) > 0.15 && std::abs(u * v - 1.0) > 0.15;
        if (ok) return u;
    }
    throw NoConvergence("could not draw an admissible spectral point");
}

StructureReport verify_structure(const HeunParams& p, std::uint64_t seed, int points, const ToleranceConfig& tol) {
    const SpinRep rep = build_spin_rep(p.spin);
    SeededUniform rng(seed);
    StructureReport rep_out;
    auto add = [&](std::string name, double res, double t, bool diag = false) {
        rep_out.rows.push_back({std::move(name), res, t, diag});
    };

    double cybe = 0, r21 = 0, refl_k = 0, refl_c = 0, refl_kc = 0, refl_t = 0, gauge_t = 0, comm = 0;
    for (int i = 0; i < points; ++i) {
        const cplx u1 = random_spectral_point(rng, p);
        const cplx u2 = random_spectral_point(rng, p, {u1});
        const cplx u3 = random_spectral_point(rng, p, {u1, u2});
        cybe = std::max(cybe, cybe_residual(u1, u2, u3));
        r21 = std::max(r21, r21_consistency_residual(u1, u2));
        refl_k = std::max(refl_k, reflection_residual_k(u1, u2, p, rep));
        refl_c = std::max(refl_c, reflection_residual_c(u1, u2, p));
        refl_kc = std::max(refl_kc, reflection_residual_dressed(u1, u2, p, rep));
        refl_t = std::max(refl_t, reflection_residual_tilde(u1, u2, p, rep));
        gauge_t = std::max(gauge_t, gauge_transfer_defect(u1, p, rep));
        comm = std::max(comm, commutator(transfer(u1, p, rep), transfer(u2, p, rep)).max_abs());
    }
    add("classical_yang_baxter", cybe, tol.structure);
    add("r21_swap_consistency", r21, tol.structure);
    add("reflection_K", refl_k, tol.structure);
    add("reflection_c", refl_c, tol.structure);
    add("reflection_K_plus_c", refl_kc, tol.structure);
    add("reflection_tilde", refl_t, tol.structure);
    add("gauge_transfer_invariance", gauge_t, tol.structure);
    add("transfer_commutativity", comm, tol.structure);
    add("transfer_at_zero", transfer(0.0, p, rep).max_abs(), 1e-12);
    add("heun_from_transfer_derivative", max_abs_diff(heun_from_transfer(p, rep), build_w(p, rep)), 1e-8);

    // actions of the gauge blocks on the weight vectors
    const RepScalars sc(p);
    const WeightVectors wv = weight_vectors(p, rep);
    double act_a = 0, act_d = 0, act_ab = 0, act_db = 0, act_c = 0, act_b = 0, act_j3 = 0, exch = 0;
    for (int i = 0; i < std::max(1, points / 10); ++i) {
        const cplx u = random_spectral_point(rng, p);
        const cplx v = random_spectral_point(rng, p, {u});
        const GaugeBlocks g = gauge_blocks(u, p, rep);
        act_a = std::max(act_a, norm(axpy(-sc.alpha(u), wv.highest, g.A * wv.highest)));
        act_d = std::max(act_d, norm(axpy(-sc.delta(u), wv.highest, g.D * wv.highest)));
        act_ab = std::max(act_ab, norm(axpy(-sc.alpha_bar(u), wv.lowest, g.A * wv.lowest)));
        act_db = std::max(act_db, norm(axpy(-sc.delta_bar(u), wv.lowest, g.D * wv.lowest)));
        act_j3 = std::max(act_j3, norm(axpy(-sc.alpha(u), rep.highest, g.A * rep.highest)));
        for (int n = -2; n <= 3; ++n) {
            act_c = std::max(act_c,
                             norm(axpy(-u * sc.gamma(n), wv.highest, shifted_c(u, n, p, rep) * wv.highest)));
            act_b = std::max(act_b,
                             norm(axpy(-sc.beta(n) / u, wv.lowest, shifted_b(u, n, p, rep) * wv.lowest)));
            exch = std::max(exch, max_abs_diff(shifted_b(u, n, p, rep) * shifted_b(v, n + 1, p, rep),
                                               shifted_b(v, n, p, rep) * shifted_b(u, n + 1, p, rep)));
        }
    }
    add("tilde_A_on_highest", act_a, tol.structure);
    add("tilde_D_on_highest", act_d, tol.structure);
    add("tilde_A_on_lowest", act_ab, tol.structure);
    add("tilde_D_on_lowest", act_db, tol.structure);
    add("shifted_C_on_highest", act_c, tol.structure);
    add("shifted_B_on_lowest", act_b, tol.structure);
    add("shifted_B_exchange", exch, tol.structure);
    add("tilde_A_on_j3_highest", act_j3, tol.structure, true);
    rep_out.weight_vector_choice = act_a <= act_j3 ? "tilde_j3_eigenvector" : "j3_highest_weight";

    const NaiveTildeDiagnostic pd = naive_tilde_diagnostic(p, rep);
    add("naive_tilde_triple_su2_defect", pd.su2_defect, tol.structure, true);
    add("naive_tilde_j3_nilpotency", pd.j3_nilpotency, tol.structure, true);
    add("derived_tilde_j3_weight_defect", pd.derived_eigen_defect, tol.structure);
    return rep_out;
}

}  // namespace heun
