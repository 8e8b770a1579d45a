#include "heun/krawtchouk_chain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/multiprecision/cpp_bin_float.hpp>

namespace heun {

ChainSpec::ChainSpec(Spin s, double th, int k, int l) : spin(s), theta(th), K(k), ell(l) {
    if (!std::isfinite(theta)) throw InvalidArgument("theta must be finite");
    if (K < 0 || K > spin.two_s) throw IndexOutOfRange("Fermi index outside 0..2s");
    if (ell < 0 || ell > spin.two_s) throw IndexOutOfRange("cut outside 0..2s");
}

namespace {

using Real = boost::multiprecision::cpp_bin_float_100;

Real krawtchouk_precise(int n, int x, const Real& p, int N) {
    Real total = 0, term = 1;
    for (int k = 1; k <= n; ++k) {
        term *= Real((-n + k - 1) * (-x + k - 1)) / Real((-N + k - 1) * k) / p;
        total += term;
    }
    return total + 1;
}

void require_generic_angle(double theta) {
    const double sn = std::sin(theta), cs = std::cos(theta);
    if (std::abs(sn) < 1e-12 || std::abs(cs) < 1e-12)
        throw ParameterOutOfRange("the Krawtchouk closed form needs sin(theta) and cos(theta) nonzero");
}

}  // namespace

// the alternating sum cancels badly for large N, so it is accumulated in extended precision
double krawtchouk_poly(int n, int x, double p, int N) {
    if (n < 0 || n > N) throw ParameterOutOfRange("degree outside 0..N");
    if (!(p > 0.0 && p < 1.0)) throw ParameterOutOfRange("p must lie in (0, 1)");
    return static_cast<double>(krawtchouk_precise(n, x, Real(p), N));
}

CMatrix overlap_matrix(Spin s, double theta) {
    require_generic_angle(theta);
    const int N = s.two_s;
    const double sn = std::sin(theta), cot = std::abs(std::cos(theta) / sn);
    const std::size_t d = s.dim();
    CMatrix u(d, d);
    for (int n = 0; n <= N; ++n)
        for (int k = 0; k <= N; ++k)
            u(static_cast<std::size_t>(n), static_cast<std::size_t>(k)) =
                std::sqrt(binomial(N, n) * binomial(N, N - k)) * std::pow(sn, N) * std::pow(cot, k - n) *
                krawtchouk_poly(n, N - k, sn * sn, N);
    return u;
}

CMatrix hamiltonian(const ChainSpec& spec, const SpinRep& rep) {
    if (rep.spin.two_s != spec.spin.two_s) throw SpinMismatch("representation and chain disagree on s");
    return std::cos(2.0 * spec.theta) * rep.j3 + std::sin(2.0 * spec.theta) * rep.j1;
}

CorrelationMatrices correlation(const ChainSpec& spec) {
    const auto rep = build_spin_rep(spec.spin);
    const EigenResult er = hermitian_eigen(hamiltonian(spec, rep));
    const std::size_t d = spec.spin.dim();
    CMatrix full(d, d);
    for (int k = 0; k <= spec.K; ++k) {
        const CVector v = er.vectors.column(static_cast<std::size_t>(k));
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j) full(i, j) += v[i] * std::conj(v[j]);
    }
    const auto l = static_cast<std::size_t>(spec.ell) + 1;
    return {full, full.block(0, 0, l, l)};
}

CMatrix correlation_krawtchouk_sum(const ChainSpec& spec) {
    require_generic_angle(spec.theta);
    const int N = spec.spin.two_s;
    const double sn = std::sin(spec.theta), p = sn * sn, cot = std::abs(std::cos(spec.theta) / sn);
    const std::size_t d = spec.spin.dim();
    CMatrix c(d, d);
    for (int m = 0; m <= N; ++m)
        for (int n = 0; n <= N; ++n) {
            double sum = 0.0;
            for (int k = 0; k <= spec.K; ++k)
                sum += binomial(N, k) * std::pow(cot, 2 * k - n - m) * krawtchouk_poly(m, N - k, p, N) *
                       krawtchouk_poly(n, N - k, p, N);
            c(static_cast<std::size_t>(m), static_cast<std::size_t>(n)) =
                std::sqrt(binomial(N, n) * binomial(N, m)) * std::pow(p, N) * sum;
        }
    return c;
}

CMatrix commuting_t(const ChainSpec& spec, const SpinRep& rep) {
    const CMatrix h = hamiltonian(spec, rep);
    return anticommutator(h, rep.j3) + spec.mu() * rep.j3 + spec.nu() * h;
}

namespace {

// Chain data in extended precision: restricted T (diagonal, superdiagonal) and
// the chopped correlation matrix summed from the Krawtchouk closed form.
struct PreciseChain {
    std::vector<Real> diag, off;
    std::vector<std::vector<Real>> c;
};

PreciseChain precise_chain(const ChainSpec& spec) {
    const int N = spec.spin.two_s, l = spec.ell;
    const Real th = spec.theta;
    const Real sn = sin(th), cs = cos(th), s2 = sin(2 * th), c2 = cos(2 * th);
    const Real p = sn * sn, cot = abs(cs / sn), s = Real(N) / 2;
    const Real mu = spec.mu(), nu = spec.nu();
    PreciseChain pc;
    for (int n = 0; n <= l; ++n) {
        const Real m = s - n;
        pc.diag.push_back(2 * c2 * m * m + mu * m + nu * c2 * m);
        if (n < l) {
            const Real m1 = m - 1;
            pc.off.push_back(s2 / 2 * sqrt((s - m1) * (s + m1 + 1)) * (m + m1 + nu));
        }
    }
    std::vector<std::vector<Real>> u(static_cast<std::size_t>(l) + 1);
    for (int n = 0; n <= l; ++n)
        for (int k = 0; k <= spec.K; ++k)
            u[static_cast<std::size_t>(n)].push_back(sqrt(Real(binomial(N, n)) * Real(binomial(N, k))) * pow(sn, N) *
                                                     pow(cot, k - n) * krawtchouk_precise(n, N - k, p, N));
    pc.c.assign(u.size(), std::vector<Real>(u.size(), Real(0)));
    for (std::size_t i = 0; i < u.size(); ++i)
        for (std::size_t j = 0; j < u.size(); ++j)
            for (std::size_t k = 0; k < u[i].size(); ++k) pc.c[i][j] += u[i][k] * u[j][k];
    return pc;
}

// number of eigenvalues of the symmetric tridiagonal matrix below x
int sturm_count(const PreciseChain& pc, const Real& x) {
    int count = 0;
    Real d = 1;
    for (std::size_t i = 0; i < pc.diag.size(); ++i) {
        const Real off2 = i == 0 ? Real(0) : pc.off[i - 1] * pc.off[i - 1];
        d = pc.diag[i] - x - (i == 0 ? Real(0) : off2 / d);
        if (d == 0) d = std::numeric_limits<Real>::epsilon();
        if (d < 0) ++count;
    }
    return count;
}

std::vector<Real> tridiagonal_eigenvalues(const PreciseChain& pc) {
    Real lo = 0, hi = 0;
    for (std::size_t i = 0; i < pc.diag.size(); ++i) {
        Real r = 0;
        if (i > 0) r += abs(pc.off[i - 1]);
        if (i < pc.off.size()) r += abs(pc.off[i]);
        lo = i == 0 ? pc.diag[i] - r : std::min(lo, Real(pc.diag[i] - r));
        hi = i == 0 ? pc.diag[i] + r : std::max(hi, Real(pc.diag[i] + r));
    }
    const Real tol = std::numeric_limits<Real>::epsilon() * 64 * (abs(lo) + abs(hi) + 1);
    std::vector<Real> out;
    for (int k = 0; k < static_cast<int>(pc.diag.size()); ++k) {
        Real a = lo, b = hi;
        while (b - a > tol) {
            const Real mid = (a + b) / 2;
            if (sturm_count(pc, mid) > k) b = mid;
            else a = mid;
        }
        out.push_back((a + b) / 2);
    }
    return out;
}

}  // namespace

PTResult spectrum_via_pt(const ChainSpec& spec) {
    const auto l = static_cast<std::size_t>(spec.ell);
    const std::size_t n = l + 1;
    const PreciseChain pc = precise_chain(spec);
    PTResult out;

    // (T^r)_0r is the product of the first r superdiagonal entries
    Real tscale = 1;
    for (const auto& d : pc.diag) tscale = std::max(tscale, Real(abs(d)));
    for (std::size_t j = 0; j < l; ++j)
        if (abs(pc.off[j]) <= 1e-14 * tscale)
            throw ZeroPivot("(T^" + std::to_string(j + 1) + ")_{0," + std::to_string(j + 1) + "} vanishes");

    // full powers of T, needed for the reconstruction check
    std::vector<std::vector<std::vector<Real>>> pw;
    pw.push_back(std::vector<std::vector<Real>>(n, std::vector<Real>(n, Real(0))));
    for (std::size_t i = 0; i < n; ++i) pw[0][i][i] = 1;
    for (std::size_t j = 1; j <= l; ++j) {
        const auto& prev = pw.back();
        std::vector<std::vector<Real>> next(n, std::vector<Real>(n, Real(0)));
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = 0; c < n; ++c) {
                // multiply by the tridiagonal T on the right
                Real v = prev[r][c] * pc.diag[c];
                if (c > 0) v += prev[r][c - 1] * pc.off[c - 1];
                if (c + 1 < n) v += prev[r][c + 1] * pc.off[c];
                next[r][c] = v;
            }
        pw.push_back(std::move(next));
    }

    // a_l = C_0l / (T^l)_0l, then downward
    std::vector<Real> a(n, Real(0));
    for (std::size_t j = 0; j <= l; ++j) {
        const std::size_t r = l - j;
        Real acc = pc.c[0][r];
        for (std::size_t q = 0; q < j; ++q) acc -= a[l - q] * pw[l - q][0][r];
        a[r] = acc / pw[r][0][r];
    }
    for (const auto& x : a) out.coefficients.push_back(static_cast<double>(x));

    Real recon = 0;
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) {
            Real v = -pc.c[r][c];
            for (std::size_t j = 0; j <= l; ++j) v += a[j] * pw[j][r][c];
            recon = std::max(recon, Real(abs(v)));
        }
    out.reconstruction = static_cast<double>(recon);

    const std::vector<Real> ts = tridiagonal_eigenvalues(pc);
    for (const auto& t : ts) out.t_eigenvalues.push_back(static_cast<double>(t));
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < n; ++i) gap = std::min(gap, out.t_eigenvalues[i] - out.t_eigenvalues[i - 1]);
    if (gap < 1e-9) {
        out.fallback = true;
        out.warnings.push_back("DegenerateT: restricted T has a near-degenerate spectrum, chopped C diagonalized directly");
        out.c_eigenvalues = hermitian_eigen(correlation(spec).chopped).values;
        return out;
    }
    for (const auto& t : ts) {
        Real v = 0;
        for (std::size_t j = n; j-- > 0;) v = v * t + a[j];
        out.c_eigenvalues.push_back(static_cast<double>(v));
    }
    std::sort(out.c_eigenvalues.begin(), out.c_eigenvalues.end());
    return out;
}

double entropy_from_eigenvalues(std::vector<double> lambda, double clamp_tol) {
    double s = 0.0;
    for (double& x : lambda) {
        if (x < -clamp_tol || x > 1.0 + clamp_tol)
            throw SpectrumOutOfRange("correlation eigenvalue " + std::to_string(x) + " outside [0, 1]");
        x = std::clamp(x, 0.0, 1.0);
        if (x > 0.0) s -= x * std::log(x);
        if (x < 1.0) s -= (1.0 - x) * std::log(1.0 - x);
    }
    return s;
}

Entropy entanglement_entropy(const ChainSpec& spec) {
    const CorrelationMatrices cm = correlation(spec);
    Entropy e;
    e.eigenvalues = hermitian_eigen(cm.chopped).values;
    e.value = entropy_from_eigenvalues(e.eigenvalues);
    const std::size_t d = spec.spin.dim(), cut = static_cast<std::size_t>(spec.ell) + 1;
    if (cut < d) e.complement = entropy_from_eigenvalues(hermitian_eigen(cm.full.block(cut, cut, d - cut, d - cut)).values);
    return e;
}

HeunParams chain_heun_params(const ChainSpec& spec) {
    const double th2 = 2.0 * spec.theta;
    if (std::abs(std::sin(th2)) < 1e-12) throw ParameterOutOfRange("sin(2 theta) must be nonzero");
    const double mu = spec.mu(), nu = spec.nu();
    return HeunParams::from_phase(spec.spin, th2, mu * std::cos(th2) / std::sin(th2) + nu / std::sin(th2), mu, 0.0);
}

std::vector<double> beq_c_residual(const CVector& z, const ChainSpec& spec) {
    const cplx a = std::polar(1.0, 2.0 * spec.theta);
    const double s = spec.spin.s(), mu = spec.mu(), nu = spec.nu();
    std::vector<double> out;
    for (std::size_t k = 0; k < z.size(); ++k) {
        const cplx zk = z[k];
        if (std::abs(zk * zk - 1.0) < 1e-10 || std::abs(a * zk - 1.0) < 1e-10 || std::abs(a - zk) < 1e-10)
            throw SingularConfiguration("root " + std::to_string(k) + " sits on a singular point");
        cplx v = a * s * (zk * zk - 1.0) / ((a * zk - 1.0) * (a - zk)) +
                 ((zk * zk + 1.0) * (1.0 - nu / 2.0) - mu * zk) / (zk * zk - 1.0);
        for (std::size_t q = 0; q < z.size(); ++q) {
            if (q == k) continue;
            const cplx den = (zk - z[q]) * (zk * z[q] - 1.0);
            if (std::abs(den) < 1e-14) throw SingularConfiguration("coinciding roots");
            v += z[q] * (zk * zk - 1.0) / den;
        }
        out.push_back(std::abs(v));
    }
    return out;
}

TBetheResult t_spectrum_via_bethe(const ChainSpec& spec) {
    const HeunParams p = chain_heun_params(spec);
    const double s = spec.spin.s(), mu = spec.mu(), nu = spec.nu();
    TBetheResult out;
    SolveWarnings warn;
    const auto sols = homog_branch(p, spec.ell, true, &warn);
    for (const auto& sol : sols) {
        TBetheValue v;
        v.solution = sol;
        v.t = (s * std::cos(2.0 * spec.theta) + mu / 2.0 - mu * nu / 2.0 - 0.5 * (2.0 * spec.ell - 4.0 * sol.sum_Z)).real();
        if (sol.roots_ok) {
            try {
                const auto r1 = beq_c_residual(sol.z, spec);
                double best = r1.empty() ? 0.0 : *std::max_element(r1.begin(), r1.end());
                CVector inv(sol.z.size());
                for (std::size_t k = 0; k < inv.size(); ++k) inv[k] = 1.0 / sol.z[k];
                const auto r2 = beq_c_residual(inv, spec);
                if (!r2.empty()) best = std::min(best, *std::max_element(r2.begin(), r2.end()));
                v.beq_residual = best;
            } catch (const SingularConfiguration& e) {
                v.beq_residual = -1.0;
                out.warnings.push_back(std::string("Bethe residual not evaluable: ") + e.what());
            }
        } else {
            v.beq_residual = -1.0;
        }
        out.values.push_back(v);
    }
    for (auto& m : warn.messages) out.warnings.push_back(m);
    std::sort(out.values.begin(), out.values.end(), [](const TBetheValue& x, const TBetheValue& y) { return x.t < y.t; });
    return out;
}

}  // namespace heun
