#include "heun/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace heun {

namespace {

void check_same_shape(const CMatrix& a, const CMatrix& b, const char* what) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw DimensionMismatch(std::string(what) + ": " + std::to_string(a.rows()) + "x" +
                                std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                                std::to_string(b.cols()));
}

bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

}  // namespace

CMatrix::CMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

CMatrix::CMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
    if (data_.size() != rows_ * cols_)
        throw DimensionMismatch("entry count " + std::to_string(data_.size()) + " for " +
                                std::to_string(rows_) + "x" + std::to_string(cols_));
    if (!all_finite()) throw NonFinite("matrix entries must be finite");
}

CMatrix CMatrix::identity(std::size_t n) {
    CMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

CMatrix CMatrix::diagonal(const CVector& d) {
    CMatrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
}

CMatrix CMatrix::adjoint() const {
    CMatrix r(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) r(j, i) = std::conj((*this)(i, j));
    return r;
}

CMatrix CMatrix::transpose() const {
    CMatrix r(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j);
    return r;
}

CMatrix CMatrix::block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
    if (r0 + nr > rows_ || c0 + nc > cols_) throw DimensionMismatch("block out of range");
    CMatrix b(nr, nc);
    for (std::size_t i = 0; i < nr; ++i)
        for (std::size_t j = 0; j < nc; ++j) b(i, j) = (*this)(r0 + i, c0 + j);
    return b;
}

void CMatrix::set_block(std::size_t r0, std::size_t c0, const CMatrix& b) {
    if (r0 + b.rows() > rows_ || c0 + b.cols() > cols_) throw DimensionMismatch("set_block out of range");
    for (std::size_t i = 0; i < b.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) (*this)(r0 + i, c0 + j) = b(i, j);
}

CVector CMatrix::column(std::size_t j) const {
    CVector v(rows_);
    for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
    return v;
}

void CMatrix::set_column(std::size_t j, const CVector& v) {
    if (v.size() != rows_) throw DimensionMismatch("set_column");
    for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = v[i];
}

double CMatrix::max_abs() const {
    double m = 0.0;
    for (const auto& z : data_) m = std::max(m, std::abs(z));
    return m;
}

double CMatrix::frobenius() const {
    double s = 0.0;
    for (const auto& z : data_) s += std::norm(z);
    return std::sqrt(s);
}

cplx CMatrix::trace() const {
    if (!square()) throw DimensionMismatch("trace of non-square matrix");
    cplx t = 0.0;
    for (std::size_t i = 0; i < rows_; ++i) t += (*this)(i, i);
    return t;
}

bool CMatrix::all_finite() const {
    return std::all_of(data_.begin(), data_.end(), finite);
}

CMatrix& CMatrix::operator+=(const CMatrix& o) {
    check_same_shape(*this, o, "operator+");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
}

CMatrix& CMatrix::operator-=(const CMatrix& o) {
    check_same_shape(*this, o, "operator-");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
}

CMatrix& CMatrix::operator*=(cplx s) {
    for (auto& z : data_) z *= s;
    return *this;
}

CMatrix operator+(CMatrix a, const CMatrix& b) { return a += b; }
CMatrix operator-(CMatrix a, const CMatrix& b) { return a -= b; }
CMatrix operator-(CMatrix a) { return a *= -1.0; }
CMatrix operator*(CMatrix a, cplx s) { return a *= s; }
CMatrix operator*(cplx s, CMatrix a) { return a *= s; }

CMatrix operator*(const CMatrix& a, const CMatrix& b) {
    if (a.cols() != b.rows()) throw DimensionMismatch("matrix product");
    CMatrix r(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const cplx aik = a(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) r(i, j) += aik * b(k, j);
        }
    return r;
}

CVector operator*(const CMatrix& a, const CVector& v) {
    if (a.cols() != v.size()) throw DimensionMismatch("matrix-vector product");
    CVector r(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) r[i] += a(i, j) * v[j];
    return r;
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
    CMatrix r(a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) {
            const cplx aij = a(i, j);
            if (aij == 0.0) continue;
            for (std::size_t k = 0; k < b.rows(); ++k)
                for (std::size_t l = 0; l < b.cols(); ++l)
                    r(i * b.rows() + k, j * b.cols() + l) = aij * b(k, l);
        }
    return r;
}

CMatrix commutator(const CMatrix& a, const CMatrix& b) {
    if (!a.square() || !b.square() || a.rows() != b.rows()) throw DimensionMismatch("commutator");
    return a * b - b * a;
}

CMatrix anticommutator(const CMatrix& a, const CMatrix& b) {
    if (!a.square() || !b.square() || a.rows() != b.rows()) throw DimensionMismatch("anticommutator");
    return a * b + b * a;
}

double max_abs_diff(const CMatrix& a, const CMatrix& b) {
    check_same_shape(a, b, "max_abs_diff");
    double m = 0.0;
    for (std::size_t k = 0; k < a.data().size(); ++k) m = std::max(m, std::abs(a.data()[k] - b.data()[k]));
    return m;
}

double hermitian_defect(const CMatrix& m) {
    if (!m.square()) throw DimensionMismatch("hermitian_defect on non-square matrix");
    double d = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = i; j < m.cols(); ++j) d = std::max(d, std::abs(m(i, j) - std::conj(m(j, i))));
    return d;
}

double norm(const CVector& v) {
    double s = 0.0;
    for (const auto& z : v) s += std::norm(z);
    return std::sqrt(s);
}

cplx dot(const CVector& a, const CVector& b) {
    if (a.size() != b.size()) throw DimensionMismatch("dot");
    cplx s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

CVector axpy(cplx s, const CVector& x, const CVector& y) {
    if (x.size() != y.size()) throw DimensionMismatch("axpy");
    CVector r(y);
    for (std::size_t i = 0; i < x.size(); ++i) r[i] += s * x[i];
    return r;
}

EigenResult hermitian_eigen(const CMatrix& m, double hermitian_tol, int max_sweeps) {
    if (!m.square()) throw DimensionMismatch("hermitian_eigen needs a square matrix");
    if (!m.all_finite()) throw NonFinite("hermitian_eigen input");
    const std::size_t n = m.rows();
    const double scale = std::max(1.0, m.max_abs());
    const double defect = hermitian_defect(m);
    if (defect > hermitian_tol * scale)
        throw NotHermitian("max|M - M^H| = " + std::to_string(defect));

    CMatrix a = m;
    for (std::size_t i = 0; i < n; ++i) {
        a(i, i) = a(i, i).real();
        for (std::size_t j = i + 1; j < n; ++j) {
            const cplx avg = 0.5 * (a(i, j) + std::conj(a(j, i)));
            a(i, j) = avg;
            a(j, i) = std::conj(avg);
        }
    }
    CMatrix v = CMatrix::identity(n);
    const double eps = std::numeric_limits<double>::epsilon();
    const double frob = a.frobenius();

    auto off_norm = [&] {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) s += 2.0 * std::norm(a(i, j));
        return std::sqrt(s);
    };

    bool converged = n <= 1 || frob == 0.0;
    for (int sweep = 0; sweep < max_sweeps && !converged; ++sweep) {
        for (std::size_t p = 0; p + 1 < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                const cplx b = a(p, q);
                const double beta = std::abs(b);
                if (beta <= eps * eps * frob) continue;
                const cplx ph = b / beta;  // e^{i phi}
                const double app = a(p, p).real(), aqq = a(q, q).real();
                const double theta = (aqq - app) / (2.0 * beta);
                double t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                if (theta < 0) t = -t;
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                // J_pp = c, J_pq = s, J_qp = -s e^{-i phi}, J_qq = c e^{-i phi}
                const cplx jpp = c, jpq = s, jqp = -s * std::conj(ph), jqq = c * std::conj(ph);
                for (std::size_t k = 0; k < n; ++k) {  // A <- A J
                    const cplx akp = a(k, p), akq = a(k, q);
                    a(k, p) = akp * jpp + akq * jqp;
                    a(k, q) = akp * jpq + akq * jqq;
                    const cplx vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = vkp * jpp + vkq * jqp;
                    v(k, q) = vkp * jpq + vkq * jqq;
                }
                for (std::size_t k = 0; k < n; ++k) {  // A <- J^H A
                    const cplx apk = a(p, k), aqk = a(q, k);
                    a(p, k) = std::conj(jpp) * apk + std::conj(jqp) * aqk;
                    a(q, k) = std::conj(jpq) * apk + std::conj(jqq) * aqk;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                a(p, p) = a(p, p).real();
                a(q, q) = a(q, q).real();
            }
        converged = off_norm() <= static_cast<double>(n) * eps * frob;
    }
    if (!converged) throw NoConvergence("Jacobi sweep cap reached, off-norm " + std::to_string(off_norm()));

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return a(i, i).real() < a(j, j).real(); });

    EigenResult r;
    r.values.resize(n);
    r.vectors = CMatrix(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        r.values[k] = a(order[k], order[k]).real();
        CVector col = v.column(order[k]);
        double big = 0.0;
        for (const auto& z : col) big = std::max(big, std::abs(z));
        for (const auto& z : col)
            if (std::abs(z) > 1e-12 * big) {
                const cplx ph = std::conj(z) / std::abs(z);
                for (auto& w : col) w *= ph;
                break;
            }
        r.vectors.set_column(k, col);
    }
    return r;
}

CVector lu_solve(const CMatrix& a, const CVector& b) {
    if (!a.square() || a.rows() != b.size()) throw DimensionMismatch("lu_solve");
    const std::size_t n = a.rows();
    CMatrix m = a;
    CVector x = b;
    const double scale = std::max(m.max_abs(), 1e-300);
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(m(i, k)) > std::abs(m(piv, k))) piv = i;
        if (std::abs(m(piv, k)) <= 1e-300 * scale || std::abs(m(piv, k)) == 0.0)
            throw SingularMatrix("zero pivot at column " + std::to_string(k));
        if (piv != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(m(k, j), m(piv, j));
            std::swap(x[k], x[piv]);
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            const cplx f = m(i, k) / m(k, k);
            if (f == 0.0) continue;
            for (std::size_t j = k; j < n; ++j) m(i, j) -= f * m(k, j);
            x[i] -= f * x[k];
        }
    }
    for (std::size_t k = n; k-- > 0;) {
        cplx s = x[k];
        for (std::size_t j = k + 1; j < n; ++j) s -= m(k, j) * x[j];
        x[k] = s / m(k, k);
    }
    return x;
}

CMatrix inverse(const CMatrix& a) {
    if (!a.square()) throw DimensionMismatch("inverse");
    const std::size_t n = a.rows();
    CMatrix r(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        CVector e(n);
        e[j] = 1.0;
        r.set_column(j, lu_solve(a, e));
    }
    return r;
}

CPolynomial::CPolynomial(std::vector<cplx> coeffs) : c_(std::move(coeffs)) {
    if (!std::all_of(c_.begin(), c_.end(), finite)) throw NonFinite("polynomial coefficients");
    trim();
}

void CPolynomial::trim() {
    while (!c_.empty() && c_.back() == 0.0) c_.pop_back();
}

CPolynomial CPolynomial::from_roots(const CVector& roots) {
    std::vector<cplx> c{1.0};
    for (const auto& r : roots) {
        std::vector<cplx> n(c.size() + 1);
        for (std::size_t k = 0; k < c.size(); ++k) {
            n[k + 1] += c[k];
            n[k] -= r * c[k];
        }
        c = std::move(n);
    }
    return CPolynomial(std::move(c));
}

cplx CPolynomial::operator()(cplx x) const {
    cplx s = 0.0;
    for (std::size_t k = c_.size(); k-- > 0;) s = s * x + c_[k];
    return s;
}

CPolynomial CPolynomial::derivative() const {
    if (c_.size() <= 1) return CPolynomial();
    std::vector<cplx> d(c_.size() - 1);
    for (std::size_t k = 1; k < c_.size(); ++k) d[k - 1] = static_cast<double>(k) * c_[k];
    return CPolynomial(std::move(d));
}

double CPolynomial::max_coeff() const {
    double m = 0.0;
    for (const auto& z : c_) m = std::max(m, std::abs(z));
    return m;
}

CPolynomial operator+(const CPolynomial& a, const CPolynomial& b) {
    std::vector<cplx> c(std::max(a.c_.size(), b.c_.size()));
    for (std::size_t k = 0; k < a.c_.size(); ++k) c[k] += a.c_[k];
    for (std::size_t k = 0; k < b.c_.size(); ++k) c[k] += b.c_[k];
    return CPolynomial(std::move(c));
}

CPolynomial operator-(const CPolynomial& a, const CPolynomial& b) { return a + cplx(-1.0) * b; }

CPolynomial operator*(const CPolynomial& a, const CPolynomial& b) {
    if (a.is_zero() || b.is_zero()) return CPolynomial();
    std::vector<cplx> c(a.c_.size() + b.c_.size() - 1);
    for (std::size_t i = 0; i < a.c_.size(); ++i)
        for (std::size_t j = 0; j < b.c_.size(); ++j) c[i + j] += a.c_[i] * b.c_[j];
    return CPolynomial(std::move(c));
}

CPolynomial operator*(cplx s, const CPolynomial& a) {
    std::vector<cplx> c(a.c_);
    for (auto& z : c) z *= s;
    return CPolynomial(std::move(c));
}

CVector circle_seeds(std::size_t n, double radius, cplx center) {
    CVector z(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double ang = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n) + 0.4;
        z[k] = center + radius * std::polar(1.0, ang);
    }
    return z;
}

CVector aberth(const Evaluator& f, std::size_t n, CVector z, int max_iter, double tol) {
    if (z.size() != n) throw DimensionMismatch("aberth seed count");
    if (n == 0) return z;
    double last = std::numeric_limits<double>::infinity();
    for (int it = 0; it < max_iter; ++it) {
        double worst = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const auto [v, d] = f(z[i]);
            if (v == 0.0) continue;
            const cplx ratio = v / d;
            cplx sum = 0.0;
            for (std::size_t j = 0; j < n; ++j)
                if (j != i) sum += 1.0 / (z[i] - z[j]);
            const cplx step = ratio / (1.0 - ratio * sum);
            if (!finite(step)) {
                // nudge off a collision or a critical point
                z[i] += 1e-7 * std::max(1.0, std::abs(z[i])) * std::polar(1.0, 0.7 + static_cast<double>(i));
                worst = std::numeric_limits<double>::infinity();
                continue;
            }
            z[i] -= step;
            worst = std::max(worst, std::abs(step) / std::max(1.0, std::abs(z[i])));
        }
        last = worst;
        if (worst < tol) return z;
    }
    // clustered roots converge only linearly; accept a small final step
    if (last < 1e-7) return z;
    throw NoConvergence("Aberth iteration did not settle, last relative step " + std::to_string(last));
}

CVector poly_roots(const CPolynomial& p, double polish_tol) {
    if (p.is_zero()) throw ZeroPolynomial("cannot root-find the zero polynomial");
    const int deg = p.degree();
    if (deg < 1) throw ZeroPolynomial("constant polynomial has no roots");
    const auto& c = p.coeffs();
    const CPolynomial dp = p.derivative();

    // count exact zero roots separately
    std::size_t zeros = 0;
    while (c[zeros] == 0.0) ++zeros;
    const std::size_t n = static_cast<std::size_t>(deg) - zeros;
    CVector roots(zeros, 0.0);
    if (n > 0) {
        double radius = std::pow(std::abs(c[zeros] / c.back()), 1.0 / static_cast<double>(n));
        if (!(radius > 0) || !std::isfinite(radius)) radius = 1.0;
        auto ev = [&](cplx x) { return std::make_pair(p(x), dp(x)); };
        CVector r = aberth(ev, n, circle_seeds(n, radius));
        for (auto& x : r) {
            const cplx d = dp(x);
            if (d != 0.0) {
                const cplx nx = x - p(x) / d;
                if (finite(nx) && std::abs(p(nx)) <= std::abs(p(x))) x = nx;
            }
        }
        roots.insert(roots.end(), r.begin(), r.end());
    }
    const double scale = p.max_coeff();
    for (const auto& x : roots) {
        const double mag = std::pow(std::max(1.0, std::abs(x)), deg);
        if (std::abs(p(x)) > polish_tol * scale * mag)
            throw NoConvergence("root residual " + std::to_string(std::abs(p(x))) + " above tolerance");
    }
    sort_canonical(roots);
    return roots;
}

void sort_canonical(CVector& v) {
    std::sort(v.begin(), v.end(), [](cplx x, cplx y) {
        if (x.real() != y.real()) return x.real() < y.real();
        return x.imag() < y.imag();
    });
}

std::vector<double> sorted(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v;
}

double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    k = std::min(k, n - k);
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
    return r;
}

double max_sorted_gap(std::vector<double> a, std::vector<double> b) {
    if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double g = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) g = std::max(g, std::abs(a[i] - b[i]));
    return g;
}

}  // namespace heun
