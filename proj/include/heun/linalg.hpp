#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

#include "heun/errors.hpp"

namespace heun {

using cplx = std::complex<double>;
using CVector = std::vector<cplx>;

inline constexpr cplx kI{0.0, 1.0};

// Default tolerances. The CLI can override any of them.
struct ToleranceConfig {
    double hermitian = 1e-10;
    double eigen_residual = 1e-10;
    double root_polish = 1e-9;
    double structure = 1e-10;
    double bethe = 1e-7;
    double oracle = 1e-7;
    double richardson = 1e-6;
    double bargmann = 1e-8;
    double entropy_clamp = 1e-8;
};

class CMatrix {
public:
    CMatrix() = default;
    CMatrix(std::size_t rows, std::size_t cols);
    CMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries);

    static CMatrix identity(std::size_t n);
    static CMatrix diagonal(const CVector& d);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool square() const { return rows_ == cols_; }
    bool empty() const { return data_.empty(); }

    cplx& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const cplx& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
    const std::vector<cplx>& data() const { return data_; }

    CMatrix adjoint() const;
    CMatrix transpose() const;
    CMatrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const;
    void set_block(std::size_t r0, std::size_t c0, const CMatrix& b);
    CVector column(std::size_t j) const;
    void set_column(std::size_t j, const CVector& v);

    double max_abs() const;
    double frobenius() const;
    cplx trace() const;
    bool all_finite() const;

    CMatrix& operator+=(const CMatrix& o);
    CMatrix& operator-=(const CMatrix& o);
    CMatrix& operator*=(cplx s);

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<cplx> data_;
};

CMatrix operator+(CMatrix a, const CMatrix& b);
CMatrix operator-(CMatrix a, const CMatrix& b);
CMatrix operator-(CMatrix a);
CMatrix operator*(const CMatrix& a, const CMatrix& b);
CMatrix operator*(CMatrix a, cplx s);
CMatrix operator*(cplx s, CMatrix a);
CVector operator*(const CMatrix& a, const CVector& v);

CMatrix kron(const CMatrix& a, const CMatrix& b);
CMatrix commutator(const CMatrix& a, const CMatrix& b);
CMatrix anticommutator(const CMatrix& a, const CMatrix& b);
double max_abs_diff(const CMatrix& a, const CMatrix& b);
double hermitian_defect(const CMatrix& m);

double norm(const CVector& v);
cplx dot(const CVector& a, const CVector& b);  // conjugates a
CVector axpy(cplx s, const CVector& x, const CVector& y);  // s*x + y

struct EigenResult {
    std::vector<double> values;  // ascending
    CMatrix vectors;             // columns, first nonzero component real positive
};

// Cyclic Jacobi on a complex Hermitian matrix.
EigenResult hermitian_eigen(const CMatrix& m, double hermitian_tol = 1e-10, int max_sweeps = 100);

CVector lu_solve(const CMatrix& a, const CVector& b);
CMatrix inverse(const CMatrix& a);

class CPolynomial {
public:
    CPolynomial() = default;
    explicit CPolynomial(std::vector<cplx> coeffs);  // lowest degree first

    static CPolynomial from_roots(const CVector& roots);

    const std::vector<cplx>& coeffs() const { return c_; }
    bool is_zero() const { return c_.empty(); }
    int degree() const { return static_cast<int>(c_.size()) - 1; }
    cplx operator()(cplx x) const;
    CPolynomial derivative() const;
    double max_coeff() const;

    friend CPolynomial operator+(const CPolynomial& a, const CPolynomial& b);
    friend CPolynomial operator-(const CPolynomial& a, const CPolynomial& b);
    friend CPolynomial operator*(const CPolynomial& a, const CPolynomial& b);
    friend CPolynomial operator*(cplx s, const CPolynomial& a);

private:
    void trim();
    std::vector<cplx> c_;
};

// value and first derivative at a point
using Evaluator = std::function<std::pair<cplx, cplx>(cplx)>;

// Simultaneous Aberth-Ehrlich iteration for n roots of f.
CVector aberth(const Evaluator& f, std::size_t n, CVector init, int max_iter = 1000, double tol = 1e-15);

CVector circle_seeds(std::size_t n, double radius, cplx center = 0.0);

// Roots with multiplicity, sorted by (re, im).
CVector poly_roots(const CPolynomial& p, double polish_tol = 1e-9);

void sort_canonical(CVector& v);
std::vector<double> sorted(std::vector<double> v);

double binomial(int n, int k);
double max_sorted_gap(std::vector<double> a, std::vector<double> b);

}  // namespace heun
