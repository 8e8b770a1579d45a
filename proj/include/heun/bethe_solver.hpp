#pragma once

#include <optional>
#include <string>
#include <vector>

#include "heun/gaudin.hpp"
#include "heun/heun_operators.hpp"
#include "heun/linalg.hpp"

namespace heun {

enum class Regime { inhom, homog_highest, homog_lowest };
std::string to_string(Regime r);

struct HeunODECoeffs {
    cplx A, a0, a1, a2, a3;
    double inhom_strength = 0.0;  // |gamma_{2s+1}|^2, zero for the homogeneous equation
    int degree = 0;
    cplx mu_scale;  // a3 (inhomogeneous) or M^2 (homogeneous)
    Regime regime = Regime::inhom;
};

// Three-term recurrence for the coefficients c_n of the polynomial solution,
//   upper(n) c_{n+1} - mid(n) c_n + lower(n) c_{n-1} = mu * mu_scale * c_n + rhs(n),
// run downward from c_N = 1, c_{N+1} = 0.
class HeunRecurrence {
public:
    explicit HeunRecurrence(HeunODECoeffs co);

    const HeunODECoeffs& coeffs() const { return co_; }
    int degree() const { return co_.degree; }
    cplx upper(int n) const;
    cplx mid(int n) const;
    cplx lower(int n) const;
    cplx rhs(int n) const;

    struct Values {
        CVector c, dc;  // c_n(mu) and d c_n / d mu, n = 0..N
        cplx P, dP;     // consistency polynomial and derivative
    };
    Values evaluate(cplx mu) const;

    // c_n as polynomials in mu, and P(mu)
    std::vector<CPolynomial> coefficient_polys() const;
    CPolynomial char_poly() const;

    // residual of the n = N+1 instance, identically zero when a3 is consistent
    double top_identity_residual() const;

    // roots of P(mu) by Aberth iteration on the recurrence itself
    CVector mu_roots() const;

    // ODE residual for the polynomial with coefficients c at X, relative to the term sizes
    double ode_residual(const CVector& c, cplx mu, cplx x) const;

private:
    HeunODECoeffs co_;
};

struct CharPoly {
    CPolynomial P;
    std::vector<CPolynomial> c;
};

HeunODECoeffs inhom_coeffs(const HeunParams& p);
HeunODECoeffs homog_coeffs(const HeunParams& p, int M, bool lowest);
std::pair<HeunODECoeffs, CharPoly> inhom_char_poly(const HeunParams& p);

struct BetheResiduals {
    // -1 marks a residual that could not be evaluated (roots on a singular point)
    double bethe_eq = 0.0;          // selected branch, corrected equation
    double bethe_eq_inverted = 0.0; // every root replaced by 1/z
    double unfactored_eq = 0.0;     // inhomogeneous equation without the (z-a)(az-1)/a factor
    double heun_eq = 0.0;           // max relative ODE residual at sample points
    double z_map = 0.0;             // max |(2 - z - 1/z)/4 - Z|
    double oracle_gap = -1.0;       // filled by callers holding an oracle; -1 means unset
};

struct BetheSolution {
    Regime regime = Regime::inhom;
    cplx mu;
    CVector c;  // polynomial coefficients, lowest first, c_N = 1
    CVector Z;
    CVector z;
    cplx sum_Z;  // -c_{N-1}
    cplx w;      // transfer-eigenvalue route
    // cross-checks
    cplx w_closed;                          // closed form in sum Z
    std::optional<cplx> w_closed_alt;       // inhomogeneous closed form with |gamma_{2s+1}|^2
    cplx w_mu_form;                         // derived mu form
    std::optional<cplx> w_mu_form_variant;  // alternative mu form, expected to disagree
    bool roots_ok = true;   // Z roots and residuals were computed
    BetheResiduals residuals;
};

struct SolveWarnings {
    std::vector<std::string> messages;
};

// Eigenvalue from the derivative of the transfer-matrix eigenvalue at u = 0.
cplx eigenvalue_w(const CVector& z, Regime regime, const HeunParams& p, double rel_tol = 1e-9);
// transfer-matrix eigenvalue itself
cplx transfer_eigenvalue(cplx u, const CVector& z, Regime regime, const HeunParams& p);

std::vector<double> bethe_residual(const CVector& z, const HeunParams& p, Regime regime);
std::vector<double> unfactored_inhom_residual(const CVector& z, const HeunParams& p);

std::vector<BetheSolution> inhom_solve(const HeunParams& p, SolveWarnings* warn = nullptr);

struct HomogeneousCondition {
    std::optional<int> M;
    double defect = 0.0;
    cplx value;
};
HomogeneousCondition homog_condition(const HeunParams& p, double tol = 1e-9);

std::vector<BetheSolution> homog_branch(const HeunParams& p, int M, bool lowest, SolveWarnings* warn = nullptr);
std::vector<BetheSolution> homog_solve(const HeunParams& p, SolveWarnings* warn = nullptr);

// W in the J3~ eigenbasis (highest weight first) and the product straddling the cut at M
CMatrix w_in_tilde_basis(const HeunParams& p, const SpinRep& rep);
double stabilization_product(const HeunParams& p, int M);

// Spectrum of W by the Bethe route; `branch` is "auto", "inhom" or "homog".
struct BetheSpectrum {
    Spectrum spectrum;
    std::vector<BetheSolution> solutions;
    std::string route;
    SolveWarnings warnings;
};
BetheSpectrum bethe_spectrum(const HeunParams& p, const std::string& branch = "auto");

struct ESpectrum {
    double r = 0.0, a = 0.0;
    std::vector<double> oracle;
    std::vector<double> e1;        // inhomogeneous route closed form
    std::vector<double> e1_transfer; // inhomogeneous route via the transfer eigenvalue
    std::vector<double> e2;        // half-integer s: homogeneous highest branch closed form + lowest branch
    bool e1_regularized = false;   // half-integer s uses rho3 = eta and extrapolates eta -> 0
    std::vector<BetheSolution> solutions;
};
ESpectrum e_spectrum(Spin s, double r);

}  // namespace heun
