#pragma once

#include <array>
#include <vector>

#include "heun/heun_operators.hpp"
#include "heun/linalg.hpp"

namespace heun {

// W acting on polynomials of degree <= 2s, columns are images of z^k.
struct BargmannMatrix {
    CMatrix m;              // (2s+1) x (2s+1)
    CMatrix image;          // (2s+3) x (2s+1), rows 2s+1 and 2s+2 vanish
    double degree_defect;   // max |image| over the two top rows
};

BargmannMatrix bargmann_matrix(const HeunParams& p);

// Eigenvalues through the similarity with diag(sqrt(k!(2s-k)!)), which makes the matrix Hermitian.
struct BargmannEigen {
    Spectrum spectrum;
    std::vector<CVector> monomial_vectors;  // coefficients of z^0..z^2s per eigenvalue
};
BargmannEigen bargmann_eigen(const HeunParams& p, double hermitian_tol = 1e-10);
Spectrum bargmann_spectrum(const HeunParams& p, double hermitian_tol = 1e-10);

// rho1 = rho2 = 0: in y = a^2 z^2 the eigenproblem becomes a Heun equation with
// singular points 0, 1, a^2 and infinity, solved by y^sigma times a polynomial.
struct ReducedSolution {
    double sigma = 0.0;  // 0 for even, 1/2 for odd polynomials in z
    cplx q;              // accessory parameter
    cplx w;              // eigenvalue of W
    CVector p;           // polynomial in y, lowest first, p_0 = 1
    double ode_residual = 0.0;
};

struct ReducedHeun {
    std::array<cplx, 3> singularities;  // 0, 1, a^2
    std::array<cplx, 3> exponents;      // e0, e1, e2 of the first-derivative term
    cplx kappa;                          // y-coefficient of the potential numerator / 4
    std::vector<ReducedSolution> solutions;
};

ReducedHeun heun_ode_reduction(const HeunParams& p);

// residual of the reduced equation for psi(z) = sum phi_k z^k at z, relative to the term sizes
double reduced_ode_residual(const HeunParams& p, cplx w, const CVector& phi, cplx z);

}  // namespace heun
