#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "heun/linalg.hpp"
#include "heun/spin_rep.hpp"

namespace heun {

struct HeunParams {
    Spin spin;
    cplx a{0.0, 1.0};
    double rho1 = 0.0, rho2 = 0.0, rho3 = 0.0;
    std::optional<double> rho5_override;
    // set when a is not a pure phase; Hermiticity is then not expected
    bool expert = false;

    static HeunParams from_phase(Spin s, double phi, double r1, double r2, double r3);
    static HeunParams from_complex_a(Spin s, cplx a, double r1, double r2, double r3);

    double phi() const { return std::arg(a); }
    cplx rho4() const;
    cplx rho5_derived() const;
    cplx rho5() const;
    HeunParams with_rho5(double r5) const;
    HeunParams with_rho(double r1, double r2, double r3) const;
};

enum class Method { oracle, bethe, bargmann };
std::string to_string(Method m);

struct Spectrum {
    std::vector<double> eigenvalues;  // ascending
    Method method = Method::oracle;
};

// rho1 J1 + rho2 J2 + rho3 J3 + {J1,J2} + rho4 J1^2 + rho5 I with arbitrary complex coefficients
CMatrix build_w_general(cplx r1, cplx r2, cplx r3, cplx r4, cplx r5, const SpinRep& rep);

CMatrix build_w(const HeunParams& p, const SpinRep& rep);

// r1 [X,Y] + r2 {X,Y} + r3 X + r4 Y + r5 with X = alpha J1 + beta J2, Y = J1
CMatrix build_w_bilinear(double alpha, double beta, const std::array<double, 5>& r, const SpinRep& rep);

// The bilinear form equals scale * build_w_general(rho1, rho2, rho3, 2 cot(phi), shift / scale).
struct BilinearTranslation {
    double phi = 0.0;
    cplx rho1, rho2, rho3;
    double scale = 1.0;
    double shift = 0.0;
};
BilinearTranslation translate_bilinear(double alpha, double beta, const std::array<double, 5>& r);

CMatrix build_e(Spin s, double r, const SpinRep& rep);
// a = (1 - sqrt r)/(1 + sqrt r) relating E to the Heun operator with real a
double e_inhomogeneity(double r);

// {H, J3} + mu J3 + nu H, H = cos(2 theta) J3 + sin(2 theta) J1, mu = 2s - 2K - 1, nu = 2 ell + 1 - 2s
CMatrix build_t_kraw(Spin s, double theta, int K, int ell, const SpinRep& rep);

Spectrum oracle_spectrum(const CMatrix& m, double hermitian_tol = 1e-10);

}  // namespace heun
