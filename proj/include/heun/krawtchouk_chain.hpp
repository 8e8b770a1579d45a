#pragma once

#include <string>
#include <vector>

#include "heun/bethe_solver.hpp"
#include "heun/heun_operators.hpp"
#include "heun/linalg.hpp"
#include "heun/spin_rep.hpp"

namespace heun {

// Free fermions on 2s+1 sites, Fermi index K, subsystem {0..ell}.
struct ChainSpec {
    Spin spin;
    double theta = 0.0;
    int K = 0;
    int ell = 0;

    ChainSpec(Spin s, double theta, int K, int ell);
    double mu() const { return spin.two_s - 2.0 * K - 1.0; }
    double nu() const { return 2.0 * ell + 1.0 - spin.two_s; }
};

// 2F1(-n, -x; -N; 1/p)
double krawtchouk_poly(int n, int x, double p, int N);

// <n|omega_k> from the Krawtchouk closed form, rows n (site), columns k (mode)
CMatrix overlap_matrix(Spin s, double theta);

CMatrix hamiltonian(const ChainSpec& spec, const SpinRep& rep);

struct CorrelationMatrices {
    CMatrix full;
    CMatrix chopped;
};
CorrelationMatrices correlation(const ChainSpec& spec);
// the same matrix summed from the Krawtchouk closed form
CMatrix correlation_krawtchouk_sum(const ChainSpec& spec);

CMatrix commuting_t(const ChainSpec& spec, const SpinRep& rep);

// P(T) is badly conditioned for long cuts, so the route runs in 100-digit arithmetic
// with C taken from the Krawtchouk closed form.
struct PTResult {
    std::vector<double> t_eigenvalues;  // restricted T
    std::vector<double> c_eigenvalues;  // P(t_i), ascending
    std::vector<double> coefficients;   // a_0 .. a_ell
    double reconstruction = 0.0;        // max |C - P(T)|
    bool fallback = false;              // degenerate T, direct diagonalization used
    std::vector<std::string> warnings;
};
PTResult spectrum_via_pt(const ChainSpec& spec);

struct Entropy {
    double value = 0.0;
    double complement = 0.0;  // from sites ell+1..2s
    std::vector<double> eigenvalues;
};
// free-fermion entropy -sum[l ln l + (1-l) ln(1-l)] of the chopped eigenvalues
double entropy_from_eigenvalues(std::vector<double> lambda, double clamp_tol = 1e-8);
Entropy entanglement_entropy(const ChainSpec& spec);

// parameters of the Heun operator W with T = sin(2 theta)(W - rho5)
HeunParams chain_heun_params(const ChainSpec& spec);

struct TBetheValue {
    double t = 0.0;
    BetheSolution solution;
    double beq_residual = 0.0;  // -1 when the roots sit on singular points
};
struct TBetheResult {
    std::vector<TBetheValue> values;  // ascending in t
    std::vector<std::string> warnings;
};
std::vector<double> beq_c_residual(const CVector& z, const ChainSpec& spec);
TBetheResult t_spectrum_via_bethe(const ChainSpec& spec);

}  // namespace heun
