#pragma once

#include "heun/linalg.hpp"

namespace heun {

struct Spin {
    int two_s = 1;

    Spin() = default;
    explicit Spin(int two_s_);
    double s() const { return 0.5 * two_s; }
    std::size_t dim() const { return static_cast<std::size_t>(two_s) + 1; }
    bool half_integer() const { return two_s % 2 == 1; }
    bool operator==(const Spin&) const = default;
};

// Basis |s,m>, m = s, s-1, ..., -s; row 0 is the highest weight.
struct SpinRep {
    Spin spin;
    CMatrix j1, j2, j3, jplus, jminus;
    CVector highest, lowest;
};

SpinRep build_spin_rep(Spin s);

// max residual of [j1,j2]=i j3 and cyclic permutations
double su2_relation_defect(const CMatrix& j1, const CMatrix& j2, const CMatrix& j3);

}  // namespace heun
