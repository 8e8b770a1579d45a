#include "heun/spin_rep.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace heun {

Spin::Spin(int two_s_) : two_s(two_s_) {
    if (two_s_ < 0) throw InvalidArgument("two_s must be non-negative, got " + std::to_string(two_s_));
}

SpinRep build_spin_rep(Spin sp) {
    const std::size_t d = sp.dim();
    const double s = sp.s();
    SpinRep r;
    r.spin = sp;
    r.jplus = CMatrix(d, d);
    r.j3 = CMatrix(d, d);
    for (std::size_t k = 0; k < d; ++k) {
        const double m = s - static_cast<double>(k);
        r.j3(k, k) = m;
        if (k > 0) r.jplus(k - 1, k) = std::sqrt((s - m) * (s + m + 1.0));
    }
    r.jminus = r.jplus.adjoint();
    r.j1 = 0.5 * (r.jplus + r.jminus);
    r.j2 = cplx(0.0, -0.5) * (r.jplus - r.jminus);
    r.highest = CVector(d);
    r.lowest = CVector(d);
    r.highest.front() = 1.0;
    r.lowest.back() = 1.0;
    return r;
}

double su2_relation_defect(const CMatrix& j1, const CMatrix& j2, const CMatrix& j3) {
    return std::max({max_abs_diff(commutator(j1, j2), kI * j3), max_abs_diff(commutator(j2, j3), kI * j1),
                     max_abs_diff(commutator(j3, j1), kI * j2)});
}

}  // namespace heun
