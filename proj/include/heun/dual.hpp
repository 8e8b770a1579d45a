#pragma once

#include <complex>

namespace heun {

// Forward-mode first derivative over complex numbers.
struct Dual {
    std::complex<double> v, d;
    Dual(std::complex<double> value = 0.0, std::complex<double> deriv = 0.0) : v(value), d(deriv) {}
    static Dual var(std::complex<double> x) { return {x, 1.0}; }
};

inline Dual operator+(Dual a, Dual b) { return {a.v + b.v, a.d + b.d}; }
inline Dual operator-(Dual a, Dual b) { return {a.v - b.v, a.d - b.d}; }
inline Dual operator-(Dual a) { return {-a.v, -a.d}; }
inline Dual operator*(Dual a, Dual b) { return {a.v * b.v, a.d * b.v + a.v * b.d}; }
inline Dual operator/(Dual a, Dual b) { return {a.v / b.v, (a.d * b.v - a.v * b.d) / (b.v * b.v)}; }

inline std::complex<double> value_of(std::complex<double> x) { return x; }
inline std::complex<double> value_of(const Dual& x) { return x.v; }

}  // namespace heun
