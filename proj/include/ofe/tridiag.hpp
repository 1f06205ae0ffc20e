#pragma once

// Thomas solve for tridiagonal systems with a constant off-diagonal, the
// inner kernel of both propagators. No pivoting: the Cayley matrices are
// I + (dt/2) K with K symmetric (or skew after the i factor), so the
// diagonal never degenerates.

#include <complex>
#include <cstddef>
#include <vector>

namespace ofe::detail {

inline double reciprocal(double x) { return 1.0 / x; }

inline std::complex<double> reciprocal(std::complex<double> z) {
    const double s = 1.0 / (z.real() * z.real() + z.imag() * z.imag());
    return {z.real() * s, -z.imag() * s};
}

// Solves A x = rhs with A tridiagonal, diagonal diag[i] and constant
// off-diagonal off, over indices [0, n). rhs is overwritten with x.
// work must hold at least n elements.
template <class T>
void thomas_const_off(const T* diag, T off, T* rhs, T* work, std::size_t n) {
    T inv = reciprocal(diag[0]);
    work[0] = off * inv;
    rhs[0] = rhs[0] * inv;
    for (std::size_t i = 1; i < n; ++i) {
        inv = reciprocal(diag[i] - off * work[i - 1]);
        work[i] = off * inv;
        rhs[i] = (rhs[i] - off * rhs[i - 1]) * inv;
    }
    for (std::size_t i = n - 1; i-- > 0;) rhs[i] = rhs[i] - work[i] * rhs[i + 1];
}

// y = A x for the same matrix shape, used by the residual checks
template <class T>
void tridiag_apply_const_off(const T* diag, T off, const T* x, T* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        T v = diag[i] * x[i];
        if (i > 0) v += off * x[i - 1];
        if (i + 1 < n) v += off * x[i + 1];
        y[i] = v;
    }
}

} // namespace ofe::detail
