#pragma once

#include <cstddef>
#include <string>

namespace lrpd::kern {

// Double-precision vector kernels behind the float-mode dense linear algebra
// (Jacobi rotations, LDLT rank-1 updates, norms). A scalar reference backend
// is always available; an AVX2+FMA backend is selected at runtime when the
// CPU supports it. Backends may differ in rounding (FMA, reassociation), so
// equivalence tests compare them to a relative tolerance, not bit-for-bit.
struct Backend {
    const char* name;
    double (*dot)(const double* x, const double* y, std::size_t n);
    double (*nrm2sq)(const double* x, std::size_t n);
    void (*axpy)(double a, const double* x, double* y, std::size_t n);
    void (*scal)(double a, double* x, std::size_t n);
    // plane rotation: (x_i, y_i) <- (c*x_i - s*y_i, s*x_i + c*y_i)
    void (*rot)(double* x, double* y, std::size_t n, double c, double s);
};

const Backend& scalar_backend();
// Selected once at startup from CPU capabilities (or LRPD_KERNEL env var).
const Backend& active();
// Test hook: "scalar", "avx2", or "auto". Returns false if unavailable.
bool force_backend(const std::string& name);
bool avx2_available();

inline double dot(const double* x, const double* y, std::size_t n) { return active().dot(x, y, n); }
inline double nrm2sq(const double* x, std::size_t n) { return active().nrm2sq(x, n); }
inline void axpy(double a, const double* x, double* y, std::size_t n) { active().axpy(a, x, y, n); }
inline void scal(double a, double* x, std::size_t n) { active().scal(a, x, n); }
inline void rot(double* x, double* y, std::size_t n, double c, double s) { active().rot(x, y, n, c, s); }

}  // namespace lrpd::kern
