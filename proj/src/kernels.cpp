#include "lrpd/kernels.hpp"

#include <atomic>
#include <cstdlib>

namespace lrpd::kern {

namespace {

double dot_scalar(const double* x, const double* y, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
    return s;
}

double nrm2sq_scalar(const double* x, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i] * x[i];
    return s;
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void scal_scalar(double a, double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

void rot_scalar(double* x, double* y, std::size_t n, double c, double s) {
    for (std::size_t i = 0; i < n; ++i) {
        double xi = x[i], yi = y[i];
        x[i] = c * xi - s * yi;
        y[i] = s * xi + c * yi;
    }
}

const Backend kScalar = {"scalar", dot_scalar, nrm2sq_scalar, axpy_scalar, scal_scalar, rot_scalar};

}  // namespace

const Backend& scalar_backend() { return kScalar; }

#if defined(__x86_64__) || defined(_M_X64)
const Backend& avx2_backend();  // kernels_avx2.cpp

bool avx2_available() {
#if defined(__GNUC__)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}
#else
bool avx2_available() { return false; }
#endif

namespace {

const Backend* select_default() {
    if (const char* env = std::getenv("LRPD_KERNEL")) {
        std::string v(env);
        if (v == "scalar") return &kScalar;
    }
#if defined(__x86_64__) || defined(_M_X64)
    if (avx2_available()) return &avx2_backend();
#endif
    return &kScalar;
}

std::atomic<const Backend*> g_active{nullptr};

const Backend* active_ptr() {
    const Backend* b = g_active.load(std::memory_order_acquire);
    if (!b) {
        b = select_default();
        g_active.store(b, std::memory_order_release);
    }
    return b;
}

}  // namespace

const Backend& active() { return *active_ptr(); }

bool force_backend(const std::string& name) {
    if (name == "scalar") {
        g_active.store(&kScalar, std::memory_order_release);
        return true;
    }
#if defined(__x86_64__) || defined(_M_X64)
    if (name == "avx2") {
        if (!avx2_available()) return false;
        g_active.store(&avx2_backend(), std::memory_order_release);
        return true;
    }
#endif
    if (name == "auto") {
        g_active.store(select_default(), std::memory_order_release);
        return true;
    }
    return false;
}

}  // namespace lrpd::kern
