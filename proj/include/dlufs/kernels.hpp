#pragma once

#include <cstddef>
#include <string_view>

// Data-parallel inner loops used by the dense linear algebra, the graph
// builder, and k-means. Every kernel exists as a portable scalar reference
// and, on x86-64, as an AVX2+FMA variant. The active backend is chosen once
// at startup from CPU capabilities and can be overridden with the
// DLUFS_KERNELS environment variable ("scalar", "avx2", "auto") or via
// set_backend(). SIMD and scalar variants may differ in the last few ulps
// because of reassociation; the equivalence test suite pins that gap.

namespace dlufs::kernels {

struct Backend {
    const char* name;
    double (*dot)(const double*, const double*, std::size_t);
    double (*sumsq)(const double*, std::size_t);
    double (*sqdist)(const double*, const double*, std::size_t);
    void (*axpy)(double, const double*, double*, std::size_t);
    void (*scale)(double*, double, std::size_t);
};

/// Portable reference implementation (plain loops).
const Backend& scalar_backend();

/// AVX2+FMA implementation, or nullptr when unavailable (non-x86 build or
/// CPU without AVX2/FMA support).
const Backend* avx2_backend();

/// Currently active backend.
const Backend& active_backend();

/// Select a backend by name ("scalar", "avx2", "auto"). Returns false and
/// leaves the selection unchanged if the name is unknown or the requested
/// backend is unsupported on this CPU.
bool set_backend(std::string_view name);

// Dispatching entry points.

/// sum_i a[i]*b[i]
inline double dot(const double* a, const double* b, std::size_t n) {
    return active_backend().dot(a, b, n);
}

/// sum_i x[i]^2
inline double sumsq(const double* x, std::size_t n) {
    return active_backend().sumsq(x, n);
}

/// sum_i (a[i]-b[i])^2
inline double sqdist(const double* a, const double* b, std::size_t n) {
    return active_backend().sqdist(a, b, n);
}

/// y[i] += alpha * x[i]
inline void axpy(double alpha, const double* x, double* y, std::size_t n) {
    active_backend().axpy(alpha, x, y, n);
}

/// x[i] *= alpha
inline void scale(double* x, double alpha, std::size_t n) {
    active_backend().scale(x, alpha, n);
}

}  // namespace dlufs::kernels
