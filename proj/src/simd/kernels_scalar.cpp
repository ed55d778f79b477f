#include <cmath>

#include "gridident/simd/kernels.hpp"

namespace gridident::simd {

namespace {

void edge_drop_scalar(const cplx* v, const std::int32_t* tail, const std::int32_t* head, std::size_t edges,
                      cplx* out) {
    for (std::size_t l = 0; l < edges; ++l) {
        const cplx a = v[tail[l]];
        const cplx b = v[head[l]];
        out[l] = cplx(a.real() - b.real(), a.imag() - b.imag());
    }
}

// Written out instead of operator* so the result matches the vector variant
// exactly (no NaN recovery path, no contraction).
void hadamard_scalar(const cplx* a, const cplx* b, std::size_t count, cplx* out) {
    for (std::size_t l = 0; l < count; ++l) {
        const double ar = a[l].real();
        const double ai = a[l].imag();
        const double br = b[l].real();
        const double bi = b[l].imag();
        const double re_1 = ar * br;
        const double re_2 = ai * bi;
        const double im_1 = ai * br;
        const double im_2 = ar * bi;
        out[l] = cplx(re_1 - re_2, im_1 + im_2);
    }
}

double abs_sum_scalar(const cplx* a, std::size_t count) {
    double total = 0.0;
    for (std::size_t l = 0; l < count; ++l) {
        total += std::sqrt(a[l].real() * a[l].real() + a[l].imag() * a[l].imag());
    }
    return total;
}

double max_abs_scalar(const double* a, std::size_t count) {
    double m = 0.0;
    for (std::size_t l = 0; l < count; ++l) {
        const double x = std::fabs(a[l]);
        if (std::isnan(x)) {
            return x;
        }
        if (x > m) {
            m = x;
        }
    }
    return m;
}

constexpr KernelTable kScalar{"scalar", edge_drop_scalar, hadamard_scalar, abs_sum_scalar, max_abs_scalar};

}  // namespace

const KernelTable& scalar_kernels() { return kScalar; }

}  // namespace gridident::simd
