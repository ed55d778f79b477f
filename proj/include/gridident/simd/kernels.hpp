#pragma once

// Edge-wise complex arithmetic used by the coefficient-matrix builders, the
// current synthesis, the constraint residuals of the noisy estimator and the
// error metrics. Every kernel has a scalar reference; wider variants are chosen
// at runtime and must agree with it (bit-exactly for elementwise kernels, to
// rounding for reductions).

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

#include "gridident/types.hpp"

namespace gridident::simd {

struct KernelTable {
    const char* name;
    /// out[l] = v[tail[l]] - v[head[l]]
    void (*edge_drop)(const cplx* v, const std::int32_t* tail, const std::int32_t* head, std::size_t edges,
                      cplx* out);
    /// out[l] = a[l] * b[l]
    void (*hadamard)(const cplx* a, const cplx* b, std::size_t count, cplx* out);
    /// sum of |a[l]|
    double (*abs_sum)(const cplx* a, std::size_t count);
    /// max of |a[l]| over a real array, 0 when empty, NaN when any entry is NaN
    double (*max_abs)(const double* a, std::size_t count);
};

const KernelTable& scalar_kernels();

/// nullptr when the AVX2 variant was not compiled in or the CPU lacks AVX2.
const KernelTable* avx2_kernels();

/// Table used by the library. Honors GRIDIDENT_SIMD=scalar|avx2 when set.
const KernelTable& active_kernels();

// Span front-ends over active_kernels().
void edge_drop(std::span<const cplx> v, std::span<const std::int32_t> tail, std::span<const std::int32_t> head,
               std::span<cplx> out);
void hadamard(std::span<const cplx> a, std::span<const cplx> b, std::span<cplx> out);
double abs_sum(std::span<const cplx> a);
double max_abs(std::span<const double> a);

}  // namespace gridident::simd
