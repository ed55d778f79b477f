#include <immintrin.h>

#include <cmath>
#include <limits>

#include "gridident/simd/kernels.hpp"

namespace gridident::simd {

// Two interleaved complex doubles per __m256d: [re0, im0, re1, im1].

namespace {

inline __m256d load_pair(const cplx* p) { return _mm256_loadu_pd(reinterpret_cast<const double*>(p)); }

inline void store_pair(cplx* p, __m256d x) { _mm256_storeu_pd(reinterpret_cast<double*>(p), x); }

inline __m256d gather_pair(const cplx* v, std::int32_t first, std::int32_t second) {
    const __m128d lo = _mm_loadu_pd(reinterpret_cast<const double*>(v + first));
    const __m128d hi = _mm_loadu_pd(reinterpret_cast<const double*>(v + second));
    return _mm256_set_m128d(hi, lo);
}

void edge_drop_avx2(const cplx* v, const std::int32_t* tail, const std::int32_t* head, std::size_t edges,
                    cplx* out) {
    std::size_t l = 0;
    for (; l + 2 <= edges; l += 2) {
        const __m256d a = gather_pair(v, tail[l], tail[l + 1]);
        const __m256d b = gather_pair(v, head[l], head[l + 1]);
        store_pair(out + l, _mm256_sub_pd(a, b));
    }
    for (; l < edges; ++l) {
        const cplx a = v[tail[l]];
        const cplx b = v[head[l]];
        out[l] = cplx(a.real() - b.real(), a.imag() - b.imag());
    }
}

void hadamard_avx2(const cplx* a, const cplx* b, std::size_t count, cplx* out) {
    std::size_t l = 0;
    for (; l + 2 <= count; l += 2) {
        const __m256d x = load_pair(a + l);
        const __m256d y = load_pair(b + l);
        const __m256d y_re = _mm256_movedup_pd(y);           // br br
        const __m256d y_im = _mm256_permute_pd(y, 0xF);      // bi bi
        const __m256d x_swap = _mm256_permute_pd(x, 0x5);    // ai ar
        const __m256d t1 = _mm256_mul_pd(x, y_re);           // ar*br ai*br
        const __m256d t2 = _mm256_mul_pd(x_swap, y_im);      // ai*bi ar*bi
        store_pair(out + l, _mm256_addsub_pd(t1, t2));
    }
    for (; l < count; ++l) {
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

double abs_sum_avx2(const cplx* a, std::size_t count) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t l = 0;
    for (; l + 2 <= count; l += 2) {
        const __m256d x = load_pair(a + l);
        const __m256d sq = _mm256_mul_pd(x, x);
        const __m256d mag2 = _mm256_hadd_pd(sq, sq);  // |a0|^2 |a0|^2 |a1|^2 |a1|^2
        acc = _mm256_add_pd(acc, _mm256_sqrt_pd(mag2));
    }
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, acc);
    double total = lanes[0] + lanes[2];
    for (; l < count; ++l) {
        total += std::sqrt(a[l].real() * a[l].real() + a[l].imag() * a[l].imag());
    }
    return total;
}

double max_abs_avx2(const double* a, std::size_t count) {
    const __m256d sign_mask = _mm256_set1_pd(-0.0);
    __m256d m = _mm256_setzero_pd();
    __m256d unordered = _mm256_setzero_pd();
    std::size_t l = 0;
    for (; l + 4 <= count; l += 4) {
        const __m256d x = _mm256_loadu_pd(a + l);
        unordered = _mm256_or_pd(unordered, _mm256_cmp_pd(x, x, _CMP_UNORD_Q));
        m = _mm256_max_pd(m, _mm256_andnot_pd(sign_mask, x));
    }
    if (_mm256_movemask_pd(unordered) != 0) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, m);
    double best = lanes[0];
    for (int k = 1; k < 4; ++k) {
        if (lanes[k] > best) {
            best = lanes[k];
        }
    }
    for (; l < count; ++l) {
        const double x = std::fabs(a[l]);
        if (std::isnan(x)) {
            return x;
        }
        if (x > best) {
            best = x;
        }
    }
    return best;
}

}  // namespace

extern const KernelTable kAvx2Table;
const KernelTable kAvx2Table{"avx2", edge_drop_avx2, hadamard_avx2, abs_sum_avx2, max_abs_avx2};

}  // namespace gridident::simd
