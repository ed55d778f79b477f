#include <cstdlib>
#include <string_view>

#include "gridident/errors.hpp"
#include "gridident/simd/kernels.hpp"

namespace gridident::simd {

#if defined(GRIDIDENT_HAVE_AVX2)
extern const KernelTable kAvx2Table;
#endif

const KernelTable* avx2_kernels() {
#if defined(GRIDIDENT_HAVE_AVX2)
    static const bool supported = __builtin_cpu_supports("avx2");
    return supported ? &kAvx2Table : nullptr;
#else
    return nullptr;
#endif
}

namespace {

const KernelTable& select_kernels() {
    const char* env = std::getenv("GRIDIDENT_SIMD");
    const std::string_view choice = env ? env : "";
    if (choice == "scalar") {
        return scalar_kernels();
    }
    if (const KernelTable* wide = avx2_kernels()) {
        return *wide;
    }
    return scalar_kernels();
}

}  // namespace

const KernelTable& active_kernels() {
    static const KernelTable& table = select_kernels();
    return table;
}

void edge_drop(std::span<const cplx> v, std::span<const std::int32_t> tail, std::span<const std::int32_t> head,
               std::span<cplx> out) {
    if (tail.size() != head.size() || out.size() != tail.size()) {
        throw InvalidSizeError("edge_drop: mismatched edge arrays");
    }
    active_kernels().edge_drop(v.data(), tail.data(), head.data(), tail.size(), out.data());
}

void hadamard(std::span<const cplx> a, std::span<const cplx> b, std::span<cplx> out) {
    if (a.size() != b.size() || out.size() != a.size()) {
        throw InvalidSizeError("hadamard: mismatched lengths");
    }
    active_kernels().hadamard(a.data(), b.data(), a.size(), out.data());
}

double abs_sum(std::span<const cplx> a) { return active_kernels().abs_sum(a.data(), a.size()); }

double max_abs(std::span<const double> a) { return active_kernels().max_abs(a.data(), a.size()); }

}  // namespace gridident::simd
