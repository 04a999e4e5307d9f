#include "hidesim/kernels.hpp"

#include <bit>
#include <cassert>
#include <cstdlib>
#include <cstring>

namespace hidesim::kernels {

std::string_view backend_name(Backend b) {
    return b == Backend::Avx2 ? "avx2" : "scalar";
}

bool backend_available(Backend b) {
    if (b == Backend::Scalar) return true;
#if defined(HIDESIM_BUILD_AVX2)
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

Backend active_backend() {
    static const Backend chosen = [] {
        const char* env = std::getenv("HIDESIM_SIMD");
        if (env != nullptr && std::strcmp(env, "scalar") == 0) return Backend::Scalar;
        return backend_available(Backend::Avx2) ? Backend::Avx2 : Backend::Scalar;
    }();
    return chosen;
}

void masked_row_popcount(Backend backend, const BitMatrix& matrix, const BitMask& mask,
                         std::span<std::uint32_t> out) {
    assert(mask.words().size() == matrix.stride());
    assert(out.size() == matrix.rows());
#if defined(HIDESIM_BUILD_AVX2)
    if (backend == Backend::Avx2) {
        detail::masked_row_popcount_avx2(matrix.data().data(), matrix.rows(), matrix.stride(),
                                         mask.words().data(), out.data());
        return;
    }
#else
    (void)backend;
#endif
    detail::masked_row_popcount_scalar(matrix.data().data(), matrix.rows(), matrix.stride(),
                                       mask.words().data(), out.data());
}

void masked_row_popcount(const BitMatrix& matrix, const BitMask& mask, std::span<std::uint32_t> out) {
    masked_row_popcount(active_backend(), matrix, mask, out);
}

std::uint64_t popcount(Backend backend, std::span<const std::uint64_t> words) {
#if defined(HIDESIM_BUILD_AVX2)
    if (backend == Backend::Avx2) return detail::popcount_avx2(words.data(), words.size());
#else
    (void)backend;
#endif
    return detail::popcount_scalar(words.data(), words.size());
}

std::uint64_t popcount(std::span<const std::uint64_t> words) {
    return popcount(active_backend(), words);
}

std::int64_t first_common_bit(std::span<const std::uint64_t> row, std::span<const std::uint64_t> mask) {
    for (std::size_t w = 0; w < row.size(); ++w) {
        std::uint64_t common = row[w] & mask[w];
        if (common != 0) return static_cast<std::int64_t>(w * 64 + std::countr_zero(common));
    }
    return -1;
}

}  // namespace hidesim::kernels
