// Compiled with -mavx2. Only reached through the runtime dispatcher after a
// CPU feature check.

#include "hidesim/kernels.hpp"

#include <immintrin.h>

namespace hidesim::kernels::detail {

namespace {

// Nibble-table popcount (Mula): per-byte counts via vpshufb, summed per
// 64-bit lane with vpsadbw.
inline __m256i popcount_epi64(__m256i v) {
    const __m256i table = _mm256_setr_epi8(0, 1, 1, 2, 1, 2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 4,
                                           0, 1, 1, 2, 1, 2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 4);
    const __m256i low_mask = _mm256_set1_epi8(0x0f);
    __m256i lo = _mm256_and_si256(v, low_mask);
    __m256i hi = _mm256_and_si256(_mm256_srli_epi16(v, 4), low_mask);
    __m256i bytes = _mm256_add_epi8(_mm256_shuffle_epi8(table, lo), _mm256_shuffle_epi8(table, hi));
    return _mm256_sad_epu8(bytes, _mm256_setzero_si256());
}

inline std::uint64_t horizontal_sum(__m256i v) {
    __m128i s = _mm_add_epi64(_mm256_castsi256_si128(v), _mm256_extracti128_si256(v, 1));
    return static_cast<std::uint64_t>(_mm_cvtsi128_si64(s)) +
           static_cast<std::uint64_t>(_mm_extract_epi64(s, 1));
}

}  // namespace

void masked_row_popcount_avx2(const std::uint64_t* rows, std::size_t n_rows, std::size_t stride,
                              const std::uint64_t* mask, std::uint32_t* out) {
    for (std::size_t r = 0; r < n_rows; ++r) {
        const std::uint64_t* row = rows + r * stride;
        __m256i acc = _mm256_setzero_si256();
        for (std::size_t w = 0; w < stride; w += kWordsPerBlock) {
            __m256i a = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(row + w));
            __m256i m = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(mask + w));
            acc = _mm256_add_epi64(acc, popcount_epi64(_mm256_and_si256(a, m)));
        }
        out[r] = static_cast<std::uint32_t>(horizontal_sum(acc));
    }
}

std::uint64_t popcount_avx2(const std::uint64_t* words, std::size_t n) {
    __m256i acc = _mm256_setzero_si256();
    std::size_t w = 0;
    for (; w + kWordsPerBlock <= n; w += kWordsPerBlock) {
        __m256i a = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(words + w));
        acc = _mm256_add_epi64(acc, popcount_epi64(a));
    }
    std::uint64_t total = horizontal_sum(acc);
    if (w < n) total += popcount_scalar(words + w, n - w);
    return total;
}

}  // namespace hidesim::kernels::detail
