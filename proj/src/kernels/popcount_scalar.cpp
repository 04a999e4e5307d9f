#include "hidesim/kernels.hpp"

#include <bit>

namespace hidesim::kernels::detail {

void masked_row_popcount_scalar(const std::uint64_t* rows, std::size_t n_rows, std::size_t stride,
                                const std::uint64_t* mask, std::uint32_t* out) {
    for (std::size_t r = 0; r < n_rows; ++r) {
        const std::uint64_t* row = rows + r * stride;
        std::uint32_t count = 0;
        for (std::size_t w = 0; w < stride; ++w) count += std::popcount(row[w] & mask[w]);
        out[r] = count;
    }
}

std::uint64_t popcount_scalar(const std::uint64_t* words, std::size_t n) {
    std::uint64_t count = 0;
    for (std::size_t w = 0; w < n; ++w) count += std::popcount(words[w]);
    return count;
}

}  // namespace hidesim::kernels::detail
