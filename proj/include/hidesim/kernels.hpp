#pragma once

// Bit-parallel counting kernels used by the channel evaluator.
//
// Every station's neighbourhood is a row of a padded bit matrix; a round's
// transmitters form a mask of the same width. The per-round hot loop is
// "popcount(row & mask)" for every row. A portable scalar reference and an
// AVX2 variant are provided and chosen once at runtime; both must agree
// bit-for-bit (see tests/test_kernels.cpp).

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace hidesim::kernels {

// Rows are padded to a multiple of kWordsPerBlock 64-bit words so the SIMD
// path never needs a scalar tail.
inline constexpr std::size_t kWordsPerBlock = 4;

inline constexpr std::size_t padded_words(std::size_t bits) {
    std::size_t words = (bits + 63) / 64;
    return (words + kWordsPerBlock - 1) / kWordsPerBlock * kWordsPerBlock;
}

class BitMatrix {
public:
    BitMatrix() = default;
    BitMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), stride_(padded_words(cols)), words_(rows * stride_, 0) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t stride() const { return stride_; }

    void set(std::size_t r, std::size_t c) { words_[r * stride_ + c / 64] |= 1ULL << (c % 64); }
    bool test(std::size_t r, std::size_t c) const {
        return (words_[r * stride_ + c / 64] >> (c % 64)) & 1ULL;
    }
    std::span<const std::uint64_t> row(std::size_t r) const {
        return {words_.data() + r * stride_, stride_};
    }
    std::span<const std::uint64_t> data() const { return words_; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::size_t stride_ = 0;
    std::vector<std::uint64_t> words_;
};

// A bit vector with the same padding rule as a BitMatrix row.
class BitMask {
public:
    BitMask() = default;
    explicit BitMask(std::size_t bits) : bits_(bits), words_(padded_words(bits), 0) {}

    void set(std::size_t i) { words_[i / 64] |= 1ULL << (i % 64); }
    bool test(std::size_t i) const { return (words_[i / 64] >> (i % 64)) & 1ULL; }
    std::size_t size() const { return bits_; }
    std::span<const std::uint64_t> words() const { return words_; }

private:
    std::size_t bits_ = 0;
    std::vector<std::uint64_t> words_;
};

enum class Backend { Scalar, Avx2 };

std::string_view backend_name(Backend b);

// Backend picked for this process: AVX2 when compiled in and supported by the
// CPU, unless HIDESIM_SIMD=scalar is set in the environment.
Backend active_backend();
bool backend_available(Backend b);

// out[r] = popcount(matrix.row(r) & mask) for every row.
// Preconditions: mask.words().size() == matrix.stride(), out.size() == matrix.rows().
void masked_row_popcount(const BitMatrix& matrix, const BitMask& mask, std::span<std::uint32_t> out);
void masked_row_popcount(Backend backend, const BitMatrix& matrix, const BitMask& mask,
                         std::span<std::uint32_t> out);

// popcount over a whole word span.
std::uint64_t popcount(std::span<const std::uint64_t> words);
std::uint64_t popcount(Backend backend, std::span<const std::uint64_t> words);

// Lowest set bit index of (row & mask), or -1 if empty.
std::int64_t first_common_bit(std::span<const std::uint64_t> row, std::span<const std::uint64_t> mask);

namespace detail {
void masked_row_popcount_scalar(const std::uint64_t* rows, std::size_t n_rows, std::size_t stride,
                                const std::uint64_t* mask, std::uint32_t* out);
std::uint64_t popcount_scalar(const std::uint64_t* words, std::size_t n);
#if defined(HIDESIM_BUILD_AVX2)
void masked_row_popcount_avx2(const std::uint64_t* rows, std::size_t n_rows, std::size_t stride,
                              const std::uint64_t* mask, std::uint32_t* out);
std::uint64_t popcount_avx2(const std::uint64_t* words, std::size_t n);
#endif
}  // namespace detail

}  // namespace hidesim::kernels
