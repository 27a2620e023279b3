#pragma once

#include <complex>
#include <cstddef>
#include <span>

// Thin wrapper over FFTW. Plans are created once per layout (FFTW_ESTIMATE, so
// the chosen algorithm and therefore the output bits are fixed for a build) and
// cached behind a mutex; execution is thread-safe.
namespace gwvqa::fft {

enum class Direction {
  Forward,   // sum x_n exp(-2 pi i n k / n)
  Backward,  // sum x_k exp(+2 pi i n k / n), unnormalized
};

void transform(std::span<std::complex<double>> data, Direction dir);

// `howmany` transforms of length `n` over data[m * dist + j * stride].
void transform_many(std::span<std::complex<double>> data, std::size_t n,
                    std::size_t howmany, std::size_t stride, std::size_t dist,
                    Direction dir);

}  // namespace gwvqa::fft
