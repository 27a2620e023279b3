#include "gwvqa/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>

#include "gwvqa/error.hpp"

namespace gwvqa::fft {
namespace {

using PlanKey = std::tuple<std::size_t, std::size_t, std::size_t, std::size_t, int>;

class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(std::size_t n, std::size_t howmany, std::size_t stride,
                std::size_t dist, int sign) {
    const PlanKey key{n, howmany, stride, dist, sign};
    std::lock_guard lock(mutex_);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;

    const std::size_t extent = (howmany - 1) * dist + (n - 1) * stride + 1;
    auto* scratch = fftw_alloc_complex(extent);
    if (scratch == nullptr) fail(ErrorCode::Internal, "fftw allocation failed");
    int dims[1] = {static_cast<int>(n)};
    fftw_plan plan = fftw_plan_many_dft(
        1, dims, static_cast<int>(howmany), scratch, nullptr,
        static_cast<int>(stride), static_cast<int>(dist), scratch, nullptr,
        static_cast<int>(stride), static_cast<int>(dist), sign,
        FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(scratch);
    if (plan == nullptr) fail(ErrorCode::Internal, "fftw planning failed");
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<PlanKey, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache instance;
  return instance;
}

}  // namespace

void transform(std::span<std::complex<double>> data, Direction dir) {
  transform_many(data, data.size(), 1, 1, data.size(), dir);
}

void transform_many(std::span<std::complex<double>> data, std::size_t n,
                    std::size_t howmany, std::size_t stride, std::size_t dist,
                    Direction dir) {
  if (n == 0 || howmany == 0) return;
  if ((howmany - 1) * dist + (n - 1) * stride + 1 > data.size())
    fail(ErrorCode::DimensionError, "transform layout exceeds buffer");
  const int sign = dir == Direction::Forward ? FFTW_FORWARD : FFTW_BACKWARD;
  fftw_plan plan = cache().get(n, howmany, stride, dist, sign);
  auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan, ptr, ptr);
}

}  // namespace gwvqa::fft
