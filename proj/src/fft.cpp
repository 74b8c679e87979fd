#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>
#include <vector>

#include "hyperlens/error.hpp"

namespace hyperlens::fft {
namespace {

using Key = std::tuple<std::size_t, std::size_t, int>;

class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(std::size_t height, std::size_t width, Direction dir) {
    const int sign = dir == Direction::Forward ? FFTW_FORWARD : FFTW_BACKWARD;
    const Key key{height, width, sign};
    std::lock_guard lock(mutex_);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    // FFTW_ESTIMATE leaves the arrays untouched; FFTW_UNALIGNED lets the plan
    // run on any std::vector storage through fftw_execute_dft.
    std::vector<std::complex<double>> scratch_in(height * width), scratch_out(height * width);
    fftw_plan plan = fftw_plan_dft_2d(static_cast<int>(height), static_cast<int>(width),
                                      reinterpret_cast<fftw_complex*>(scratch_in.data()),
                                      reinterpret_cast<fftw_complex*>(scratch_out.data()), sign,
                                      FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (plan == nullptr) {
      throw Error(ErrorCode::InvalidArgument, "FFTW could not plan the transform");
    }
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<Key, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache instance;
  return instance;
}

}  // namespace

void transform_2d(const std::complex<double>* in, std::complex<double>* out, std::size_t height,
                  std::size_t width, Direction dir) {
  fftw_plan plan = cache().get(height, width, dir);
  // Out-of-place FFTW plans do not modify their input.
  fftw_execute_dft(plan,
                   reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in)),
                   reinterpret_cast<fftw_complex*>(out));
}

}  // namespace hyperlens::fft
