#include "pcs/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <utility>
#include <vector>

namespace pcs {

namespace {

class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(int n, int sign) {
    std::lock_guard lock(mu_);
    auto it = plans_.find({n, sign});
    if (it != plans_.end()) return it->second;
    std::vector<std::complex<double>> scratch(static_cast<std::size_t>(n));
    auto* p = reinterpret_cast<fftw_complex*>(scratch.data());
    fftw_plan plan = fftw_plan_dft_1d(n, p, p, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans_.emplace(std::pair{n, sign}, plan);
    return plan;
  }

 private:
  std::mutex mu_;
  std::map<std::pair<int, int>, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache c;
  return c;
}

void run(std::span<std::complex<double>> data, int sign) {
  if (data.empty()) return;
  fftw_plan plan = cache().get(static_cast<int>(data.size()), sign);
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan, p, p);
}

}  // namespace

void fft_forward(std::span<std::complex<double>> data) { run(data, FFTW_FORWARD); }

void fft_inverse(std::span<std::complex<double>> data) {
  run(data, FFTW_BACKWARD);
  const double s = 1.0 / static_cast<double>(data.size());
  for (auto& v : data) v *= s;
}

}  // namespace pcs
