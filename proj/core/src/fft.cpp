#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <vector>

namespace dpm::detail {
namespace {

struct PlanPair {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
  // SIMD-free variants for arrays without FFTW's preferred alignment.
  fftw_plan forward_unaligned = nullptr;
  fftw_plan backward_unaligned = nullptr;
};

std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

const PlanPair& plans_for(const Domain& domain) {
  static std::map<std::vector<int>, PlanPair> cache;
  std::lock_guard lock(plan_mutex());
  auto it = cache.find(domain.sizes());
  if (it != cache.end()) return it->second;

  const auto& n = domain.sizes();
  // Scratch buffers only fix the shape and alignment; the plans run on later
  // arrays through the new-array execute interface. FFTW_ESTIMATE keeps the
  // plan choice, and hence the rounding, identical from run to run.
  auto* real = static_cast<double*>(fftw_malloc(sizeof(double) * domain.physical_size()));
  auto* cplx = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * domain.spectral_size()));
  PlanPair plans;
  plans.forward = fftw_plan_dft_r2c(domain.dim(), n.data(), real, cplx, FFTW_ESTIMATE);
  plans.backward = fftw_plan_dft_c2r(domain.dim(), n.data(), cplx, real, FFTW_ESTIMATE);
  plans.forward_unaligned = fftw_plan_dft_r2c(domain.dim(), n.data(), real, cplx, FFTW_ESTIMATE | FFTW_UNALIGNED);
  plans.backward_unaligned = fftw_plan_dft_c2r(domain.dim(), n.data(), cplx, real, FFTW_ESTIMATE | FFTW_UNALIGNED);
  fftw_free(cplx);
  fftw_free(real);
  return cache.emplace(n, plans).first->second;
}

}  // namespace

void r2c(const Domain& domain, const double* in, std::complex<double>* out) {
  const auto& plans = plans_for(domain);
  auto* src = const_cast<double*>(in);  // out-of-place r2c leaves the input intact
  auto* dst = reinterpret_cast<fftw_complex*>(out);
  const bool aligned = fftw_alignment_of(src) == 0 && fftw_alignment_of(reinterpret_cast<double*>(dst)) == 0;
  fftw_execute_dft_r2c(aligned ? plans.forward : plans.forward_unaligned, src, dst);
}

void c2r(const Domain& domain, std::complex<double>* in, double* out) {
  const auto& plans = plans_for(domain);
  auto* src = reinterpret_cast<fftw_complex*>(in);
  const bool aligned = fftw_alignment_of(reinterpret_cast<double*>(src)) == 0 && fftw_alignment_of(out) == 0;
  fftw_execute_dft_c2r(aligned ? plans.backward : plans.backward_unaligned, src, out);
}

}  // namespace dpm::detail
