#pragma once

#include <complex>

#include "dpm/domain.hpp"

namespace dpm::detail {

// Unnormalized real-to-complex / complex-to-real transforms on the domain's
// grid. Plans are created once per grid shape and shared; execution is
// thread safe. `c2r` overwrites its input.
void r2c(const Domain& domain, const double* in, std::complex<double>* out);
void c2r(const Domain& domain, std::complex<double>* in, double* out);

}  // namespace dpm::detail
