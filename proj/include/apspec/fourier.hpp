#pragma once

#include <vector>

#include "apspec/common.hpp"

namespace apspec {

// Forward DFT, X_k = sum_j x_j exp(-2 pi i j k / N).  Backed by FFTW.
std::vector<cplx> fft_forward(const std::vector<cplx>& in);

} // namespace apspec
