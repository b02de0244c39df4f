#include "apspec/fourier.hpp"

#include <fftw3.h>

#include "apspec/errors.hpp"

namespace apspec {

std::vector<cplx> fft_forward(const std::vector<cplx>& in) {
    if (in.empty()) throw InvalidParameter("empty FFT input");
    std::vector<cplx> out(in.size());
    // std::complex<double> is layout-compatible with fftw_complex.
    auto* src = reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in.data()));
    auto* dst = reinterpret_cast<fftw_complex*>(out.data());
    fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(in.size()), src, dst,
                                      FFTW_FORWARD, FFTW_ESTIMATE | FFTW_PRESERVE_INPUT);
    if (!plan) throw SampleFailure("fftw plan creation failed");
    fftw_execute(plan);
    fftw_destroy_plan(plan);
    return out;
}

} // namespace apspec
