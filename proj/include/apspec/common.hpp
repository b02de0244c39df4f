#pragma once

#include <complex>
#include <cstdint>

namespace apspec {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

// (1+sqrt5)/2 and its inverse (= golden rotation number).
inline constexpr double kGoldenRatio = 1.6180339887498948482;
inline constexpr double kGoldenMean = 0.6180339887498948482;

inline constexpr double kSqrt5 = 2.2360679774997896964;

} // namespace apspec
