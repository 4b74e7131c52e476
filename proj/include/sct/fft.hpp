#pragma once

#include <complex>
#include <vector>

namespace sct {

using cplx = std::complex<double>;

// 2-D complex DFT, unnormalized, any size. Forward uses the e^{-i2pi...}
// kernel, backward e^{+i2pi...}. Thread-safe; plans are cached per size.
void fft2(std::vector<cplx>& data, int rows, int cols, bool forward);

}  // namespace sct
