#ifndef CHV_FFT_HPP
#define CHV_FFT_HPP

#include "chv/aligned.hpp"

namespace chv {

// In-place 2D c2c transforms on 64-byte aligned buffers. Plans are cached
// per grid size and shared across threads; execution is re-entrant.
// Plans use FFTW_ESTIMATE so the algorithm choice (and therefore the exact
// rounding) is reproducible run to run.
void fft2_forward(CVector& buf, int ny, int nx);
void fft2_inverse(CVector& buf, int ny, int nx); // includes the 1/(nx*ny) scale

} // namespace chv

#endif
