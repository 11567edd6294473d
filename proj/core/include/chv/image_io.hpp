#ifndef CHV_IMAGE_IO_HPP
#define CHV_IMAGE_IO_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "chv/aligned.hpp"

namespace chv {

struct ImageGray8 {
    int nx = 0, ny = 0;
    std::vector<std::uint8_t> pixels; // ny*nx
};

struct ImageRgb8 {
    int nx = 0, ny = 0;
    std::vector<std::uint8_t> pixels; // ny*nx*3
};

void write_png(const std::string& path, const ImageGray8& img);
void write_png(const std::string& path, const ImageRgb8& img);
void write_pgm(const std::string& path, const ImageGray8& img);

/// Loads a PNG or PGM (by file magic) as 8-bit grayscale scaled to [0, 1].
/// Color PNGs are converted to luma; 16-bit inputs are reduced to 8.
RVector load_image_gray01(const std::string& path, int& ny, int& nx);

/// Linear min-max normalization of a real 2D field to 0..255 for previews.
ImageGray8 to_gray8(const RVector& values, int ny, int nx);

} // namespace chv

#endif
