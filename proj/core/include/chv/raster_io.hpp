#ifndef CHV_RASTER_IO_HPP
#define CHV_RASTER_IO_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "chv/field.hpp"
#include "chv/forward_model.hpp"
#include "chv/masks.hpp"

namespace chv {

/// On-disk raster: 4-byte magic "CHV1", little-endian u32 header length,
/// JSON header (dtype, kind, shape [t,z,y,x], pitch_m, wavelength_m), then
/// the payload as little-endian packed samples, row-major, x fastest.
/// f32 = one float per sample; c64 = two floats (re, im) per sample.
/// The encoding is byte-exact regardless of host endianness.
struct Raster {
    enum class Dtype { f32, c64 };
    Dtype dtype = Dtype::f32;
    std::string kind;                       // field|object4d|mask|hologram_*
    std::array<std::int64_t, 4> shape{1, 1, 1, 1}; // t, z, y, x
    double pitch_m = 0.0;
    double wavelength_m = 0.0;
    std::vector<float> payload;             // raw f32 stream

    std::int64_t samples() const { return shape[0] * shape[1] * shape[2] * shape[3]; }
};

void write_raster(const std::string& path, const Raster& r);
Raster read_raster(const std::string& path);

// Typed wrappers. In-memory values are double; files store f32.
void write_raster(const std::string& path, const ComplexField& f, double wavelength = 0.0);
void write_raster(const std::string& path, const Hologram& h, double pitch = 0.0,
                  double wavelength = 0.0);
void write_raster(const std::string& path, const Object4D& o, double pitch = 0.0,
                  double wavelength = 0.0);

ComplexField to_field(const Raster& r);
Hologram to_hologram(const Raster& r);
Object4D to_object4d(const Raster& r);

/// Masks serialize as one f32 raster per frame plus a JSON index.
void write_mask_stack(const std::string& dir, const MaskStack& stack);
/// Loads a stack from its index; real-valued frames are thresholded at 0.5
/// so externally calibrated masks can be ingested.
MaskStack read_mask_stack(const std::string& index_path);

} // namespace chv

#endif
