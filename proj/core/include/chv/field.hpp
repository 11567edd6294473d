#ifndef CHV_FIELD_HPP
#define CHV_FIELD_HPP

#include <cstddef>

#include "chv/aligned.hpp"

namespace chv {

/// 2D complex optical field sampled on a uniform square-pitch grid.
/// Samples are row-major, x fastest. Immutable by convention once built;
/// all operations return new fields.
struct ComplexField {
    int nx = 0;
    int ny = 0;
    double pitch = 0.0; // sample spacing in meters, same in x and y
    CVector data;       // ny*nx samples

    ComplexField() = default;
    ComplexField(int nx_, int ny_, double pitch_);

    cdouble& at(int iy, int ix) { return data[static_cast<std::size_t>(iy) * nx + ix]; }
    const cdouble& at(int iy, int ix) const { return data[static_cast<std::size_t>(iy) * nx + ix]; }
    std::size_t size() const { return data.size(); }

    // Throws InvalidArgument on bad dims/pitch or non-finite samples.
    void validate() const;
};

bool all_finite(const CVector& v);
bool all_finite(const RVector& v);

double l2_norm(const CVector& v);
double l2_norm(const RVector& v);

} // namespace chv

#endif
