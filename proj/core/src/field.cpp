#include "chv/field.hpp"

#include <cmath>

#include "chv/errors.hpp"

namespace chv {

ComplexField::ComplexField(int nx_, int ny_, double pitch_) : nx(nx_), ny(ny_), pitch(pitch_) {
    if (nx < 1 || ny < 1) throw InvalidArgument("ComplexField: grid must be at least 1x1");
    if (!(pitch > 0.0) || !std::isfinite(pitch))
        throw InvalidArgument("ComplexField: pitch must be positive and finite");
    data.assign(static_cast<std::size_t>(nx) * ny, cdouble{0.0, 0.0});
}

void ComplexField::validate() const {
    if (nx < 1 || ny < 1) throw InvalidArgument("ComplexField: grid must be at least 1x1");
    if (!(pitch > 0.0) || !std::isfinite(pitch))
        throw InvalidArgument("ComplexField: pitch must be positive and finite");
    if (data.size() != static_cast<std::size_t>(nx) * ny)
        throw InvalidArgument("ComplexField: sample count does not match dims");
    if (!all_finite(data)) throw InvalidArgument("ComplexField: non-finite sample");
}

bool all_finite(const CVector& v) {
    for (const auto& z : v)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    return true;
}

bool all_finite(const RVector& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

double l2_norm(const CVector& v) {
    double s = 0.0;
    for (const auto& z : v) s += std::norm(z);
    return std::sqrt(s);
}

double l2_norm(const RVector& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

} // namespace chv
