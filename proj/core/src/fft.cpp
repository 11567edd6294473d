#include "chv/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <utility>

#include "chv/errors.hpp"

namespace chv {

namespace {

struct PlanPair {
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;
};

std::mutex g_plan_mutex;
std::map<std::pair<int, int>, PlanPair> g_plans;

// Plan creation scratch must share the alignment class of every execution
// buffer; CVector guarantees 64-byte alignment.
PlanPair& plans_for(int ny, int nx) {
    std::lock_guard<std::mutex> lock(g_plan_mutex);
    auto key = std::make_pair(ny, nx);
    auto it = g_plans.find(key);
    if (it != g_plans.end()) return it->second;

    CVector scratch(static_cast<std::size_t>(ny) * nx);
    auto* p = reinterpret_cast<fftw_complex*>(scratch.data());
    PlanPair pp;
    pp.fwd = fftw_plan_dft_2d(ny, nx, p, p, FFTW_FORWARD, FFTW_ESTIMATE);
    pp.bwd = fftw_plan_dft_2d(ny, nx, p, p, FFTW_BACKWARD, FFTW_ESTIMATE);
    if (!pp.fwd || !pp.bwd) throw Error("fftw plan creation failed");
    return g_plans.emplace(key, pp).first->second;
}

} // namespace

void fft2_forward(CVector& buf, int ny, int nx) {
    if (buf.size() != static_cast<std::size_t>(ny) * nx)
        throw DimensionMismatch("fft2_forward: buffer size mismatch");
    PlanPair& pp = plans_for(ny, nx);
    auto* p = reinterpret_cast<fftw_complex*>(buf.data());
    fftw_execute_dft(pp.fwd, p, p);
}

void fft2_inverse(CVector& buf, int ny, int nx) {
    if (buf.size() != static_cast<std::size_t>(ny) * nx)
        throw DimensionMismatch("fft2_inverse: buffer size mismatch");
    PlanPair& pp = plans_for(ny, nx);
    auto* p = reinterpret_cast<fftw_complex*>(buf.data());
    fftw_execute_dft(pp.bwd, p, p);
    const double scale = 1.0 / (static_cast<double>(nx) * ny);
    for (auto& z : buf) z *= scale;
}

} // namespace chv
