#include "chv/masks.hpp"

#include <numeric>
#include <sstream>

#include "chv/errors.hpp"
#include "chv/rng.hpp"

namespace chv {

namespace {

void check_mask_args(int nx, int ny, int T, int superpixel) {
    if (nx < 1 || ny < 1) throw InvalidArgument("masks: grid must be at least 1x1");
    if (T < 1) throw InvalidArgument("masks: frame count must be >= 1");
    if (superpixel < 1) throw InvalidArgument("masks: superpixel must be >= 1");
    if (nx % superpixel != 0 || ny % superpixel != 0)
        throw InvalidArgument("masks: grid dims must be divisible by superpixel");
    const long cells = static_cast<long>(nx / superpixel) * (ny / superpixel);
    if (T > cells) throw InvalidArgument("masks: more frames than superpixels");
}

void stamp_superpixel(std::vector<std::uint8_t>& frame, int nx, int cell, int cells_x, int sp) {
    const int cy = cell / cells_x;
    const int cx = cell % cells_x;
    for (int iy = cy * sp; iy < (cy + 1) * sp; ++iy)
        for (int ix = cx * sp; ix < (cx + 1) * sp; ++ix)
            frame[static_cast<std::size_t>(iy) * nx + ix] = 1;
}

} // namespace

double MaskStack::density(int t) const {
    const auto& f = frames.at(static_cast<std::size_t>(t));
    const double n = static_cast<double>(f.size());
    return n == 0.0 ? 0.0 : std::accumulate(f.begin(), f.end(), 0.0) / n;
}

MaskStack generate_partition_masks(int nx, int ny, int T, int superpixel, std::uint64_t seed) {
    check_mask_args(nx, ny, T, superpixel);
    const int cells_x = nx / superpixel;
    const int cells_y = ny / superpixel;
    const long cells = static_cast<long>(cells_x) * cells_y;

    std::vector<int> order(static_cast<std::size_t>(cells));
    std::iota(order.begin(), order.end(), 0);
    Rng rng(derive_seed(seed, "partition-masks"));
    rng.shuffle(order);

    MaskStack stack;
    stack.nx = nx;
    stack.ny = ny;
    stack.superpixel = superpixel;
    stack.seed = seed;
    stack.frames.assign(static_cast<std::size_t>(T),
                        std::vector<std::uint8_t>(static_cast<std::size_t>(nx) * ny, 0));

    // Round-robin over the shuffled cells: class sizes differ by <= 1.
    for (long i = 0; i < cells; ++i)
        stamp_superpixel(stack.frames[static_cast<std::size_t>(i % T)], nx,
                         order[static_cast<std::size_t>(i)], cells_x, superpixel);
    return stack;
}

MaskStack generate_bernoulli_masks(int nx, int ny, int T, int superpixel, double density,
                                   std::uint64_t seed) {
    check_mask_args(nx, ny, T, superpixel);
    if (!(density >= 0.0 && density <= 1.0))
        throw InvalidArgument("masks: density must be in [0, 1]");
    const int cells_x = nx / superpixel;
    const int cells_y = ny / superpixel;

    MaskStack stack;
    stack.nx = nx;
    stack.ny = ny;
    stack.superpixel = superpixel;
    stack.seed = seed;
    stack.frames.assign(static_cast<std::size_t>(T),
                        std::vector<std::uint8_t>(static_cast<std::size_t>(nx) * ny, 0));

    Rng rng(derive_seed(seed, "bernoulli-masks"));
    for (int t = 0; t < T; ++t)
        for (long cell = 0; cell < static_cast<long>(cells_x) * cells_y; ++cell)
            if (rng.next_double() < density)
                stamp_superpixel(stack.frames[static_cast<std::size_t>(t)], nx,
                                 static_cast<int>(cell), cells_x, superpixel);
    return stack;
}

MaskReport validate_masks(const MaskStack& stack) {
    MaskReport rep;
    const int T = stack.frame_count();
    const std::size_t n = static_cast<std::size_t>(stack.nx) * stack.ny;

    rep.binary = true;
    rep.frame_density.resize(static_cast<std::size_t>(T), 0.0);
    for (int t = 0; t < T; ++t) {
        const auto& f = stack.frames[static_cast<std::size_t>(t)];
        if (f.size() != n) {
            rep.binary = false;
            return rep;
        }
        long ones = 0;
        for (std::uint8_t v : f) {
            if (v > 1) rep.binary = false;
            ones += v;
        }
        rep.frame_density[static_cast<std::size_t>(t)] = static_cast<double>(ones) / static_cast<double>(n);
    }

    rep.disjoint = true;
    rep.complete = true;
    long uncovered = 0;
    for (std::size_t i = 0; i < n; ++i) {
        int sum = 0;
        for (int t = 0; t < T; ++t) sum += stack.frames[static_cast<std::size_t>(t)][i];
        if (sum == 0) ++uncovered;
        if (sum != 1) rep.complete = false;
        if (sum > 1 && rep.disjoint) {
            rep.disjoint = false;
            // name the first offending frame pair and pixel
            int first = -1;
            for (int t = 0; t < T; ++t) {
                if (stack.frames[static_cast<std::size_t>(t)][i]) {
                    if (first < 0) {
                        first = t;
                    } else {
                        rep.overlap_frame_a = first;
                        rep.overlap_frame_b = t;
                        rep.overlap_pixel = static_cast<long>(i);
                        break;
                    }
                }
            }
        }
    }
    rep.coverage_gap = static_cast<double>(uncovered) / static_cast<double>(n);

    rep.block_constant = true;
    const int sp = stack.superpixel;
    for (int t = 0; t < T && rep.block_constant; ++t) {
        const auto& f = stack.frames[static_cast<std::size_t>(t)];
        for (int cy = 0; cy < stack.ny / sp && rep.block_constant; ++cy)
            for (int cx = 0; cx < stack.nx / sp && rep.block_constant; ++cx) {
                const std::uint8_t v0 = f[static_cast<std::size_t>(cy * sp) * stack.nx + cx * sp];
                for (int iy = cy * sp; iy < (cy + 1) * sp && rep.block_constant; ++iy)
                    for (int ix = cx * sp; ix < (cx + 1) * sp; ++ix)
                        if (f[static_cast<std::size_t>(iy) * stack.nx + ix] != v0) {
                            rep.block_constant = false;
                            break;
                        }
            }
    }
    return rep;
}

std::string MaskReport::summary() const {
    std::ostringstream os;
    os << "binary=" << (binary ? "pass" : "FAIL")
       << " disjoint=" << (disjoint ? "pass" : "FAIL")
       << " complete=" << (complete ? "pass" : "FAIL")
       << " block_constant=" << (block_constant ? "pass" : "FAIL")
       << " coverage_gap=" << coverage_gap;
    if (!disjoint && overlap_pixel >= 0)
        os << " first_overlap=(frames " << overlap_frame_a << "," << overlap_frame_b
           << " pixel " << overlap_pixel << ")";
    return os.str();
}

} // namespace chv
