#ifndef CHV_MASKS_HPP
#define CHV_MASKS_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace chv {

/// T binary per-frame modulation masks on the sensor grid. Values are
/// exactly 0 or 1 and constant on aligned superpixel x superpixel blocks.
struct MaskStack {
    int nx = 0, ny = 0;
    int superpixel = 1;
    std::uint64_t seed = 0;
    std::vector<std::vector<std::uint8_t>> frames; // frames[t][iy*nx+ix]

    int frame_count() const { return static_cast<int>(frames.size()); }
    double density(int t) const;
};

/// Partitions the superpixel grid uniformly at random into T disjoint
/// classes of near-equal size (sizes differ by at most one superpixel);
/// frame t is the indicator of class t. Frames therefore sum to the
/// all-ones mask, pixel for pixel.
MaskStack generate_partition_masks(int nx, int ny, int T, int superpixel, std::uint64_t seed);

/// Independent per-superpixel Bernoulli masks at the given density.
/// No partition property; used for single-frame subsampling studies.
MaskStack generate_bernoulli_masks(int nx, int ny, int T, int superpixel, double density,
                                   std::uint64_t seed);

struct MaskReport {
    std::vector<double> frame_density;
    bool disjoint = false;
    bool complete = false;        // sum over frames == 1 at every pixel
    bool block_constant = false;  // each frame constant on superpixel blocks
    bool binary = false;
    double coverage_gap = 0.0;    // fraction of pixels covered by no frame
    // First violation found, for diagnostics.
    int overlap_frame_a = -1, overlap_frame_b = -1;
    long overlap_pixel = -1;

    bool all_pass() const { return disjoint && complete && block_constant && binary; }
    std::string summary() const;
};

/// Diagnostic pass over a stack; never throws on content problems.
MaskReport validate_masks(const MaskStack& stack);

} // namespace chv

#endif
