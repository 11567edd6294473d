#ifndef CHV_ANALYSIS_HPP
#define CHV_ANALYSIS_HPP

#include <string>
#include <vector>

#include "chv/forward_model.hpp"

namespace chv {

/// Normalized block variance across the depth stack at one pixel.
struct FocusProfile {
    std::vector<double> depths;    // meters, one per plane
    std::vector<double> variance;  // max-normalized to [0, 1]
    int window = 0;
    bool has_focus = false;        // false when the profile is identically zero
    int peak_index = -1;
};

/// Per-pixel variance of |values| in a centered window x window
/// neighborhood; at the borders the window shrinks (clamped bounds).
/// Input is any real 2D field, row-major.
RVector block_variance_map(const RVector& slice, int ny, int nx, int window);

/// Variance at one pixel across all depth slices of a frame,
/// max-normalized. Degenerate (all-zero) profiles set has_focus = false.
FocusProfile focus_profile(const Object4D& vol, int frame, int px, int py, int window,
                           const Geometry& geom);

struct Detection {
    int frame = 0;
    double x = 0.0, y = 0.0;  // meters, intensity-weighted centroid
    double z = 0.0;           // focused depth, meters
    int depth_index = 0;
    double peak_variance = 0.0;
    int pixel_count = 0;
};

/// Depth-stack particle detector. A pixel is kept when its normalized
/// variance profile has a dominant peak: every plane outside the peak and
/// its immediate neighbors stays below reject_threshold. Adjacent kept
/// pixels with profile correlation >= 0.9 merge into one particle.
std::vector<std::vector<Detection>> detect_particles(const Object4D& vol, int window,
                                                     double reject_threshold,
                                                     const Geometry& geom);

struct Track {
    int id = 0;
    std::vector<bool> present;            // per frame
    std::vector<double> x, y, z;          // meters, valid where present
    std::vector<double> vx, vy, vz;       // m/s, interior frames only
    std::vector<bool> velocity_valid;
};

/// Greedy nearest-neighbor association frame to frame; links longer than
/// max_jump are rejected and unmatched detections start new tracks.
std::vector<Track> track_particles(const std::vector<std::vector<Detection>>& detections,
                                   double max_jump);

/// Central-difference velocities v(t) = (p(t+1) - p(t-1)) / (2 tau) for
/// frames whose both neighbors are present.
Track velocities(const Track& track, double tau);

double track_speed(const Track& t, int frame);
double mean_speed(const Track& t);

/// CSV columns: frame,id,x_m,y_m,z_m,vx,vy,vz,speed
void write_tracks_csv(const std::vector<Track>& tracks, const std::string& path);
/// CSV columns: depth_m,variance
void write_profile_csv(const FocusProfile& profile, const std::string& path);
/// CSV columns: frame,id,x_m,y_m,z_m,vx,vy,vz,speed (velocity columns empty
/// markers are 0; detections have no velocity, id is -1)
void write_detections_csv(const std::vector<std::vector<Detection>>& det,
                          const std::string& path);

} // namespace chv

#endif
