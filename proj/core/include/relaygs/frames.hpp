#pragma once

#include <map>
#include <utility>
#include <vector>

#include "relaygs/camera.hpp"
#include "relaygs/image.hpp"

namespace relaygs {

// Contiguous frame range [start, end] (1-based, inclusive) with the frames
// picked for pseudo-view supervision.
struct TemporalSegment {
    int index = 0;
    int start = 0;
    int end = 0;
    std::vector<int> selected_frames;

    int length() const { return end - start + 1; }
    bool contains(int frame) const { return frame >= start && frame <= end; }
};

// Multi-view video: fixed calibrated cameras x 1-based frame indices.
class FrameSet {
public:
    std::vector<Camera> cameras;
    int frame_count = 0;

    // t = (frame - 1) / (T - 1); a single-frame set maps to t = 0.
    double normalized_time(int frame) const;

    const Image& image(int camera_id, int frame) const;
    void set_image(int camera_id, int frame, Image img);
    bool has_image(int camera_id, int frame) const;

private:
    std::map<std::pair<int, int>, Image> images_;
};

// Tiles [1, frame_count] into ceil(frame_count / k) segments of length k
// (last may be shorter). Throws ConfigError for k < 2 or frame_count < 1.
std::vector<TemporalSegment> segment_frames(int frame_count, int k);

// Picks p frames spanning the segment: first, floor-midpoint(s), last. A
// segment shorter than p yields all of its frames.
std::vector<int> select_frames(const TemporalSegment& segment, int p = 3);

// Index of the segment whose frame range covers normalized time t. Times
// outside [0, 1] clamp to the first/last segment.
int segment_at_time(const std::vector<TemporalSegment>& segments, double t, int frame_count);

}  // namespace relaygs
