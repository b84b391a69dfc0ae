#include "relaygs/frames.hpp"

#include <algorithm>
#include <cmath>

#include "relaygs/error.hpp"

namespace relaygs {

double FrameSet::normalized_time(int frame) const {
    if (frame_count <= 1) return 0.0;
    return static_cast<double>(frame - 1) / static_cast<double>(frame_count - 1);
}

const Image& FrameSet::image(int camera_id, int frame) const {
    const auto it = images_.find({camera_id, frame});
    if (it == images_.end()) throw ConfigError("FrameSet: missing image for camera/frame");
    return it->second;
}

void FrameSet::set_image(int camera_id, int frame, Image img) {
    images_[{camera_id, frame}] = std::move(img);
}

bool FrameSet::has_image(int camera_id, int frame) const { return images_.count({camera_id, frame}) > 0; }

std::vector<TemporalSegment> segment_frames(int frame_count, int k) {
    if (frame_count < 1) throw ConfigError("segment_frames: frame_count must be >= 1");
    if (k < 2) throw ConfigError("segment_frames: k must be >= 2");
    std::vector<TemporalSegment> segments;
    const int count = (frame_count + k - 1) / k;
    segments.reserve(count);
    for (int s = 0; s < count; ++s) {
        TemporalSegment seg;
        seg.index = s;
        seg.start = s * k + 1;
        seg.end = std::min(frame_count, (s + 1) * k);
        seg.selected_frames = select_frames(seg);
        segments.push_back(std::move(seg));
    }
    return segments;
}

std::vector<int> select_frames(const TemporalSegment& segment, int p) {
    std::vector<int> frames;
    if (p < 1) throw ConfigError("select_frames: p must be >= 1");
    if (segment.length() < p) {
        for (int f = segment.start; f <= segment.end; ++f) frames.push_back(f);
        return frames;
    }
    if (p == 1) return {segment.start};
    const int span = segment.end - segment.start;
    for (int i = 0; i < p; ++i) {
        frames.push_back(segment.start + (i * span) / (p - 1));
    }
    frames.erase(std::unique(frames.begin(), frames.end()), frames.end());
    return frames;
}

int segment_at_time(const std::vector<TemporalSegment>& segments, double t, int frame_count) {
    if (segments.empty()) throw ConfigError("segment_at_time: no segments");
    const double tc = std::clamp(t, 0.0, 1.0);
    const double frame_pos = 1.0 + tc * std::max(0, frame_count - 1);
    const int frame = std::clamp(static_cast<int>(std::floor(frame_pos)), 1, frame_count);
    for (const auto& seg : segments) {
        if (seg.contains(frame)) return seg.index;
    }
    return segments.back().index;
}

}  // namespace relaygs
