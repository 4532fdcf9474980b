#ifndef MESPOT_WINDOWING_HPP
#define MESPOT_WINDOWING_HPP

#include <vector>

#include "mespot/dataio.hpp"

namespace mespot {

/// One sliding-window span over a video, inclusive 1-based frame positions.
struct WindowSpan {
    int start = 0;
    int end = 0;
    int index_m = 0;  // ordinal, 1-based

    int length() const { return end - start + 1; }
    bool contains(int frame) const { return frame >= start && frame <= end; }
};

/// Splits frames 1..total_frames into spans of l_window frames advancing by
/// l_window - l_overlap. A trailing remainder is covered by one extra span
/// back-aligned to the video end (shorter than l_window only when the whole
/// video is).
std::vector<WindowSpan> segment_video(int total_frames, const DatasetConfig& config);

/// Start positions of the per-frame analysis windows inside one span of
/// n_frames: every frame starts one, tail windows shrink.
std::vector<int> roi_window_starts(int n_frames, int l_interval);

}  // namespace mespot

#endif
