#include "mespot/windowing.hpp"

#include <numeric>

namespace mespot {

std::vector<WindowSpan> segment_video(int total_frames, const DatasetConfig& config) {
    if (total_frames < 1)
        throw_error(ErrorCode::empty_video, "segment_video: no frames");
    const int stride = config.l_window - config.l_overlap;
    std::vector<WindowSpan> spans;
    int start = 1;
    while (start + config.l_window - 1 <= total_frames) {
        spans.push_back({start, start + config.l_window - 1, static_cast<int>(spans.size()) + 1});
        start += stride;
    }
    const int covered = spans.empty() ? 0 : spans.back().end;
    if (covered < total_frames) {
        int s = total_frames - config.l_window + 1;
        if (s < 1) s = 1;
        spans.push_back({s, total_frames, static_cast<int>(spans.size()) + 1});
    }
    return spans;
}

std::vector<int> roi_window_starts(int n_frames, int /*l_interval*/) {
    std::vector<int> starts(static_cast<std::size_t>(n_frames));
    std::iota(starts.begin(), starts.end(), 1);
    return starts;
}

}  // namespace mespot
