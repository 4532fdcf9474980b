#ifndef MESPOT_TYPES_HPP
#define MESPOT_TYPES_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mespot {

enum class ErrorCode {
    io_error,
    empty_video,
    dimension_mismatch,
    format_error,
    empty_track,
    invalid_interval,
    unknown_dataset,
    degenerate_face,
    roi_out_of_frame,
    too_few_frames,
    block_too_small,
    video_too_short,
    need_multiple_subjects,
    degenerate_training_set,
    spec_error,
    unknown_video,
};

class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
    ErrorCode code() const { return code_; }

  private:
    ErrorCode code_;
};

[[noreturn]] inline void throw_error(ErrorCode code, const std::string& msg) {
    throw Error(code, msg);
}

/// One 8-bit grayscale image, row-major.
struct Frame {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;

    std::uint8_t at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
    std::uint8_t& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
};

/// Ordered frames of one video. Frame numbering is 1-based: frame i of the
/// video has index first_index + i - 1 (first_index is 1 unless a clip was
/// cut out of a longer recording).
struct FrameSequence {
    std::string video_id;
    std::string subject_id;
    double fps = 0.0;
    int first_index = 1;
    std::vector<Frame> frames;

    int frame_count() const { return static_cast<int>(frames.size()); }
    int last_index() const { return first_index + frame_count() - 1; }
};

struct Point {
    double x = 0.0;
    double y = 0.0;
};

inline constexpr int kLandmarkCount = 84;

/// Per-frame landmark positions, aligned to 1-based frame indices
/// [first_index, first_index + size - 1]. Gaps in the source file are filled
/// by linear interpolation at parse time; queries outside the covered range
/// clamp to the nearest tracked frame.
struct LandmarkTrack {
    int first_index = 1;
    std::vector<std::vector<Point>> frames;  // each entry has kLandmarkCount points

    const std::vector<Point>& at_frame(int frame_index) const {
        int i = frame_index - first_index;
        if (i < 0) i = 0;
        if (i >= static_cast<int>(frames.size())) i = static_cast<int>(frames.size()) - 1;
        return frames[static_cast<std::size_t>(i)];
    }
};

enum class GtKind { micro, macro, blink, other };

std::string to_string(GtKind kind);
GtKind gt_kind_from_string(const std::string& s);

struct GroundTruthInterval {
    std::string video_id;
    int onset = 0;
    std::optional<int> apex;
    int offset = 0;
    GtKind kind = GtKind::micro;
};

enum class SpotSource { ltp_ml, lbp_chi2 };

std::string to_string(SpotSource source);
SpotSource spot_source_from_string(const std::string& s);

/// One detector emission, inclusive frame interval [onset, offset].
struct SpottedInterval {
    std::string video_id;
    int onset = 0;
    int offset = 0;
    double score = 0.0;
    SpotSource source = SpotSource::ltp_ml;
};

}  // namespace mespot

#endif
