#ifndef MESPOT_GEOMETRY_HPP
#define MESPOT_GEOMETRY_HPP

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mespot/dataio.hpp"
#include "mespot/types.hpp"

namespace mespot {

inline constexpr int kRoiCount = 12;

enum class RoiRole { eyebrow, mouth, nose_reference };

std::string to_string(RoiRole role);
RoiRole roi_role_from_string(const std::string& s);

/// Square ROI in 1-based inclusive pixel coordinates: columns [left, left+side-1],
/// rows [top, top+side-1].
struct RoiRect {
    int roi_id = 0;
    RoiRole role = RoiRole::eyebrow;
    int left = 0;
    int top = 0;
    int side = 0;

    int right() const { return left + side - 1; }
    int bottom() const { return top + side - 1; }
};

/// Where each of the 12 ROIs sits: a landmark (or midpoint of two) plus an
/// optional offset in units of the inner-eye distance. The landmark index
/// convention of the 84-point model is not standardized, so the whole map is
/// data (see layout file format in geometry.cpp); the built-in default matches
/// the synthetic face template.
struct RoiLayoutEntry {
    int roi_id = 0;
    int landmark_a = 0;
    std::optional<int> landmark_b;  // when set, center on the midpoint
    RoiRole role = RoiRole::eyebrow;
    double offset_x = 0.0;  // in inner-eye-distance units
    double offset_y = 0.0;
};

struct RoiLayoutMap {
    int inner_eye_left = 0;  // landmark indices, 0-based
    int inner_eye_right = 0;
    std::vector<RoiLayoutEntry> rois;

    void validate() const;
};

RoiLayoutMap default_roi_layout();
RoiLayoutMap parse_roi_layout_file(const std::filesystem::path& path);
RoiLayoutMap parse_roi_layout_text(const std::string& text);

/// Distance between the inner eye corners of one frame's landmarks.
double inner_eye_distance(const std::vector<Point>& landmarks, const RoiLayoutMap& layout);

/// ROI side in pixels: the configured fixed size when present, else one fifth
/// of the inner-eye distance (rounded, floor-clamped to 4).
int roi_side(double inner_eye_dist, const DatasetConfig& config);

/// The 12 ROI squares for a window, anchored on that window's first-frame
/// landmarks and clamped to stay inside the frame.
std::vector<RoiRect> roi_layout(const std::vector<Point>& landmarks, int side,
                                const RoiLayoutMap& layout, int frame_width, int frame_height);

/// One ROI's pixel sub-sequence over a window, each frame flattened row-major
/// to a side*side vector.
struct RoiTrack {
    RoiRect rect;
    int frame_count = 0;
    int dim = 0;  // side * side
    std::vector<double> data;  // frame_count * dim, frame-major

    const double* frame(int n) const { return data.data() + static_cast<std::size_t>(n) * dim; }
};

RoiTrack extract_roi_track(const FrameSequence& seq, int window_start, int window_len,
                           const RoiRect& rect);

}  // namespace mespot

#endif
