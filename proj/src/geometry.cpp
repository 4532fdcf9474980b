#include "mespot/geometry.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include "mespot/io_util.hpp"

namespace mespot {

std::string to_string(RoiRole role) {
    switch (role) {
        case RoiRole::eyebrow: return "eyebrow";
        case RoiRole::mouth: return "mouth";
        case RoiRole::nose_reference: return "nose_reference";
    }
    return "eyebrow";
}

RoiRole roi_role_from_string(const std::string& s) {
    if (s == "eyebrow") return RoiRole::eyebrow;
    if (s == "mouth") return RoiRole::mouth;
    if (s == "nose_reference" || s == "nose") return RoiRole::nose_reference;
    throw_error(ErrorCode::format_error, "unknown ROI role '" + s + "'");
}

void RoiLayoutMap::validate() const {
    if (static_cast<int>(rois.size()) != kRoiCount)
        throw_error(ErrorCode::format_error,
                    "layout must define exactly " + std::to_string(kRoiCount) + " ROIs, got " +
                        std::to_string(rois.size()));
    std::set<int> ids;
    int nose = 0;
    for (const RoiLayoutEntry& e : rois) {
        if (e.roi_id < 0 || e.roi_id >= kRoiCount)
            throw_error(ErrorCode::format_error, "roi_id out of range: " + std::to_string(e.roi_id));
        if (!ids.insert(e.roi_id).second)
            throw_error(ErrorCode::format_error, "duplicate roi_id " + std::to_string(e.roi_id));
        auto check_lm = [](int idx) {
            if (idx < 0 || idx >= kLandmarkCount)
                throw_error(ErrorCode::format_error,
                            "landmark index out of range: " + std::to_string(idx));
        };
        check_lm(e.landmark_a);
        if (e.landmark_b) check_lm(*e.landmark_b);
        if (e.role == RoiRole::nose_reference) ++nose;
    }
    if (nose != 2)
        throw_error(ErrorCode::format_error,
                    "layout must flag exactly 2 nose_reference ROIs, got " + std::to_string(nose));
    if (inner_eye_left < 0 || inner_eye_left >= kLandmarkCount || inner_eye_right < 0 ||
        inner_eye_right >= kLandmarkCount || inner_eye_left == inner_eye_right)
        throw_error(ErrorCode::format_error, "bad inner-eye landmark indices");
}

// Landmark indices follow the common 68-point ordering (jaw 0-16, brows 17-26,
// nose 27-35, eyes 36-47, lips 48-67) extended by 16 auxiliary points; the
// synthetic face template places 72/73 on the sides of the nasal bone.
RoiLayoutMap default_roi_layout() {
    RoiLayoutMap m;
    m.inner_eye_right = 39;  // subject's right eye, inner corner
    m.inner_eye_left = 42;   // subject's left eye, inner corner
    m.rois = {
        {0, 17, std::nullopt, RoiRole::eyebrow, 0.0, 0.0},   // right brow, outer corner
        {1, 21, std::nullopt, RoiRole::eyebrow, 0.0, 0.0},   // right brow, inner corner
        {2, 22, std::nullopt, RoiRole::eyebrow, 0.0, 0.0},   // left brow, inner corner
        {3, 26, std::nullopt, RoiRole::eyebrow, 0.0, 0.0},   // left brow, outer corner
        {4, 48, std::nullopt, RoiRole::mouth, 0.0, 0.0},     // mouth right corner
        {5, 54, std::nullopt, RoiRole::mouth, 0.0, 0.0},     // mouth left corner
        {6, 19, std::nullopt, RoiRole::eyebrow, 0.0, 0.0},   // right brow, midpoint
        {7, 24, std::nullopt, RoiRole::eyebrow, 0.0, 0.0},   // left brow, midpoint
        {8, 50, std::nullopt, RoiRole::mouth, 0.0, 0.0},     // upper lip, right
        {9, 52, std::nullopt, RoiRole::mouth, 0.0, 0.0},     // upper lip, left
        {10, 72, std::nullopt, RoiRole::nose_reference, 0.0, 0.0},  // nasal bone, right
        {11, 73, std::nullopt, RoiRole::nose_reference, 0.0, 0.0},  // nasal bone, left
    };
    return m;
}

// Layout file format, one entry per line:
//   eyes = <left_idx>,<right_idx>
//   roi.<id> = <landmark_idx>[,<landmark_idx2>] <role> [<dx> <dy>]
// dx/dy are offsets in inner-eye-distance units. Landmark indices are 0-based.
RoiLayoutMap parse_roi_layout_text(const std::string& text) {
    RoiLayoutMap m;
    bool have_eyes = false;
    for (const KvEntry& e : parse_kv_text(text)) {
        if (e.key == "eyes") {
            std::vector<std::string> parts = split(e.value, ',');
            if (parts.size() != 2)
                throw_error(ErrorCode::format_error,
                            "line " + std::to_string(e.line_no) + ": eyes needs two indices");
            m.inner_eye_left = parse_int(parts[0], "eyes");
            m.inner_eye_right = parse_int(parts[1], "eyes");
            have_eyes = true;
        } else if (e.key.rfind("roi.", 0) == 0) {
            RoiLayoutEntry r;
            r.roi_id = parse_int(e.key.substr(4), "roi id");
            std::istringstream fields(e.value);
            std::string lm, role;
            if (!(fields >> lm >> role))
                throw_error(ErrorCode::format_error,
                            "line " + std::to_string(e.line_no) +
                                ": expected '<landmark>[,<landmark>] <role> [dx dy]'");
            std::vector<std::string> lms = split(lm, ',');
            if (lms.size() > 2 || lms.empty())
                throw_error(ErrorCode::format_error,
                            "line " + std::to_string(e.line_no) + ": one or two landmark indices");
            r.landmark_a = parse_int(lms[0], "landmark");
            if (lms.size() == 2) r.landmark_b = parse_int(lms[1], "landmark");
            r.role = roi_role_from_string(role);
            std::string dx, dy;
            if (fields >> dx) {
                if (!(fields >> dy))
                    throw_error(ErrorCode::format_error,
                                "line " + std::to_string(e.line_no) + ": offset needs dx and dy");
                r.offset_x = parse_double(dx, "dx");
                r.offset_y = parse_double(dy, "dy");
            }
            m.rois.push_back(r);
        } else {
            throw_error(ErrorCode::format_error, "line " + std::to_string(e.line_no) +
                                                     ": unknown layout key '" + e.key + "'");
        }
    }
    if (!have_eyes)
        throw_error(ErrorCode::format_error, "layout file must name the inner eye corners");
    m.validate();
    return m;
}

RoiLayoutMap parse_roi_layout_file(const std::filesystem::path& path) {
    return parse_roi_layout_text(read_text_file(path));
}

double inner_eye_distance(const std::vector<Point>& landmarks, const RoiLayoutMap& layout) {
    const Point& a = landmarks.at(static_cast<std::size_t>(layout.inner_eye_left));
    const Point& b = landmarks.at(static_cast<std::size_t>(layout.inner_eye_right));
    double d = std::hypot(a.x - b.x, a.y - b.y);
    if (d < 1e-9)
        throw_error(ErrorCode::degenerate_face, "inner eye corners coincide");
    return d;
}

int roi_side(double inner_eye_dist, const DatasetConfig& config) {
    if (config.size_roi) return *config.size_roi;
    int a = static_cast<int>(std::lround(inner_eye_dist / 5.0));
    return a < 4 ? 4 : a;
}

std::vector<RoiRect> roi_layout(const std::vector<Point>& landmarks, int side,
                                const RoiLayoutMap& layout, int frame_width, int frame_height) {
    if (side > frame_width || side > frame_height)
        throw_error(ErrorCode::roi_out_of_frame, "ROI side " + std::to_string(side) +
                                                     " exceeds frame " + std::to_string(frame_width) +
                                                     "x" + std::to_string(frame_height));
    double eye_dist = inner_eye_distance(landmarks, layout);
    std::vector<RoiRect> rects;
    rects.reserve(layout.rois.size());
    for (const RoiLayoutEntry& e : layout.rois) {
        const Point& a = landmarks.at(static_cast<std::size_t>(e.landmark_a));
        Point c = a;
        if (e.landmark_b) {
            const Point& b = landmarks.at(static_cast<std::size_t>(*e.landmark_b));
            c.x = (a.x + b.x) / 2.0;
            c.y = (a.y + b.y) / 2.0;
        }
        c.x += e.offset_x * eye_dist;
        c.y += e.offset_y * eye_dist;

        RoiRect r;
        r.roi_id = e.roi_id;
        r.role = e.role;
        r.side = side;
        r.left = static_cast<int>(std::llround(c.x)) - side / 2;
        r.top = static_cast<int>(std::llround(c.y)) - side / 2;
        if (r.left < 1) r.left = 1;
        if (r.top < 1) r.top = 1;
        if (r.right() > frame_width) r.left = frame_width - side + 1;
        if (r.bottom() > frame_height) r.top = frame_height - side + 1;
        rects.push_back(r);
    }
    return rects;
}

RoiTrack extract_roi_track(const FrameSequence& seq, int window_start, int window_len,
                           const RoiRect& rect) {
    RoiTrack track;
    track.rect = rect;
    track.frame_count = window_len;
    track.dim = rect.side * rect.side;
    track.data.resize(static_cast<std::size_t>(window_len) * track.dim);
    for (int n = 0; n < window_len; ++n) {
        const Frame& f = seq.frames.at(static_cast<std::size_t>(window_start - 1 + n));
        double* dst = track.data.data() + static_cast<std::size_t>(n) * track.dim;
        for (int row = 0; row < rect.side; ++row) {
            const std::uint8_t* src = f.pixels.data() +
                                      static_cast<std::size_t>(rect.top - 1 + row) * f.width +
                                      (rect.left - 1);
            for (int col = 0; col < rect.side; ++col) dst[row * rect.side + col] = src[col];
        }
    }
    return track;
}

}  // namespace mespot
