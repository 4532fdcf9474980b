#ifndef MESPOT_LTP_HPP
#define MESPOT_LTP_HPP

#include <array>
#include <string>
#include <vector>

#include "mespot/geometry.hpp"
#include "mespot/types.hpp"
#include "mespot/windowing.hpp"

namespace mespot {

/// A ROI window's frames projected onto the top two temporal principal
/// components: point n is basis * (frame_n - mean).
struct ProjectedTrack {
    std::vector<Point> points;
    std::vector<double> basis;  // 2 x dim, row-major; rows orthonormal (or zero)
    std::vector<double> mean;   // dim
    double variance_captured = 0.0;
    int dim = 0;
};

/// PCA on the temporal axis of one ROI track. Zero-variance tracks project to
/// the origin with a zero basis and variance_captured defined as 1. Basis rows
/// are sign-fixed: the largest-magnitude entry of each row is non-negative.
ProjectedTrack temporal_pca(const RoiTrack& track);

/// Distances from point n to the following l_interval-1 points (fewer near the
/// track end). n is 1-based within the track.
std::vector<double> distance_pattern(const ProjectedTrack& proj, int n, int l_interval);

/// One raw intra-window distance set, before per-ROI normalization.
struct RawPattern {
    int roi_id = 0;
    int global_frame = 0;  // 1-based frame index in the owning video
    int span_index = 0;
    std::vector<double> deltas;
};

/// One frame's local temporal pattern after normalization.
struct LtpFeature {
    int roi_id = 0;
    int global_frame = 0;
    int span_index = 0;
    double cn = 0.0;                // per-ROI normalization coefficient
    std::vector<double> distances;  // length l_interval - 1, zero-padded, each in [0, 1]

    /// Classifier input layout: [cn, d1, ..., d_{l_interval-1}].
    std::vector<double> to_vector() const;
};

/// Divides every raw distance of one ROI by the ROI's maximum over the whole
/// video (cn); all-zero ROIs keep cn = 0 and all-zero distances. Patterns are
/// zero-padded to l_interval - 1 entries.
std::vector<LtpFeature> normalize_roi(const std::vector<RawPattern>& patterns, int l_interval);

/// All 12 ROI feature sequences of one video: window segmentation, per-span
/// per-ROI temporal PCA, intra-window distance sets, then global per-ROI
/// normalization. Features are ordered by (span, frame) per ROI.
struct VideoLtpFeatures {
    std::string video_id;
    std::string subject_id;
    std::array<std::vector<LtpFeature>, kRoiCount> per_roi;
    std::array<RoiRole, kRoiCount> roles{};
    int total_frames = 0;
    int first_index = 1;
};

VideoLtpFeatures extract_ltp_features(const FrameSequence& video, const LandmarkTrack& landmarks,
                                      const DatasetConfig& config, const RoiLayoutMap& layout);

/// Single-threaded reference for the OpenMP path above; outputs are identical.
VideoLtpFeatures extract_ltp_features_serial(const FrameSequence& video,
                                             const LandmarkTrack& landmarks,
                                             const DatasetConfig& config,
                                             const RoiLayoutMap& layout);

/// CSV dump: video_id, roi_id, global_frame, cn, d1..d{l_interval-1}.
std::string ltp_features_to_csv(const VideoLtpFeatures& features);

}  // namespace mespot

#endif
