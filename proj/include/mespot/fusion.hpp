#ifndef MESPOT_FUSION_HPP
#define MESPOT_FUSION_HPP

#include <string>
#include <vector>

#include "mespot/classify.hpp"
#include "mespot/geometry.hpp"
#include "mespot/types.hpp"

namespace mespot {

/// Tunables of the local-to-global fusion pass. t_tolerance <= 0 means
/// "derive from l_interval" (l_interval / 3, rounded).
struct FusionParams {
    double d_min = 0.2;
    int t_tolerance = 0;
    int k_max_rois = 6;
    int merge_gap = 0;  // <= 0: ceil(l_interval / 2)
    bool nose_veto = true;

    int tolerance_for(int l_interval) const;
    int merge_gap_for(int l_interval) const;
};

/// Reads optional fusion.* keys (d_min, t_tolerance, k_max, merge_gap,
/// nose_veto) from a key=value config file; missing keys keep defaults.
FusionParams fusion_params_from_config(const std::filesystem::path& path);

/// One positively classified LTP instant.
struct RoiPositive {
    int roi_id = 0;
    RoiRole role = RoiRole::eyebrow;
    int global_frame = 0;
    double max_distance = 0.0;  // max normalized distance of the feature
    double cn = 0.0;
    double score = 0.0;
};

/// Drops positives without real motion amplitude: max normalized distance
/// below d_min, or a ROI whose normalization coefficient is 0.
std::vector<RoiPositive> local_qualification(const std::vector<RoiPositive>& positives,
                                             const FusionParams& params);

/// Frames where at least one non-nose ROI fired within +-tolerance, no nose
/// reference fired (unless the veto is disabled), and at most k_max distinct
/// ROIs fired: local motion that is neither global head movement nor
/// face-wide action.
std::vector<int> spatial_fusion(const std::vector<RoiPositive>& qualified,
                                const FusionParams& params, int l_interval);

/// Expands each candidate instant to l_interval frames and merges runs whose
/// gap is at most merge_gap; score = number of contributing instants.
std::vector<SpottedInterval> merge_intervals(const std::vector<int>& instants, int l_interval,
                                             const FusionParams& params, const std::string& video_id,
                                             int first_frame, int last_frame);

/// Full fusion for one video's classified features.
std::vector<SpottedInterval> fuse_video(const std::vector<RoiPositive>& positives,
                                        const FusionParams& params, int l_interval,
                                        const std::string& video_id, int first_frame,
                                        int last_frame);

/// Spotted-interval CSV: video_id, onset, offset, score, source.
std::string intervals_to_csv(const std::vector<SpottedInterval>& intervals);
std::vector<SpottedInterval> parse_intervals_csv_text(const std::string& text);
std::vector<SpottedInterval> parse_intervals_csv(const std::filesystem::path& path);

}  // namespace mespot

#endif
