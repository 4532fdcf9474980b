#ifndef MESPOT_PIPELINE_HPP
#define MESPOT_PIPELINE_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "mespot/classify.hpp"
#include "mespot/fusion.hpp"
#include "mespot/lbpchi2.hpp"
#include "mespot/ltp.hpp"
#include "mespot/manifest.hpp"
#include "mespot/metrics.hpp"

namespace mespot {

/// Classifies one video's LTP features with a trained model and fuses the
/// positives into spotted intervals.
std::vector<SpottedInterval> spot_video_ltp(const VideoLtpFeatures& features,
                                            const SvmModel& model, const FusionParams& fusion,
                                            int l_interval);

struct LosoOptions {
    DatasetConfig config;
    RoiLayoutMap layout;
    FusionParams fusion;
    double c_param = 1.0;
    double k = 0.5;  // IoU threshold for the pooled evaluation
    // Inverse-frequency class weights are clamped here: far below true inverse
    // frequency on long videos, where forcing every positive would drag the
    // boundary into noise territory.
    double max_class_weight = 32.0;
    // Ground truth names no ROI, so training keeps only the ROIs that carry
    // the movement (see assign_labels); 0 labels every ROI positive.
    double label_selection_ratio = 0.5;
    std::uint64_t seed = 1;
    int max_epochs = 100000;
};

struct LosoOutput {
    std::vector<std::pair<std::string, SvmModel>> fold_models;  // by held-out subject
    std::vector<SpottedInterval> intervals;                     // pooled over all folds
    EvalReport report;
};

/// Trains one fold per subject, spots each subject's videos with the model
/// that held that subject out, pools the intervals and evaluates them once
/// against the micro ground truth.
LosoOutput run_loso(const RunManifest& manifest, const std::vector<GroundTruthInterval>& gt,
                    const LosoOptions& options);

/// Per-video counts for pooled intervals vs. micro ground truth. The video
/// universe is video_ids (sorted, deduplicated by the caller); spotted
/// intervals for unknown videos raise unknown_video.
std::vector<VideoCounts> evaluate_intervals(const std::vector<SpottedInterval>& spotted,
                                            const std::vector<GroundTruthInterval>& gt,
                                            const std::vector<std::string>& video_ids, double k);

VideoLtpFeatures extract_video_features(const ManifestVideo& video, const DatasetConfig& config,
                                        const RoiLayoutMap& layout);

}  // namespace mespot

#endif
