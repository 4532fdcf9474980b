#include "mespot/pipeline.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "mespot/dataio.hpp"

namespace mespot {

std::vector<SpottedInterval> spot_video_ltp(const VideoLtpFeatures& features,
                                            const SvmModel& model, const FusionParams& fusion,
                                            int l_interval) {
    std::vector<RoiPositive> positives;
    for (int roi = 0; roi < kRoiCount; ++roi) {
        for (const LtpFeature& f : features.per_roi[static_cast<std::size_t>(roi)]) {
            Prediction p = predict(model, f.to_vector());
            if (p.label <= 0) continue;
            RoiPositive pos;
            pos.roi_id = f.roi_id;
            pos.role = features.roles[static_cast<std::size_t>(roi)];
            pos.global_frame = f.global_frame;
            pos.cn = f.cn;
            pos.max_distance = f.distances.empty()
                                   ? 0.0
                                   : *std::max_element(f.distances.begin(), f.distances.end());
            pos.score = p.score;
            positives.push_back(pos);
        }
    }
    const int first = features.first_index;
    const int last = features.first_index + features.total_frames - 1;
    return fuse_video(positives, fusion, l_interval, features.video_id, first, last);
}

VideoLtpFeatures extract_video_features(const ManifestVideo& video, const DatasetConfig& config,
                                        const RoiLayoutMap& layout) {
    VideoMeta meta{video.video_id, video.subject_id, config.fps, video.first_index};
    FrameSequence seq = load_frame_sequence(video.frames, meta);
    LandmarkTrack landmarks = parse_landmark_track(video.landmarks);
    return extract_ltp_features(seq, landmarks, config, layout);
}

std::vector<VideoCounts> evaluate_intervals(const std::vector<SpottedInterval>& spotted,
                                            const std::vector<GroundTruthInterval>& gt,
                                            const std::vector<std::string>& video_ids, double k) {
    std::set<std::string> known(video_ids.begin(), video_ids.end());
    std::map<std::string, std::vector<SpottedInterval>> spotted_by_video;
    for (const SpottedInterval& si : spotted) {
        if (!known.count(si.video_id))
            throw_error(ErrorCode::unknown_video,
                        "spotted interval names unknown video '" + si.video_id + "'");
        spotted_by_video[si.video_id].push_back(si);
    }
    std::map<std::string, std::vector<GroundTruthInterval>> gt_by_video;
    for (const GroundTruthInterval& g : gt)
        if (g.kind == GtKind::micro && known.count(g.video_id)) gt_by_video[g.video_id].push_back(g);

    std::vector<VideoCounts> counts;
    counts.reserve(video_ids.size());
    for (const std::string& vid : video_ids) {
        VideoCounts c = match_intervals(spotted_by_video[vid], gt_by_video[vid], k);
        c.video_id = vid;
        counts.push_back(c);
    }
    return counts;
}

LosoOutput run_loso(const RunManifest& manifest, const std::vector<GroundTruthInterval>& gt,
                    const LosoOptions& options) {
    // Features first: every fold reuses them, only labels and folds differ.
    std::vector<VideoLtpFeatures> features;
    features.reserve(manifest.videos.size());
    std::vector<LabeledSample> samples;
    for (const ManifestVideo& v : manifest.videos) {
        VideoLtpFeatures f = extract_video_features(v, options.config, options.layout);
        std::vector<LabeledSample> labeled =
            assign_labels(f, gt, options.config, options.label_selection_ratio);
        samples.insert(samples.end(), labeled.begin(), labeled.end());
        features.push_back(std::move(f));
    }

    LosoOutput out;
    std::vector<LosoFold> folds = loso_splits(samples);
    for (const LosoFold& fold : folds) {
        auto [w_pos, w_neg] = inverse_frequency_weights(samples, fold.train_indices);
        w_pos = std::min(w_pos, options.max_class_weight);
        w_neg = std::min(w_neg, options.max_class_weight);
        SvmModel model = train_linear_svm(samples, fold.train_indices, options.c_param, w_pos,
                                          w_neg, options.seed, options.max_epochs);
        for (const VideoLtpFeatures& f : features) {
            if (f.subject_id != fold.held_out_subject) continue;
            std::vector<SpottedInterval> intervals =
                spot_video_ltp(f, model, options.fusion, options.config.l_interval);
            out.intervals.insert(out.intervals.end(), intervals.begin(), intervals.end());
        }
        out.fold_models.emplace_back(fold.held_out_subject, std::move(model));
    }

    std::sort(out.intervals.begin(), out.intervals.end(),
              [](const SpottedInterval& a, const SpottedInterval& b) {
                  if (a.video_id != b.video_id) return a.video_id < b.video_id;
                  return a.onset < b.onset;
              });

    std::vector<std::string> video_ids;
    for (const ManifestVideo& v : manifest.videos) video_ids.push_back(v.video_id);
    std::sort(video_ids.begin(), video_ids.end());
    out.report = database_metrics(evaluate_intervals(out.intervals, gt, video_ids, options.k));
    return out;
}

}  // namespace mespot
