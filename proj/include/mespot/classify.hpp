#ifndef MESPOT_CLASSIFY_HPP
#define MESPOT_CLASSIFY_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "mespot/dataio.hpp"
#include "mespot/ltp.hpp"

namespace mespot {

struct LabeledSample {
    std::vector<double> feature;  // [cn, d1..d_{l_interval-1}]
    int label = -1;               // +1 ME pattern, -1 other
    std::string subject_id;
    std::string video_id;
    int roi_id = 0;
    int global_frame = 0;
    double max_distance = 0.0;  // max of the d entries, used by fusion qualification
    double cn = 0.0;
};

/// Labels LTP features of one video: a sample is +1 when (a) the analysis
/// window starting at its frame lies inside a micro ground-truth interval,
/// i.e. frame in [onset, max(onset, offset - l_interval + 1)], and (b) its ROI
/// actually carries the movement: raw response cn * max_distance is at least
/// selection_ratio times the strongest ROI response at that instant. Ground
/// truth names no ROI, so (b) is what keeps the motionless ROIs of a local
/// event out of the positive class; selection_ratio = 0 disables it and labels
/// every ROI at those frames positive. Blinks and macro movements stay -1.
std::vector<LabeledSample> assign_labels(const VideoLtpFeatures& features,
                                         const std::vector<GroundTruthInterval>& ground_truth,
                                         const DatasetConfig& config,
                                         double selection_ratio = 0.0);

struct LosoFold {
    std::string held_out_subject;
    std::vector<std::size_t> train_indices;
    std::vector<std::size_t> test_indices;
};

/// One fold per subject, ordered by subject_id.
std::vector<LosoFold> loso_splits(const std::vector<LabeledSample>& samples);

struct SvmModel {
    std::vector<double> weights;
    double bias = 0.0;
    double c_param = 1.0;
    double weight_positive = 1.0;
    double weight_negative = 1.0;
};

/// L2-regularized class-weighted hinge loss, minimized by a seeded stochastic
/// subgradient descent. Stops when the relative objective change between
/// epochs falls below 1e-6 (or at max_epochs).
SvmModel train_linear_svm(const std::vector<LabeledSample>& samples,
                          const std::vector<std::size_t>& indices, double c_param,
                          double weight_positive, double weight_negative, std::uint64_t seed,
                          int max_epochs = 100000);

SvmModel train_linear_svm(const std::vector<LabeledSample>& samples, double c_param,
                          double weight_positive, double weight_negative, std::uint64_t seed,
                          int max_epochs = 100000);

/// Inverse class frequencies scaled so the smaller weight is 1.
std::pair<double, double> inverse_frequency_weights(const std::vector<LabeledSample>& samples,
                                                    const std::vector<std::size_t>& indices);

struct Prediction {
    double score = 0.0;
    int label = -1;  // ties (score == 0) resolve to -1
};

Prediction predict(const SvmModel& model, const std::vector<double>& feature);

double svm_objective(const SvmModel& model, const std::vector<LabeledSample>& samples,
                     const std::vector<std::size_t>& indices);

/// Text model file with hex-float weights (exact round-trip across platforms).
std::string model_to_text(const SvmModel& model);
SvmModel model_from_text(const std::string& text);
void save_model(const std::filesystem::path& path, const SvmModel& model);
SvmModel load_model(const std::filesystem::path& path);

}  // namespace mespot

#endif
