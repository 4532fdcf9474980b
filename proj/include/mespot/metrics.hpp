#ifndef MESPOT_METRICS_HPP
#define MESPOT_METRICS_HPP

#include <optional>
#include <string>
#include <vector>

#include "mespot/types.hpp"

namespace mespot {

/// Interval IoU with inclusive frame counting: [x, y] spans y - x + 1 frames.
double interval_iou(int onset_a, int offset_a, int onset_b, int offset_b);

struct VideoCounts {
    std::string video_id;
    int m = 0;  // ground-truth micro-expression count
    int n = 0;  // spotted interval count
    int a = 0;  // true positives
    int fp() const { return n - a; }
    int fn() const { return m - a; }
};

/// Pairs with IoU >= k matched greedily in descending IoU (ties: earlier
/// ground-truth onset, then earlier spotted onset); each interval matches at
/// most once.
VideoCounts match_intervals(const std::vector<SpottedInterval>& spotted,
                            const std::vector<GroundTruthInterval>& ground_truth, double k = 0.5);

/// Degenerate denominators yield empty optionals, never 0 or NaN: a video
/// without ground truth has no recall, a method that spots nothing has no
/// precision.
struct VideoMetrics {
    std::optional<double> recall;
    std::optional<double> precision;
    std::optional<double> f1;
};

VideoMetrics video_metrics(const VideoCounts& counts);

struct EvalReport {
    std::vector<VideoCounts> videos;
    long long total_tp = 0;  // A
    long long total_spotted = 0;  // N
    long long total_gt = 0;  // M
    long long total_fp = 0;
    long long total_fn = 0;
    std::optional<double> recall;
    std::optional<double> precision;
    std::optional<double> f1;
};

/// Whole-database metrics treat all videos as one long video: A / M, A / N,
/// and their harmonic mean.
EvalReport database_metrics(const std::vector<VideoCounts>& all_counts);

/// Report files: CSV with one row per video plus an ALL summary row, and a
/// JSON object with the same content.
std::string report_to_csv(const EvalReport& report);
std::string report_to_json(const EvalReport& report);

}  // namespace mespot

#endif
