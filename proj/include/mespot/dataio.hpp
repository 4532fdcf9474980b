#ifndef MESPOT_DATAIO_HPP
#define MESPOT_DATAIO_HPP

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mespot/types.hpp"

namespace mespot {

enum class Dataset { SAMM, CASME2 };

/// Per-database processing parameters. Frame-count parameters follow the
/// owning database's frame rate (the video window is 1 s, its overlap 300 ms,
/// the analysis interval one average micro-expression).
struct DatasetConfig {
    std::string name;
    double fps = 0.0;
    int l_window = 0;
    int l_overlap = 0;
    int l_interval = 0;
    std::optional<int> size_roi;  // fixed ROI side; unset -> derive from inner-eye distance
    double peak_threshold_tau = 0.0;

    void validate() const;
};

/// Built-in parameter sets for the two supported databases.
DatasetConfig dataset_config(Dataset name);
DatasetConfig dataset_config(const std::string& name);

/// key=value config file; `base = samm|casme2` seeds defaults, other keys
/// override: fps, l_window, l_overlap, l_interval, size_roi, tau, name.
DatasetConfig parse_config_file(const std::filesystem::path& path);

struct VideoMeta {
    std::string video_id;
    std::string subject_id;
    double fps = 0.0;
    int first_index = 1;
};

/// Loads either a directory of 8-bit PGM (P5) frames, ordered by filename,
/// or one packed raw video file (see packed header docs in dataio.cpp).
FrameSequence load_frame_sequence(const std::filesystem::path& path, const VideoMeta& meta);

Frame read_pgm(const std::filesystem::path& path);
void write_pgm(const std::filesystem::path& path, const Frame& frame);

FrameSequence read_packed_video(const std::filesystem::path& path, const VideoMeta& meta);
void write_packed_video(const std::filesystem::path& path, const FrameSequence& seq);

/// Landmark CSV rows: frame_idx, x1, y1, ..., x84, y84 (169 columns).
/// Frames missing between tracked rows are filled by linear interpolation.
LandmarkTrack parse_landmark_track(const std::filesystem::path& path);
LandmarkTrack parse_landmark_track_text(const std::string& text);
std::string landmark_track_to_csv(const LandmarkTrack& track);

/// Ground-truth CSV rows: video_id, kind, onset, apex, offset (apex may be
/// empty). Output is sorted by (video_id, onset).
std::vector<GroundTruthInterval> parse_ground_truth(const std::filesystem::path& path);
std::vector<GroundTruthInterval> parse_ground_truth_text(const std::string& text);
std::string ground_truth_to_csv(const std::vector<GroundTruthInterval>& intervals);

}  // namespace mespot

#endif
