#ifndef MESPOT_SYNTH_HPP
#define MESPOT_SYNTH_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "mespot/types.hpp"

namespace mespot {

struct SynthEvent {
    GtKind kind = GtKind::micro;
    int roi_target = -1;  // default layout roi id; micro events require one
    int onset = 0;        // 1-based frame
    int duration = 0;     // frames
    double amplitude = 0.0;  // gray levels at the apex
};

/// Recipe for one synthetic video. Rendering is fully analytic (smooth face
/// plus Gaussian event bumps), so sub-pixel drift is exact and every run with
/// the same seed is bit-identical.
struct SynthSpec {
    std::string video_id = "v01";
    std::string subject_id = "s01";
    int width = 192;
    int height = 144;
    double fps = 30.0;
    double duration_s = 10.0;
    double face_scale = 1.0;
    double face_cx = -1.0;  // < 0: frame center
    double face_cy = -1.0;
    double noise_sigma = 0.0;
    double drift_px_per_s = 0.0;
    std::uint64_t seed = 1;
    std::vector<SynthEvent> events;

    int total_frames() const { return static_cast<int>(fps * duration_s + 0.5); }
};

struct SynthResult {
    FrameSequence video;
    LandmarkTrack landmarks;
    std::vector<GroundTruthInterval> ground_truth;
};

/// The 84-point face template at a given center and scale (indices follow the
/// convention documented in geometry.cpp).
std::vector<Point> face_template(double cx, double cy, double scale);

SynthResult generate_sequence(const SynthSpec& spec);

/// A whole multi-video dataset description, parsed from key=value text with
/// one [video <id>] section per video (see synth.cpp for the format).
struct SynthSuite {
    std::string dataset = "casme2";  // manifest config hint
    std::string format = "packed";   // packed | pgm
    std::vector<SynthSpec> videos;
};

SynthSuite parse_synth_suite_text(const std::string& text);
SynthSuite parse_synth_suite(const std::filesystem::path& path);

/// Renders every video and writes frames, landmark CSVs, gt.csv and
/// manifest.txt under out_dir.
void write_synth_dataset(const SynthSuite& suite, const std::filesystem::path& out_dir);

}  // namespace mespot

#endif
