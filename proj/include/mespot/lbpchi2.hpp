#ifndef MESPOT_LBPCHI2_HPP
#define MESPOT_LBPCHI2_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "mespot/dataio.hpp"
#include "mespot/types.hpp"
#include "mespot/windowing.hpp"

namespace mespot {

inline constexpr int kLbpRadius = 3;
inline constexpr int kLbpNeighbors = 8;
inline constexpr int kLbpBins = 59;  // 58 uniform patterns + 1 catch-all
inline constexpr int kGridBlocks = 36;

/// Code -> histogram bin. Uniform patterns (<= 2 circular bit transitions)
/// map to 0..57 in ascending code order; everything else maps to bin 58.
const std::array<std::uint8_t, 256>& uniform_lbp_bins();

/// Read-only view of a rectangular pixel region inside a frame.
struct PixelBlock {
    const std::uint8_t* data = nullptr;  // top-left pixel
    int stride = 0;
    int width = 0;
    int height = 0;

    std::uint8_t at(int x, int y) const { return data[static_cast<std::size_t>(y) * stride + x]; }
};

/// Neighbor sample contract, shared with the test oracle so that histograms
/// compare bit-exactly: neighbor k of pixel (x, y) sits at
///   sx = x + r*cos(2*pi*k/p),  sy = y - r*sin(2*pi*k/p)
/// and is read with bilinear interpolation evaluated exactly as
///   v = w00*p(x0,y0) + w10*p(x0+1,y0) + w01*p(x0,y0+1) + w11*p(x0+1,y0+1)
/// with x0 = floor(sx), fx = sx - x0 (same for y), w00 = (1-fx)*(1-fy),
/// w10 = fx*(1-fy), w01 = (1-fx)*fy, w11 = fx*fy. Bit k is set when
/// v >= center - 1e-6; the slack keeps exact-tie neighbors (e.g. constant
/// blocks) on the >= side despite interpolation round-off.
inline constexpr double kLbpThresholdSlack = 1e-6;

/// 59-bin uniform LBP histogram of one block, normalized to sum 1.
std::vector<double> lbp_histogram(const PixelBlock& block, int radius = kLbpRadius,
                                  int neighbors = kLbpNeighbors);

struct BlockRect {
    int x0 = 0;  // 0-based
    int y0 = 0;
    int width = 0;
    int height = 0;
};

/// 6x6 block grid over the face region with 0.2 / 0.3 overlap between
/// neighboring blocks on x / y.
struct BlockGrid {
    std::vector<BlockRect> blocks;  // exactly 36, row-major
};

/// Face region = bounding box of the 84 landmarks, expanded by 10% and
/// clamped to the frame.
BlockRect face_region(const std::vector<Point>& landmarks, int frame_width, int frame_height);

BlockGrid build_block_grid(const BlockRect& region);

/// Per-frame concatenated block histograms (36 * 59 values per frame).
std::vector<std::vector<double>> lbp_video_features(const FrameSequence& video,
                                                    const BlockGrid& grid);

/// Single-threaded reference for the OpenMP path above; outputs are identical.
std::vector<std::vector<double>> lbp_video_features_serial(const FrameSequence& video,
                                                           const BlockGrid& grid);

/// Chi-square histogram distance, sum((a-b)^2 / (a+b)) with 0/0 -> 0.
double chi2_distance(const std::vector<double>& h1, const std::vector<double>& h2);

/// Per-frame feature difference (d) and contrasted (c) values, 1-based frame
/// indexing with element 0 unused. Both are zero outside [l_interval+1,
/// total_frames - l_interval].
struct DifferenceCurve {
    std::vector<double> d;
    std::vector<double> c;
    int total_frames = 0;
    int l_interval = 0;
    int valid_begin() const { return l_interval + 1; }
    int valid_end() const { return total_frames - l_interval; }
};

DifferenceCurve difference_curve(const std::vector<std::vector<double>>& frame_features,
                                 int l_interval);

/// Per sub-video peak selection: each span contributes its maximal contrast
/// value; peaks above the video-wide threshold
///   T = mean(c) + tau * (max(c) - mean(c))   (statistics over the valid range)
/// emit [peak - l_interval, peak + l_interval] clipped to the video; emissions
/// that overlap are merged (union, max score).
std::vector<SpottedInterval> spot_peaks(const DifferenceCurve& curve,
                                        const std::vector<WindowSpan>& spans, double tau,
                                        int l_interval, const std::string& video_id,
                                        int first_index = 1);

/// Whole pipeline for one video; the block grid is anchored on the first
/// frame's landmarks.
struct LbpSpotResult {
    std::vector<SpottedInterval> intervals;
    DifferenceCurve curve;
};

LbpSpotResult spot_lbp_chi2(const FrameSequence& video, const LandmarkTrack& landmarks,
                            const DatasetConfig& config, double tau_override = -1.0);

/// CSV dump: video_id, frame, d, c.
std::string curve_to_csv(const std::string& video_id, const DifferenceCurve& curve,
                         int first_index = 1);

}  // namespace mespot

#endif
