#include "mespot/lbpchi2.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

namespace mespot {

namespace {

int circular_transitions(unsigned code) {
    int t = 0;
    for (int i = 0; i < 8; ++i) {
        unsigned a = (code >> i) & 1u;
        unsigned b = (code >> ((i + 1) % 8)) & 1u;
        if (a != b) ++t;
    }
    return t;
}

}  // namespace

const std::array<std::uint8_t, 256>& uniform_lbp_bins() {
    static const std::array<std::uint8_t, 256> table = [] {
        std::array<std::uint8_t, 256> t{};
        std::uint8_t next = 0;
        for (unsigned code = 0; code < 256; ++code)
            t[code] = circular_transitions(code) <= 2 ? next++ : kLbpBins - 1;
        return t;
    }();
    return table;
}

std::vector<double> lbp_histogram(const PixelBlock& block, int radius, int neighbors) {
    if (neighbors != kLbpNeighbors)
        throw_error(ErrorCode::format_error, "lbp_histogram supports p = 8 only");
    if (block.width < 2 * radius + 1 || block.height < 2 * radius + 1)
        throw_error(ErrorCode::block_too_small,
                    "block " + std::to_string(block.width) + "x" + std::to_string(block.height) +
                        " smaller than " + std::to_string(2 * radius + 1) + "^2");

    // Precompute sampling taps once per call; the arithmetic below mirrors the
    // contract spelled out in the header.
    struct Tap {
        int ix, iy;
        double w00, w10, w01, w11;
    };
    Tap taps[kLbpNeighbors];
    for (int k = 0; k < kLbpNeighbors; ++k) {
        double angle = (2.0 * std::numbers::pi * k) / kLbpNeighbors;
        double sx = radius * std::cos(angle);
        double sy = -(radius * std::sin(angle));
        double x0 = std::floor(sx);
        double y0 = std::floor(sy);
        double fx = sx - x0;
        double fy = sy - y0;
        taps[k].ix = static_cast<int>(x0);
        taps[k].iy = static_cast<int>(y0);
        taps[k].w00 = (1 - fx) * (1 - fy);
        taps[k].w10 = fx * (1 - fy);
        taps[k].w01 = (1 - fx) * fy;
        taps[k].w11 = fx * fy;
    }

    const auto& bins = uniform_lbp_bins();
    std::array<std::int64_t, kLbpBins> counts{};
    for (int y = radius; y < block.height - radius; ++y) {
        for (int x = radius; x < block.width - radius; ++x) {
            const double center = block.at(x, y);
            unsigned code = 0;
            for (int k = 0; k < kLbpNeighbors; ++k) {
                const Tap& t = taps[k];
                int bx = x + t.ix;
                int by = y + t.iy;
                double v = t.w00 * block.at(bx, by) + t.w10 * block.at(bx + 1, by) +
                           t.w01 * block.at(bx, by + 1) + t.w11 * block.at(bx + 1, by + 1);
                if (v >= center - kLbpThresholdSlack) code |= 1u << k;
            }
            ++counts[bins[code]];
        }
    }

    const double total = static_cast<double>((block.width - 2 * radius) *
                                             static_cast<std::int64_t>(block.height - 2 * radius));
    std::vector<double> hist(kLbpBins);
    for (int b = 0; b < kLbpBins; ++b) hist[static_cast<std::size_t>(b)] = counts[b] / total;
    return hist;
}

BlockRect face_region(const std::vector<Point>& landmarks, int frame_width, int frame_height) {
    double min_x = landmarks.front().x, max_x = landmarks.front().x;
    double min_y = landmarks.front().y, max_y = landmarks.front().y;
    for (const Point& p : landmarks) {
        min_x = std::min(min_x, p.x);
        max_x = std::max(max_x, p.x);
        min_y = std::min(min_y, p.y);
        max_y = std::max(max_y, p.y);
    }
    double w = max_x - min_x;
    double h = max_y - min_y;
    min_x -= 0.05 * w;
    max_x += 0.05 * w;
    min_y -= 0.05 * h;
    max_y += 0.05 * h;
    int x0 = std::max(0, static_cast<int>(std::floor(min_x)) - 1);  // 0-based
    int y0 = std::max(0, static_cast<int>(std::floor(min_y)) - 1);
    int x1 = std::min(frame_width - 1, static_cast<int>(std::ceil(max_x)));
    int y1 = std::min(frame_height - 1, static_cast<int>(std::ceil(max_y)));
    if (x1 <= x0 || y1 <= y0)
        throw_error(ErrorCode::degenerate_face, "landmark bounding box has no area");
    return {x0, y0, x1 - x0 + 1, y1 - y0 + 1};
}

BlockGrid build_block_grid(const BlockRect& region) {
    // 6 blocks per axis, neighbors overlapping by 0.2 (x) and 0.3 (y) of the
    // block size: width = bw + 5 * 0.8 * bw, height = bh + 5 * 0.7 * bh.
    const double bw = region.width / 5.0;
    const double bh = region.height / 4.5;
    const double stride_x = 0.8 * bw;
    const double stride_y = 0.7 * bh;
    const int ibw = static_cast<int>(std::lround(bw));
    const int ibh = static_cast<int>(std::lround(bh));
    if (ibw < 2 * kLbpRadius + 1 || ibh < 2 * kLbpRadius + 1)
        throw_error(ErrorCode::block_too_small,
                    "face region " + std::to_string(region.width) + "x" +
                        std::to_string(region.height) + " yields blocks below " +
                        std::to_string(2 * kLbpRadius + 1) + " px");
    BlockGrid grid;
    grid.blocks.reserve(kGridBlocks);
    for (int row = 0; row < 6; ++row) {
        for (int col = 0; col < 6; ++col) {
            BlockRect b;
            b.width = ibw;
            b.height = ibh;
            b.x0 = region.x0 + static_cast<int>(std::lround(col * stride_x));
            b.y0 = region.y0 + static_cast<int>(std::lround(row * stride_y));
            if (b.x0 + b.width > region.x0 + region.width) b.x0 = region.x0 + region.width - b.width;
            if (b.y0 + b.height > region.y0 + region.height)
                b.y0 = region.y0 + region.height - b.height;
            grid.blocks.push_back(b);
        }
    }
    return grid;
}

namespace {

std::vector<double> frame_feature(const Frame& frame, const BlockGrid& grid) {
    std::vector<double> feat;
    feat.reserve(grid.blocks.size() * kLbpBins);
    for (const BlockRect& b : grid.blocks) {
        PixelBlock block{frame.pixels.data() + static_cast<std::size_t>(b.y0) * frame.width + b.x0,
                         frame.width, b.width, b.height};
        std::vector<double> hist = lbp_histogram(block);
        feat.insert(feat.end(), hist.begin(), hist.end());
    }
    return feat;
}

}  // namespace

std::vector<std::vector<double>> lbp_video_features_serial(const FrameSequence& video,
                                                           const BlockGrid& grid) {
    std::vector<std::vector<double>> features(video.frames.size());
    for (std::size_t i = 0; i < video.frames.size(); ++i)
        features[i] = frame_feature(video.frames[i], grid);
    return features;
}

std::vector<std::vector<double>> lbp_video_features(const FrameSequence& video,
                                                    const BlockGrid& grid) {
    std::vector<std::vector<double>> features(video.frames.size());
    const int n = static_cast<int>(video.frames.size());
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i)
        features[static_cast<std::size_t>(i)] = frame_feature(video.frames[static_cast<std::size_t>(i)], grid);
    return features;
}

double chi2_distance(const std::vector<double>& h1, const std::vector<double>& h2) {
    if (h1.size() != h2.size())
        throw_error(ErrorCode::dimension_mismatch,
                    "chi2_distance: " + std::to_string(h1.size()) + " vs " +
                        std::to_string(h2.size()) + " bins");
    double sum = 0.0;
    for (std::size_t i = 0; i < h1.size(); ++i) {
        double s = h1[i] + h2[i];
        if (s <= 0.0) continue;
        double d = h1[i] - h2[i];
        sum += d * d / s;
    }
    return sum;
}

DifferenceCurve difference_curve(const std::vector<std::vector<double>>& frame_features,
                                 int l_interval) {
    const int total = static_cast<int>(frame_features.size());
    const int l = l_interval;
    if (total <= 2 * l)
        throw_error(ErrorCode::video_too_short, "difference_curve needs more than " +
                                                    std::to_string(2 * l) + " frames, got " +
                                                    std::to_string(total));
    DifferenceCurve curve;
    curve.total_frames = total;
    curve.l_interval = l;
    curve.d.assign(static_cast<std::size_t>(total) + 1, 0.0);
    curve.c.assign(static_cast<std::size_t>(total) + 1, 0.0);

    std::vector<double> avg(frame_features.front().size());
    for (int i = l + 1; i <= total - l; ++i) {
        const auto& before = frame_features[static_cast<std::size_t>(i - l - 1)];
        const auto& after = frame_features[static_cast<std::size_t>(i + l - 1)];
        for (std::size_t j = 0; j < avg.size(); ++j) avg[j] = (before[j] + after[j]) / 2.0;
        curve.d[static_cast<std::size_t>(i)] =
            chi2_distance(frame_features[static_cast<std::size_t>(i - 1)], avg);
    }
    for (int i = l + 1; i <= total - l; ++i) {
        // flanking indices clamp into the defined range of d, otherwise the
        // zero padding would inflate contrast near the video edges
        int lo = std::max(i - l, l + 1);
        int hi = std::min(i + l, total - l);
        double contrast = curve.d[static_cast<std::size_t>(i)] -
                          0.5 * (curve.d[static_cast<std::size_t>(lo)] +
                                 curve.d[static_cast<std::size_t>(hi)]);
        curve.c[static_cast<std::size_t>(i)] = std::max(0.0, contrast);
    }
    return curve;
}

std::vector<SpottedInterval> spot_peaks(const DifferenceCurve& curve,
                                        const std::vector<WindowSpan>& spans, double tau,
                                        int l_interval, const std::string& video_id,
                                        int first_index) {
    const int total = curve.total_frames;
    double mean = 0.0;
    double max_c = 0.0;
    int valid = 0;
    for (int i = curve.valid_begin(); i <= curve.valid_end(); ++i) {
        double v = curve.c[static_cast<std::size_t>(i)];
        mean += v;
        max_c = std::max(max_c, v);
        ++valid;
    }
    if (valid > 0) mean /= valid;
    const double threshold = mean + tau * (max_c - mean);

    std::vector<SpottedInterval> raw;
    for (const WindowSpan& span : spans) {
        int peak = 0;
        double peak_value = -1.0;
        for (int i = std::max(1, span.start); i <= std::min(total, span.end); ++i) {
            double v = curve.c[static_cast<std::size_t>(i)];
            if (v > peak_value) {
                peak_value = v;
                peak = i;
            }
        }
        if (peak == 0 || peak_value <= threshold) continue;
        SpottedInterval si;
        si.video_id = video_id;
        si.onset = std::max(1, peak - l_interval) + first_index - 1;
        si.offset = std::min(total, peak + l_interval) + first_index - 1;
        si.score = peak_value;
        si.source = SpotSource::lbp_chi2;
        raw.push_back(si);
    }

    std::sort(raw.begin(), raw.end(), [](const SpottedInterval& a, const SpottedInterval& b) {
        return a.onset != b.onset ? a.onset < b.onset : a.offset < b.offset;
    });
    std::vector<SpottedInterval> merged;
    for (const SpottedInterval& si : raw) {
        if (!merged.empty() && si.onset <= merged.back().offset) {
            merged.back().offset = std::max(merged.back().offset, si.offset);
            merged.back().score = std::max(merged.back().score, si.score);
        } else {
            merged.push_back(si);
        }
    }
    return merged;
}

LbpSpotResult spot_lbp_chi2(const FrameSequence& video, const LandmarkTrack& landmarks,
                            const DatasetConfig& config, double tau_override) {
    if (video.frames.empty()) throw_error(ErrorCode::empty_video, video.video_id + ": no frames");
    const Frame& first = video.frames.front();
    BlockRect region = face_region(landmarks.at_frame(video.first_index), first.width, first.height);
    BlockGrid grid = build_block_grid(region);
    std::vector<std::vector<double>> features = lbp_video_features(video, grid);

    LbpSpotResult result;
    result.curve = difference_curve(features, config.l_interval);
    double tau = tau_override >= 0.0 ? tau_override : config.peak_threshold_tau;
    result.intervals = spot_peaks(result.curve, segment_video(video.frame_count(), config), tau,
                                  config.l_interval, video.video_id, video.first_index);
    return result;
}

std::string curve_to_csv(const std::string& video_id, const DifferenceCurve& curve,
                         int first_index) {
    std::ostringstream out;
    char buf[32];
    for (int i = 1; i <= curve.total_frames; ++i) {
        out << video_id << ',' << (i + first_index - 1);
        std::snprintf(buf, sizeof buf, "%.9g", curve.d[static_cast<std::size_t>(i)]);
        out << ',' << buf;
        std::snprintf(buf, sizeof buf, "%.9g", curve.c[static_cast<std::size_t>(i)]);
        out << ',' << buf << '\n';
    }
    return out.str();
}

}  // namespace mespot
