#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "mespot/lbpchi2.hpp"
#include "mespot/synth.hpp"

using namespace mespot;

namespace {

Frame random_frame(int w, int h, std::mt19937& rng) {
    Frame f;
    f.width = w;
    f.height = h;
    f.pixels.resize(static_cast<std::size_t>(w) * h);
    std::uniform_int_distribution<int> px(0, 255);
    for (auto& p : f.pixels) p = static_cast<std::uint8_t>(px(rng));
    return f;
}

// Naive per-pixel oracle. Recomputes everything from scratch per neighbor; the
// bilinear expression and threshold slack follow the sampling contract in
// lbpchi2.hpp verbatim, which is what makes bit-exact comparison meaningful.
int oracle_transitions(unsigned code) {
    int t = 0;
    for (int i = 0; i < 8; ++i)
        if (((code >> i) & 1u) != ((code >> ((i + 1) % 8)) & 1u)) ++t;
    return t;
}

std::vector<double> oracle_lbp_histogram(const Frame& frame, int x0, int y0, int w, int h) {
    const int r = 3, p = 8;
    std::vector<int> uniform_bin(256, -1);
    int next = 0;
    for (int code = 0; code < 256; ++code)
        uniform_bin[static_cast<std::size_t>(code)] =
            oracle_transitions(static_cast<unsigned>(code)) <= 2 ? next++ : 58;

    std::vector<std::int64_t> counts(59, 0);
    for (int y = r; y < h - r; ++y) {
        for (int x = r; x < w - r; ++x) {
            double center = frame.at(x0 + x, y0 + y);
            unsigned code = 0;
            for (int k = 0; k < p; ++k) {
                double angle = (2.0 * std::numbers::pi * k) / p;
                double sx = r * std::cos(angle);
                double sy = -(r * std::sin(angle));
                double fx0 = std::floor(sx);
                double fy0 = std::floor(sy);
                double fx = sx - fx0;
                double fy = sy - fy0;
                int ix = x + static_cast<int>(fx0);
                int iy = y + static_cast<int>(fy0);
                double w00 = (1 - fx) * (1 - fy);
                double w10 = fx * (1 - fy);
                double w01 = (1 - fx) * fy;
                double w11 = fx * fy;
                double v = w00 * frame.at(x0 + ix, y0 + iy) + w10 * frame.at(x0 + ix + 1, y0 + iy) +
                           w01 * frame.at(x0 + ix, y0 + iy + 1) +
                           w11 * frame.at(x0 + ix + 1, y0 + iy + 1);
                if (v >= center - 1e-6) code |= 1u << k;
            }
            ++counts[static_cast<std::size_t>(uniform_bin[code])];
        }
    }
    double total = static_cast<double>((w - 2 * r) * (h - 2 * r));
    std::vector<double> hist(59);
    for (int b = 0; b < 59; ++b) hist[static_cast<std::size_t>(b)] = counts[static_cast<std::size_t>(b)] / total;
    return hist;
}

PixelBlock block_of(const Frame& f, int x0, int y0, int w, int h) {
    return {f.pixels.data() + static_cast<std::size_t>(y0) * f.width + x0, f.width, w, h};
}

}  // namespace

TEST_CASE("uniform mapping has 58 uniform patterns plus a catch-all") {
    const auto& bins = uniform_lbp_bins();
    int uniform = 0;
    int expected_next = 0;
    for (int code = 0; code < 256; ++code) {
        if (bins[static_cast<std::size_t>(code)] != 58) {
            CHECK(bins[static_cast<std::size_t>(code)] == expected_next);  // ascending code order
            ++expected_next;
            ++uniform;
        }
    }
    CHECK(uniform == 58);
    CHECK(bins[0] != 58);    // all zeros is uniform
    CHECK(bins[255] != 58);  // all ones is uniform
}

TEST_CASE("constant block maps every pixel to the all-ones pattern") {
    Frame f;
    f.width = f.height = 16;
    f.pixels.assign(256, 90);
    std::vector<double> hist = lbp_histogram(block_of(f, 0, 0, 16, 16));
    REQUIRE(hist.size() == 59);
    CHECK(hist[uniform_lbp_bins()[255]] == doctest::Approx(1.0));
    double sum = 0.0;
    for (double v : hist) sum += v;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("lbp_histogram matches the naive oracle bit-exactly") {
    std::mt19937 rng(1234);
    for (int it = 0; it < 100; ++it) {
        Frame f = random_frame(32, 32, rng);
        std::vector<double> got = lbp_histogram(block_of(f, 0, 0, 32, 32));
        std::vector<double> expect = oracle_lbp_histogram(f, 0, 0, 32, 32);
        REQUIRE(got.size() == expect.size());
        for (std::size_t b = 0; b < got.size(); ++b) CHECK(got[b] == expect[b]);
        double sum = 0.0;
        for (double v : got) sum += v;
        CHECK(std::abs(sum - 1.0) <= 1e-9);
    }
}

TEST_CASE("lbp_histogram rejects undersized blocks") {
    Frame f;
    f.width = f.height = 6;
    f.pixels.assign(36, 0);
    CHECK_THROWS_AS(lbp_histogram(block_of(f, 0, 0, 6, 6)), Error);
}

TEST_CASE("chi2_distance basics") {
    CHECK(chi2_distance({0.3, 0.7}, {0.3, 0.7}) == 0.0);
    CHECK(chi2_distance({1, 0}, {0, 1}) == doctest::Approx(2.0));
    CHECK(chi2_distance({0, 0}, {0, 0}) == 0.0);  // 0/0 convention
    CHECK_THROWS_AS(chi2_distance({1, 2}, {1, 2, 3}), Error);
}

TEST_CASE("chi2_distance symmetry and non-negativity") {
    std::mt19937 rng(9);
    std::uniform_real_distribution<double> v(0.0, 1.0);
    for (int it = 0; it < 200; ++it) {
        std::vector<double> a(59), b(59);
        for (auto& x : a) x = v(rng);
        for (auto& x : b) x = v(rng);
        double ab = chi2_distance(a, b);
        CHECK(ab >= 0.0);
        CHECK(ab == chi2_distance(b, a));
    }
}

namespace {

// synthetic per-frame features: identical histograms except around an impulse
std::vector<std::vector<double>> impulse_features(int total, int impulse_at) {
    std::vector<std::vector<double>> feats(static_cast<std::size_t>(total),
                                           std::vector<double>{0.5, 0.5, 0.0});
    feats[static_cast<std::size_t>(impulse_at - 1)] = {0.0, 0.5, 0.5};
    return feats;
}

}  // namespace

TEST_CASE("difference_curve is zero on a static video") {
    std::vector<std::vector<double>> feats(40, std::vector<double>{0.25, 0.25, 0.5});
    DifferenceCurve c = difference_curve(feats, 9);
    for (int i = 1; i <= 40; ++i) CHECK(c.c[static_cast<std::size_t>(i)] == 0.0);
}

TEST_CASE("difference_curve peaks at an impulse and is zero outside the valid range") {
    const int total = 60, at = 30, l = 9;
    DifferenceCurve c = difference_curve(impulse_features(total, at), l);
    int argmax = 0;
    double best = -1.0;
    for (int i = 1; i <= total; ++i) {
        if (i < l + 1 || i > total - l) CHECK(c.c[static_cast<std::size_t>(i)] == 0.0);
        if (c.c[static_cast<std::size_t>(i)] > best) {
            best = c.c[static_cast<std::size_t>(i)];
            argmax = i;
        }
    }
    CHECK(argmax == at);
    CHECK(best > 0.0);
}

TEST_CASE("difference_curve needs more than 2*l_interval frames") {
    std::vector<std::vector<double>> feats(18, std::vector<double>{1.0});
    CHECK_THROWS_AS(difference_curve(feats, 9), Error);
}

namespace {

DifferenceCurve curve_from_values(const std::vector<double>& c_values, int l) {
    DifferenceCurve c;
    c.total_frames = static_cast<int>(c_values.size());
    c.l_interval = l;
    c.d.assign(c_values.size() + 1, 0.0);
    c.c.assign(c_values.size() + 1, 0.0);
    for (std::size_t i = 0; i < c_values.size(); ++i) c.c[i + 1] = c_values[i];
    return c;
}

// independent recomputation of the peak-selection contract
std::vector<std::pair<int, int>> oracle_spot(const DifferenceCurve& curve,
                                             const std::vector<WindowSpan>& spans, double tau,
                                             int l) {
    double mean = 0, mx = 0;
    int count = 0;
    for (int i = curve.valid_begin(); i <= curve.valid_end(); ++i) {
        mean += curve.c[static_cast<std::size_t>(i)];
        mx = std::max(mx, curve.c[static_cast<std::size_t>(i)]);
        ++count;
    }
    if (count) mean /= count;
    double thr = mean + tau * (mx - mean);
    std::vector<std::pair<int, int>> raw;
    for (const WindowSpan& s : spans) {
        int peak = 0;
        double pv = -1;
        for (int i = s.start; i <= std::min(s.end, curve.total_frames); ++i)
            if (curve.c[static_cast<std::size_t>(i)] > pv) {
                pv = curve.c[static_cast<std::size_t>(i)];
                peak = i;
            }
        if (peak && pv > thr)
            raw.push_back({std::max(1, peak - l), std::min(curve.total_frames, peak + l)});
    }
    std::sort(raw.begin(), raw.end());
    std::vector<std::pair<int, int>> merged;
    for (auto& iv : raw) {
        if (!merged.empty() && iv.first <= merged.back().second)
            merged.back().second = std::max(merged.back().second, iv.second);
        else
            merged.push_back(iv);
    }
    return merged;
}

}  // namespace

TEST_CASE("spot_peaks emits nothing on an all-zero curve") {
    DatasetConfig cfg = dataset_config(Dataset::CASME2);
    DifferenceCurve c = curve_from_values(std::vector<double>(80, 0.0), cfg.l_interval);
    auto spans = segment_video(80, cfg);
    CHECK(spot_peaks(c, spans, cfg.peak_threshold_tau, cfg.l_interval, "v").empty());
}

TEST_CASE("spot_peaks finds a single clear peak") {
    DatasetConfig cfg = dataset_config(Dataset::CASME2);
    std::vector<double> values(80, 0.0);
    for (int i = 38; i <= 44; ++i) values[static_cast<std::size_t>(i - 1)] = 1.0 - 0.1 * std::abs(i - 41);
    DifferenceCurve c = curve_from_values(values, cfg.l_interval);
    auto out = spot_peaks(c, segment_video(80, cfg), 0.15, cfg.l_interval, "v");
    REQUIRE(out.size() >= 1);
    bool covers = false;
    for (const SpottedInterval& si : out) covers = covers || (si.onset <= 41 && 41 <= si.offset);
    CHECK(covers);
}

TEST_CASE("adjacent-span peaks merge when their emissions overlap") {
    DatasetConfig cfg = dataset_config(Dataset::CASME2);  // spans of 30, stride 21
    std::vector<double> values(60, 0.0);
    values[19] = 1.0;  // frame 20, inside span [1,30]
    values[27] = 1.0;  // frame 28, inside span [22,51] -> [19,37] overlaps [11,29]
    DifferenceCurve c = curve_from_values(values, cfg.l_interval);
    auto out = spot_peaks(c, segment_video(60, cfg), 0.15, cfg.l_interval, "v");
    REQUIRE(out.size() == 1);
    CHECK(out[0].onset == 11);
    CHECK(out[0].offset == 37);
}

TEST_CASE("distant peaks stay separate") {
    DatasetConfig cfg = dataset_config(Dataset::CASME2);
    std::vector<double> values(120, 0.0);
    values[24] = 1.0;
    values[89] = 1.0;
    DifferenceCurve c = curve_from_values(values, cfg.l_interval);
    auto out = spot_peaks(c, segment_video(120, cfg), 0.15, cfg.l_interval, "v");
    CHECK(out.size() == 2);
}

TEST_CASE("spot_peaks agrees with the oracle on random curves") {
    DatasetConfig cfg = dataset_config(Dataset::CASME2);
    std::mt19937 rng(71);
    std::uniform_real_distribution<double> v(0.0, 1.0);
    for (int it = 0; it < 200; ++it) {
        int total = 40 + static_cast<int>(v(rng) * 160);
        std::vector<double> values(static_cast<std::size_t>(total), 0.0);
        for (int i = cfg.l_interval + 1; i <= total - cfg.l_interval; ++i)
            values[static_cast<std::size_t>(i - 1)] = v(rng) < 0.1 ? v(rng) : 0.02 * v(rng);
        DifferenceCurve c = curve_from_values(values, cfg.l_interval);
        auto spans = segment_video(total, cfg);
        auto got = spot_peaks(c, spans, 0.15, cfg.l_interval, "v");
        auto expect = oracle_spot(c, spans, 0.15, cfg.l_interval);
        REQUIRE(got.size() == expect.size());
        for (std::size_t i = 0; i < got.size(); ++i) {
            CHECK(got[i].onset == expect[i].first);
            CHECK(got[i].offset == expect[i].second);
        }
        // merged emissions never overlap and stay in bounds
        for (std::size_t i = 0; i < got.size(); ++i) {
            CHECK(got[i].onset >= 1);
            CHECK(got[i].offset <= total);
            if (i > 0) CHECK(got[i].onset > got[i - 1].offset);
        }
    }
}

TEST_CASE("raising tau never emits more intervals") {
    DatasetConfig cfg = dataset_config(Dataset::CASME2);
    std::mt19937 rng(13);
    std::uniform_real_distribution<double> v(0.0, 1.0);
    for (int it = 0; it < 100; ++it) {
        int total = 100;
        std::vector<double> values(static_cast<std::size_t>(total), 0.0);
        for (int i = 10; i <= 91; ++i) values[static_cast<std::size_t>(i - 1)] = v(rng);
        DifferenceCurve c = curve_from_values(values, cfg.l_interval);
        auto spans = segment_video(total, cfg);
        std::size_t prev = SIZE_MAX;
        for (double tau : {0.0, 0.1, 0.3, 0.6, 0.9}) {
            std::size_t n = spot_peaks(c, spans, tau, cfg.l_interval, "v").size();
            if (prev != SIZE_MAX) CHECK(n <= prev);
            prev = n;
        }
    }
}

TEST_CASE("block grid covers the face region with 36 overlapping blocks") {
    BlockRect region{40, 30, 110, 120};
    BlockGrid grid = build_block_grid(region);
    REQUIRE(grid.blocks.size() == 36);
    const BlockRect& b0 = grid.blocks[0];
    for (const BlockRect& b : grid.blocks) {
        CHECK(b.width == b0.width);
        CHECK(b.height == b0.height);
        CHECK(b.x0 >= region.x0);
        CHECK(b.y0 >= region.y0);
        CHECK(b.x0 + b.width <= region.x0 + region.width);
        CHECK(b.y0 + b.height <= region.y0 + region.height);
    }
    // neighboring blocks overlap by about 0.2 (x) and 0.3 (y) of block size
    int dx = grid.blocks[1].x0 - grid.blocks[0].x0;
    int dy = grid.blocks[6].y0 - grid.blocks[0].y0;
    CHECK(std::abs(dx - 0.8 * b0.width) <= 2.0);
    CHECK(std::abs(dy - 0.7 * b0.height) <= 2.0);
}

TEST_CASE("block grid rejects regions that give undersized blocks") {
    CHECK_THROWS_AS(build_block_grid(BlockRect{0, 0, 20, 20}), Error);
}

TEST_CASE("face_region expands the landmark bounding box") {
    std::vector<Point> lm(kLandmarkCount, Point{50, 50});
    lm[0] = {40, 45};
    lm[1] = {80, 95};
    BlockRect r = face_region(lm, 200, 200);
    CHECK(r.x0 <= 39 - 2);  // 5% of width 40 expansion
    CHECK(r.x0 + r.width >= 81);
    CHECK(r.y0 + r.height >= 96);
}

TEST_CASE("whole-pipeline spotting covers a rendered movement") {
    SynthSpec spec;
    spec.video_id = "v";
    spec.width = 192;
    spec.height = 144;
    spec.fps = 30.0;
    spec.duration_s = 6.0;
    spec.noise_sigma = 0.4;
    spec.seed = 42;
    spec.events = {{GtKind::blink, -1, 90, 5, 60.0}};
    SynthResult r = generate_sequence(spec);
    DatasetConfig cfg = dataset_config(Dataset::CASME2);
    LbpSpotResult out = spot_lbp_chi2(r.video, r.landmarks, cfg);
    bool covers = false;
    for (const SpottedInterval& si : out.intervals)
        covers = covers || (si.onset <= 94 && 90 <= si.offset);
    CHECK(covers);
}
