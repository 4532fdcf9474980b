#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <random>

#include "mespot/ltp.hpp"
#include "mespot/synth.hpp"

using namespace mespot;

namespace {

RoiTrack make_track(int frames, int side, const std::function<double(int, int)>& value) {
    RoiTrack t;
    t.rect.side = side;
    t.frame_count = frames;
    t.dim = side * side;
    t.data.resize(static_cast<std::size_t>(frames) * t.dim);
    for (int n = 0; n < frames; ++n)
        for (int p = 0; p < t.dim; ++p)
            t.data[static_cast<std::size_t>(n) * t.dim + p] = value(n, p);
    return t;
}

double reconstruction_error(const RoiTrack& track, const ProjectedTrack& proj) {
    double num = 0.0, den = 0.0;
    for (int n = 0; n < track.frame_count; ++n) {
        for (int p = 0; p < track.dim; ++p) {
            double rec = proj.mean[static_cast<std::size_t>(p)] +
                         proj.basis[static_cast<std::size_t>(p)] * proj.points[static_cast<std::size_t>(n)].x +
                         proj.basis[static_cast<std::size_t>(proj.dim + p)] *
                             proj.points[static_cast<std::size_t>(n)].y;
            double orig = track.data[static_cast<std::size_t>(n) * track.dim + p];
            num += (rec - orig) * (rec - orig);
            den += orig * orig;
        }
    }
    return std::sqrt(num / std::max(den, 1e-300));
}

}  // namespace

TEST_CASE("temporal_pca on a constant track") {
    RoiTrack t = make_track(10, 4, [](int, int) { return 137.0; });
    ProjectedTrack proj = temporal_pca(t);
    CHECK(proj.variance_captured == doctest::Approx(1.0));
    for (const Point& p : proj.points) {
        CHECK(p.x == 0.0);
        CHECK(p.y == 0.0);
    }
    for (double b : proj.basis) CHECK(b == 0.0);
}

TEST_CASE("temporal_pca rejects single-frame tracks") {
    RoiTrack t = make_track(1, 4, [](int, int) { return 0.0; });
    CHECK_THROWS_AS(temporal_pca(t), Error);
}

TEST_CASE("temporal_pca on a single varying pixel") {
    // pixel 5 ramps 0,1,2,...  -> points collinear, unit spacing on the first
    // component, sign convention makes the ramp ascend
    RoiTrack t = make_track(12, 3, [](int n, int p) { return p == 5 ? double(n) : 7.0; });
    ProjectedTrack proj = temporal_pca(t);
    for (std::size_t i = 0; i < proj.points.size(); ++i) {
        CHECK(std::abs(proj.points[i].y) <= 1e-9);
        if (i > 0)
            CHECK(std::abs((proj.points[i].x - proj.points[i - 1].x) - 1.0) <= 1e-9);
    }
    CHECK(reconstruction_error(t, proj) <= 1e-6);
}

TEST_CASE("temporal_pca captures rank-2 data exactly") {
    // two orthogonal pixel modes with differing magnitudes
    const int frames = 15, side = 4, dim = side * side;
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> coef(-3.0, 3.0);
    std::vector<double> mode_a(dim, 0.0), mode_b(dim, 0.0);
    for (int p = 0; p < dim / 2; ++p) mode_a[static_cast<std::size_t>(p)] = (p % 3) + 1.0;
    for (int p = dim / 2; p < dim; ++p) mode_b[static_cast<std::size_t>(p)] = (p % 4) + 0.5;
    std::vector<double> sa(frames), sb(frames);
    for (int n = 0; n < frames; ++n) {
        sa[static_cast<std::size_t>(n)] = 10.0 * coef(rng);
        sb[static_cast<std::size_t>(n)] = coef(rng);
    }
    RoiTrack t = make_track(frames, side, [&](int n, int p) {
        return 100.0 + sa[static_cast<std::size_t>(n)] * mode_a[static_cast<std::size_t>(p)] +
               sb[static_cast<std::size_t>(n)] * mode_b[static_cast<std::size_t>(p)];
    });
    ProjectedTrack proj = temporal_pca(t);
    CHECK(proj.variance_captured == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(reconstruction_error(t, proj) <= 1e-6);

    // full eigendecomposition oracle over the pixel covariance
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> m(
        t.data.data(), frames, dim);
    Eigen::MatrixXd centered = m.rowwise() - m.colwise().mean();
    Eigen::MatrixXd cov = centered.transpose() * centered;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
    double top2 = eig.eigenvalues()[dim - 1] + eig.eigenvalues()[dim - 2];
    double total = eig.eigenvalues().sum();
    CHECK(proj.variance_captured == doctest::Approx(top2 / total).epsilon(1e-9));

    // projections reproduce per-frame deviations: compare norms
    for (int n = 0; n < frames; ++n) {
        double dev = (centered.row(n)).norm();
        double pn = std::hypot(proj.points[static_cast<std::size_t>(n)].x,
                               proj.points[static_cast<std::size_t>(n)].y);
        CHECK(pn == doctest::Approx(dev).epsilon(1e-9));
    }
}

TEST_CASE("temporal_pca basis rows are orthonormal when present") {
    std::mt19937 rng(8);
    std::uniform_real_distribution<double> px(0.0, 255.0);
    RoiTrack t = make_track(20, 5, [&](int, int) { return px(rng); });
    ProjectedTrack proj = temporal_pca(t);
    double n0 = 0, n1 = 0, dot = 0;
    for (int p = 0; p < t.dim; ++p) {
        n0 += proj.basis[static_cast<std::size_t>(p)] * proj.basis[static_cast<std::size_t>(p)];
        n1 += proj.basis[static_cast<std::size_t>(t.dim + p)] *
              proj.basis[static_cast<std::size_t>(t.dim + p)];
        dot += proj.basis[static_cast<std::size_t>(p)] *
               proj.basis[static_cast<std::size_t>(t.dim + p)];
    }
    CHECK(n0 == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(n1 == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(std::abs(dot) <= 1e-9);
}

TEST_CASE("gram and covariance routes satisfy the same reconstruction bound") {
    // frames > dim forces the covariance route; frames < dim the gram route
    std::mt19937 rng(12);
    std::uniform_real_distribution<double> coef(-5.0, 5.0);
    for (int frames : {6, 40}) {
        const int side = 3, dim = 9;
        std::vector<double> mode(dim);
        for (int p = 0; p < dim; ++p) mode[static_cast<std::size_t>(p)] = coef(rng);
        std::vector<double> s(static_cast<std::size_t>(frames));
        for (double& v : s) v = coef(rng);
        RoiTrack t = make_track(frames, side, [&](int n, int p) {
            return 50.0 + s[static_cast<std::size_t>(n)] * mode[static_cast<std::size_t>(p)];
        });
        ProjectedTrack proj = temporal_pca(t);
        CHECK(reconstruction_error(t, proj) <= 1e-6);
    }
}

TEST_CASE("distance_pattern on collinear points") {
    ProjectedTrack proj;
    proj.points = {{0, 0}, {1, 0}, {2, 0}, {3, 0}};
    auto d = distance_pattern(proj, 1, 4);
    REQUIRE(d.size() == 3);
    CHECK(d[0] == doctest::Approx(1.0));
    CHECK(d[1] == doctest::Approx(2.0));
    CHECK(d[2] == doctest::Approx(3.0));
}

TEST_CASE("distance_pattern of identical points is zero") {
    ProjectedTrack proj;
    proj.points.assign(6, Point{2.5, -1.0});
    for (double v : distance_pattern(proj, 2, 5)) CHECK(v == 0.0);
}

TEST_CASE("distance_pattern matches a brute-force recomputation") {
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> c(-10.0, 10.0);
    ProjectedTrack proj;
    for (int i = 0; i < 25; ++i) proj.points.push_back({c(rng), c(rng)});
    for (int n = 1; n <= 25; ++n) {
        auto d = distance_pattern(proj, n, 9);
        for (std::size_t w = 0; w < d.size(); ++w) {
            const Point& a = proj.points[static_cast<std::size_t>(n - 1)];
            const Point& b = proj.points[static_cast<std::size_t>(n - 1) + w + 1];
            double expect = std::sqrt((a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y));
            CHECK(d[w] == doctest::Approx(expect).epsilon(1e-12));
        }
    }
}

TEST_CASE("distance_pattern truncates at the track end") {
    ProjectedTrack proj;
    proj.points.assign(5, Point{0, 0});
    CHECK(distance_pattern(proj, 4, 9).size() == 1);
    CHECK(distance_pattern(proj, 5, 9).empty());
}

TEST_CASE("distances are invariant to basis sign flips") {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> px(0.0, 255.0);
    RoiTrack t = make_track(18, 4, [&](int, int) { return px(rng); });
    ProjectedTrack proj = temporal_pca(t);
    ProjectedTrack flipped = proj;
    for (Point& p : flipped.points) {
        p.x = -p.x;
        p.y = -p.y;
    }
    for (int n = 1; n <= 18; ++n) {
        auto a = distance_pattern(proj, n, 9);
        auto b = distance_pattern(flipped, n, 9);
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) <= 1e-9);
    }
}

TEST_CASE("normalize_roi divides by the per-video maximum") {
    std::vector<RawPattern> raw = {{0, 1, 1, {0, 2, 4}}, {0, 2, 1, {1, 3, 2}}};
    auto feats = normalize_roi(raw, 4);
    REQUIRE(feats.size() == 2);
    CHECK(feats[0].cn == doctest::Approx(4.0));
    CHECK(feats[1].cn == doctest::Approx(4.0));
    CHECK(feats[0].distances[0] == doctest::Approx(0.0));
    CHECK(feats[0].distances[1] == doctest::Approx(0.5));
    CHECK(feats[0].distances[2] == doctest::Approx(1.0));
    CHECK(feats[1].distances[0] == doctest::Approx(0.25));
    CHECK(feats[1].distances[1] == doctest::Approx(0.75));
    CHECK(feats[1].distances[2] == doctest::Approx(0.5));
}

TEST_CASE("normalize_roi guards the all-zero video") {
    std::vector<RawPattern> raw = {{3, 1, 1, {0, 0}}, {3, 2, 1, {}}};
    auto feats = normalize_roi(raw, 9);
    for (const LtpFeature& f : feats) {
        CHECK(f.cn == 0.0);
        REQUIRE(f.distances.size() == 8);  // zero-padded to l_interval - 1
        for (double d : f.distances) CHECK(d == 0.0);
    }
}

TEST_CASE("normalized distances stay in [0,1] and reach exactly 1") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> v(0.0, 50.0);
    std::vector<RawPattern> raw;
    for (int i = 0; i < 30; ++i) {
        RawPattern p{0, i + 1, 1, {}};
        for (int w = 0; w < 8; ++w) p.deltas.push_back(v(rng));
        raw.push_back(std::move(p));
    }
    auto feats = normalize_roi(raw, 9);
    double max_d = 0.0;
    for (const LtpFeature& f : feats)
        for (double d : f.distances) {
            CHECK(d >= 0.0);
            CHECK(d <= 1.0);
            max_d = std::max(max_d, d);
        }
    CHECK(max_d == doctest::Approx(1.0));
}

TEST_CASE("doubling pixel intensities doubles cn and keeps d identical") {
    std::mt19937 rng(21);
    std::uniform_real_distribution<double> px(0.0, 100.0);
    RoiTrack base = make_track(24, 4, [&](int, int) { return px(rng); });
    RoiTrack doubled = base;
    for (double& v : doubled.data) v *= 2.0;

    auto run = [](const RoiTrack& t) {
        ProjectedTrack proj = temporal_pca(t);
        std::vector<RawPattern> raw;
        for (int n = 1; n <= t.frame_count; ++n)
            raw.push_back({0, n, 1, distance_pattern(proj, n, 9)});
        return normalize_roi(raw, 9);
    };
    auto a = run(base);
    auto b = run(doubled);
    REQUIRE(a.size() == b.size());
    CHECK(b[0].cn == doctest::Approx(2.0 * a[0].cn).epsilon(1e-9));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t w = 0; w < a[i].distances.size(); ++w)
            CHECK(b[i].distances[w] == doctest::Approx(a[i].distances[w]).epsilon(1e-9));
}

namespace {

SynthResult tiny_video(double duration_s, std::vector<SynthEvent> events, double noise,
                       double drift, std::uint64_t seed) {
    SynthSpec spec;
    spec.video_id = "t01";
    spec.subject_id = "s01";
    spec.width = 192;
    spec.height = 144;
    spec.fps = 30.0;
    spec.duration_s = duration_s;
    spec.noise_sigma = noise;
    spec.drift_px_per_s = drift;
    spec.seed = seed;
    spec.events = std::move(events);
    return generate_sequence(spec);
}

}  // namespace

TEST_CASE("extract_ltp_features produces 12 x frames features of fixed length") {
    SynthResult r = tiny_video(1.0, {}, 0.8, 0.0, 3);  // 30 frames = one span
    DatasetConfig cfg = dataset_config(Dataset::CASME2);
    VideoLtpFeatures f = extract_ltp_features(r.video, r.landmarks, cfg, default_roi_layout());
    for (int roi = 0; roi < kRoiCount; ++roi) {
        REQUIRE(f.per_roi[static_cast<std::size_t>(roi)].size() == 30);
        for (const LtpFeature& feat : f.per_roi[static_cast<std::size_t>(roi)]) {
            CHECK(feat.distances.size() == 8);
            CHECK(feat.to_vector().size() == 9);
        }
    }
}

TEST_CASE("a static face yields all-zero patterns") {
    SynthResult r = tiny_video(2.0, {}, 0.0, 0.0, 4);
    DatasetConfig cfg = dataset_config(Dataset::CASME2);
    VideoLtpFeatures f = extract_ltp_features(r.video, r.landmarks, cfg, default_roi_layout());
    for (const auto& roi_features : f.per_roi)
        for (const LtpFeature& feat : roi_features) {
            CHECK(feat.cn == 0.0);
            for (double d : feat.distances) CHECK(d == 0.0);
        }
}

TEST_CASE("a local brightening drives only its own ROI") {
    // 300 ms event at the right-brow-mid ROI of an otherwise static face
    SynthResult r = tiny_video(3.0, {{GtKind::micro, 6, 40, 9, 45.0}}, 0.0, 0.0, 5);
    DatasetConfig cfg = dataset_config(Dataset::CASME2);
    VideoLtpFeatures f = extract_ltp_features(r.video, r.landmarks, cfg, default_roi_layout());
    double event_roi_max = 0.0, others_max = 0.0;
    for (int roi = 0; roi < kRoiCount; ++roi)
        for (const LtpFeature& feat : f.per_roi[static_cast<std::size_t>(roi)])
            for (double d : feat.distances)
                (roi == 6 ? event_roi_max : others_max) = std::max(
                    roi == 6 ? event_roi_max : others_max, d);
    CHECK(event_roi_max > 0.9);
    CHECK(others_max == 0.0);
}

TEST_CASE("extraction is deterministic") {
    SynthResult r = tiny_video(2.0, {{GtKind::micro, 4, 20, 12, 40.0}}, 1.0, 0.5, 6);
    DatasetConfig cfg = dataset_config(Dataset::CASME2);
    RoiLayoutMap layout = default_roi_layout();
    VideoLtpFeatures a = extract_ltp_features(r.video, r.landmarks, cfg, layout);
    VideoLtpFeatures b = extract_ltp_features(r.video, r.landmarks, cfg, layout);
    for (int roi = 0; roi < kRoiCount; ++roi) {
        const auto& fa = a.per_roi[static_cast<std::size_t>(roi)];
        const auto& fb = b.per_roi[static_cast<std::size_t>(roi)];
        REQUIRE(fa.size() == fb.size());
        for (std::size_t i = 0; i < fa.size(); ++i) {
            CHECK(fa[i].cn == fb[i].cn);
            CHECK(fa[i].global_frame == fb[i].global_frame);
            for (std::size_t w = 0; w < fa[i].distances.size(); ++w)
                CHECK(fa[i].distances[w] == fb[i].distances[w]);
        }
    }
}
