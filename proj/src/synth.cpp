#include "mespot/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>
#include <random>
#include <sstream>

#include "mespot/dataio.hpp"
#include "mespot/io_util.hpp"

namespace mespot {

namespace {

// Template coordinates at scale 1, y grows downward, origin at face center.
// Inner eye corners (39, 42) sit 30 px apart, so the derived ROI side is 6.
const std::vector<Point>& template_points() {
    static const std::vector<Point> pts = [] {
        std::vector<Point> p(kLandmarkCount);
        for (int i = 0; i <= 16; ++i) {  // jaw arc
            double t = i * std::numbers::pi / 16.0;
            p[static_cast<std::size_t>(i)] = {-52.0 * std::cos(t), 62.0 * std::sin(t)};
        }
        auto set = [&p](int i, double x, double y) { p[static_cast<std::size_t>(i)] = {x, y}; };
        set(17, -38, -25); set(18, -31, -28); set(19, -24, -29); set(20, -17, -28); set(21, -10, -25);
        set(22, 10, -25);  set(23, 17, -28);  set(24, 24, -29);  set(25, 31, -28);  set(26, 38, -25);
        set(27, 0, -20); set(28, 0, -12); set(29, 0, -4); set(30, 0, 2);
        set(31, -8, 8); set(32, -4, 9); set(33, 0, 10); set(34, 4, 9); set(35, 8, 8);
        set(36, -27, -15); set(37, -22, -17); set(38, -18, -17);
        set(39, -15, -15); set(40, -18, -13); set(41, -22, -13);
        set(42, 15, -15); set(43, 18, -17); set(44, 22, -17);
        set(45, 27, -15); set(46, 22, -13); set(47, 18, -13);
        set(48, -20, 32); set(49, -13, 29); set(50, -7, 27); set(51, 0, 26);
        set(52, 7, 27);   set(53, 13, 29); set(54, 20, 32);
        set(55, 13, 37); set(56, 7, 39); set(57, 0, 40); set(58, -7, 39); set(59, -13, 37);
        set(60, -16, 32); set(61, -8, 31); set(62, 0, 30); set(63, 8, 31);
        set(64, 16, 32);  set(65, 8, 34); set(66, 0, 35); set(67, -8, 34);
        set(68, -21, -15); set(69, 21, -15);  // pupils
        set(70, -24, -33); set(71, 24, -33);  // above brow midpoints
        set(72, -7, -6);   set(73, 7, -6);    // nasal bone sides
        set(74, -30, 12);  set(75, 30, 12);   // cheeks
        set(76, -30, -45); set(77, -10, -50); set(78, 10, -50); set(79, 30, -45);  // forehead
        set(80, -48, -28); set(81, 48, -28);  // temples
        set(82, -12, 52);  set(83, 12, 52);   // chin sides
        return p;
    }();
    return pts;
}

double gauss2(double dx, double dy, double sigma) {
    return std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
}

// Static face intensity at template coordinates (tx, ty), scale 1.
double face_intensity(double tx, double ty) {
    const double e = (tx / 55.0) * (tx / 55.0) + (ty / 68.0) * (ty / 68.0);
    const double inside = 1.0 / (1.0 + std::exp((e - 1.0) * 30.0));
    double v = 70.0 + 80.0 * inside;
    if (inside < 1e-4) return v;

    double f = 0.0;
    f -= 45.0 * (gauss2(tx + 21, ty + 15, 5.0) + gauss2(tx - 21, ty + 15, 5.0));  // eyes
    for (double bx : {-31.0, -24.0, -17.0})                                        // brows
        f -= 25.0 * (gauss2(tx - bx, ty + 28.5, 3.0) + gauss2(tx + bx, ty + 28.5, 3.0));
    f += 12.0 * std::exp(-tx * tx / (2.0 * 2.5 * 2.5)) *
         (1.0 / (1.0 + std::exp(-(ty + 15.0))) - 1.0 / (1.0 + std::exp(-(ty - 8.0))));  // nose ridge
    f -= 20.0 * (gauss2(tx + 8, ty - 8, 2.0) + gauss2(tx - 8, ty - 8, 2.0));  // nostrils
    f -= 40.0 * std::exp(-tx * tx / (2.0 * 14.0 * 14.0)) *
         std::exp(-(ty - 33.0) * (ty - 33.0) / (2.0 * 3.5 * 3.5));  // mouth
    // gentle static texture so local binary patterns have gradients to encode
    f += 5.0 * std::sin(0.55 * tx) * std::cos(0.35 * ty);
    f += 4.0 * std::sin(0.22 * tx + 1.3) * std::sin(0.40 * ty + 0.7);
    return v + inside * f;
}

// Triangular temporal profile over [onset, offset]: positive at both ends,
// peaking at the apex.
double event_profile(int frame, int onset, int offset, int apex) {
    if (frame < onset || frame > offset) return 0.0;
    if (frame <= apex) return static_cast<double>(frame - onset + 1) / (apex - onset + 1);
    return static_cast<double>(offset - frame + 1) / (offset - apex + 1);
}

struct RenderedEvent {
    Point center;  // template coordinates
    double sigma = 1.0;
    double amplitude = 0.0;
    int onset = 0;
    int offset = 0;
    int apex = 0;
    bool both_eyes = false;  // blinks darken both eye regions
};

}  // namespace

std::vector<Point> face_template(double cx, double cy, double scale) {
    std::vector<Point> pts = template_points();
    for (Point& p : pts) {
        p.x = cx + scale * p.x;
        p.y = cy + scale * p.y;
    }
    return pts;
}

SynthResult generate_sequence(const SynthSpec& spec) {
    const int total = spec.total_frames();
    if (total < 1) throw_error(ErrorCode::spec_error, "synth: no frames to render");
    if (spec.width < 16 || spec.height < 16)
        throw_error(ErrorCode::spec_error, "synth: frame too small");
    const double cx = spec.face_cx >= 0 ? spec.face_cx : spec.width / 2.0;
    const double cy = spec.face_cy >= 0 ? spec.face_cy : spec.height / 2.0;
    const double scale = spec.face_scale;
    const std::vector<Point>& tpl = template_points();

    // ROI target positions come from the default layout's landmark choices.
    const double roi_side = 30.0 / 5.0;  // template inner-eye distance over 5
    auto roi_center = [&](int roi_id) -> Point {
        static constexpr int lm_of_roi[12] = {17, 21, 22, 26, 48, 54, 19, 24, 50, 52, 72, 73};
        if (roi_id < 0 || roi_id >= 12)
            throw_error(ErrorCode::spec_error, "synth: roi target out of range");
        return tpl[static_cast<std::size_t>(lm_of_roi[roi_id])];
    };

    std::vector<RenderedEvent> rendered;
    SynthResult result;
    for (const SynthEvent& ev : spec.events) {
        if (ev.duration < 1 || ev.onset < 1 || ev.onset + ev.duration - 1 > total)
            throw_error(ErrorCode::spec_error, "synth: event outside video");
        if (ev.amplitude <= 0) throw_error(ErrorCode::spec_error, "synth: amplitude must be > 0");
        RenderedEvent re;
        re.onset = ev.onset;
        re.offset = ev.onset + ev.duration - 1;
        re.apex = ev.onset + (ev.duration - 1) / 2;
        re.amplitude = ev.amplitude;
        switch (ev.kind) {
            case GtKind::micro:
                re.center = roi_center(ev.roi_target);
                re.sigma = roi_side / 3.0;
                break;
            case GtKind::blink:
                re.center = {0.0, -15.0};  // per-eye offsets applied while rendering
                re.sigma = 5.0;
                re.both_eyes = true;
                re.amplitude = -ev.amplitude;
                break;
            case GtKind::macro:
                re.center = ev.roi_target >= 0 ? roi_center(ev.roi_target) : Point{0.0, 10.0};
                re.sigma = 15.0;
                break;
            case GtKind::other:
                throw_error(ErrorCode::spec_error, "synth: unsupported event kind 'other'");
        }
        rendered.push_back(re);

        GroundTruthInterval gt;
        gt.video_id = spec.video_id;
        gt.kind = ev.kind;
        gt.onset = re.onset;
        gt.apex = re.apex;
        gt.offset = re.offset;
        result.ground_truth.push_back(gt);
    }
    std::sort(result.ground_truth.begin(), result.ground_truth.end(),
              [](const GroundTruthInterval& a, const GroundTruthInterval& b) {
                  return a.onset < b.onset;
              });

    const double drift_norm = std::hypot(1.0, 0.4);
    const double drift_x = spec.drift_px_per_s / drift_norm;
    const double drift_y = 0.4 * spec.drift_px_per_s / drift_norm;

    result.video.video_id = spec.video_id;
    result.video.subject_id = spec.subject_id;
    result.video.fps = spec.fps;
    result.video.first_index = 1;
    result.video.frames.assign(static_cast<std::size_t>(total), Frame{});
    result.landmarks.first_index = 1;
    result.landmarks.frames.resize(static_cast<std::size_t>(total));

    for (int frame = 1; frame <= total; ++frame) {
        const double t = (frame - 1) / spec.fps;
        std::vector<Point> lm(kLandmarkCount);
        for (int i = 0; i < kLandmarkCount; ++i)
            lm[static_cast<std::size_t>(i)] = {
                cx + drift_x * t + scale * tpl[static_cast<std::size_t>(i)].x,
                cy + drift_y * t + scale * tpl[static_cast<std::size_t>(i)].y};
        result.landmarks.frames[static_cast<std::size_t>(frame - 1)] = std::move(lm);
    }

    // Noise is drawn from a per-frame generator so frames render independently
    // and in parallel while staying bit-identical for a given seed.
#pragma omp parallel for schedule(static)
    for (int frame = 1; frame <= total; ++frame) {
        const double t = (frame - 1) / spec.fps;
        const double ox = cx + drift_x * t;
        const double oy = cy + drift_y * t;
        std::mt19937_64 rng(spec.seed * 0x9E3779B97F4A7C15ull +
                            static_cast<std::uint64_t>(frame));
        std::normal_distribution<double> noise(0.0, spec.noise_sigma);

        Frame img;
        img.width = spec.width;
        img.height = spec.height;
        img.pixels.resize(static_cast<std::size_t>(spec.width) * spec.height);
        for (int y = 0; y < spec.height; ++y) {
            for (int x = 0; x < spec.width; ++x) {
                const double tx = (x + 1 - ox) / scale;  // pixel centers are 1-based
                const double ty = (y + 1 - oy) / scale;
                double v = face_intensity(tx, ty);
                for (const RenderedEvent& re : rendered) {
                    double p = event_profile(frame, re.onset, re.offset, re.apex);
                    if (p <= 0.0) continue;
                    if (re.both_eyes) {
                        if (std::abs(ty + 15) <= 5 * re.sigma &&
                            (std::abs(tx + 21) <= 5 * re.sigma || std::abs(tx - 21) <= 5 * re.sigma))
                            v += p * re.amplitude * (gauss2(tx + 21, ty + 15, re.sigma) +
                                                     gauss2(tx - 21, ty + 15, re.sigma));
                    } else if (std::abs(tx - re.center.x) <= 5 * re.sigma &&
                               std::abs(ty - re.center.y) <= 5 * re.sigma) {
                        v += p * re.amplitude * gauss2(tx - re.center.x, ty - re.center.y, re.sigma);
                    }
                }
                if (spec.noise_sigma > 0) v += noise(rng);
                int q = static_cast<int>(std::lround(v));
                img.pixels[static_cast<std::size_t>(y) * spec.width + x] =
                    static_cast<std::uint8_t>(std::clamp(q, 0, 255));
            }
        }
        result.video.frames[static_cast<std::size_t>(frame - 1)] = std::move(img);
    }
    return result;
}

// Suite file format:
//   dataset = casme2          manifest config hint
//   format = packed | pgm
//   width/height/fps/duration_s/noise_sigma/drift_px_per_s/face_scale/seed = defaults
//   [video <id>]
//   subject = s01
//   seed = 101                optional, defaults to suite seed + ordinal
//   event = micro roi=6 onset=120 duration=13 amplitude=45
//   event = blink onset=300 duration=5 amplitude=50
//   event = macro onset=450 duration=36 amplitude=60
SynthSuite parse_synth_suite_text(const std::string& text) {
    SynthSuite suite;
    SynthSpec defaults;
    std::vector<std::pair<std::string, std::vector<KvEntry>>> sections;
    for (const KvEntry& e : parse_kv_text(text)) {
        if (e.section.empty()) {
            if (e.key == "dataset") suite.dataset = e.value;
            else if (e.key == "format") suite.format = e.value;
            else if (e.key == "width") defaults.width = parse_int(e.value, "width");
            else if (e.key == "height") defaults.height = parse_int(e.value, "height");
            else if (e.key == "fps") defaults.fps = parse_double(e.value, "fps");
            else if (e.key == "duration_s") defaults.duration_s = parse_double(e.value, "duration_s");
            else if (e.key == "noise_sigma") defaults.noise_sigma = parse_double(e.value, "noise_sigma");
            else if (e.key == "drift_px_per_s")
                defaults.drift_px_per_s = parse_double(e.value, "drift_px_per_s");
            else if (e.key == "face_scale") defaults.face_scale = parse_double(e.value, "face_scale");
            else if (e.key == "seed") defaults.seed = static_cast<std::uint64_t>(
                         std::strtoull(e.value.c_str(), nullptr, 10));
            else
                throw_error(ErrorCode::format_error,
                            "synth spec line " + std::to_string(e.line_no) + ": unknown key '" +
                                e.key + "'");
            continue;
        }
        if (sections.empty() || sections.back().first != e.section)
            sections.push_back({e.section, {}});
        sections.back().second.push_back(e);
    }

    if (suite.format != "packed" && suite.format != "pgm")
        throw_error(ErrorCode::format_error, "synth spec: format must be packed or pgm");

    int ordinal = 0;
    for (const auto& [header, entries] : sections) {
        std::istringstream hs(header);
        std::string word, vid;
        hs >> word >> vid;
        if (word != "video" || vid.empty())
            throw_error(ErrorCode::format_error, "synth spec: section must be [video <id>]");
        SynthSpec spec = defaults;
        spec.video_id = vid;
        spec.seed = defaults.seed + static_cast<std::uint64_t>(++ordinal);
        for (const KvEntry& e : entries) {
            if (e.key == "subject") spec.subject_id = e.value;
            else if (e.key == "seed") spec.seed = static_cast<std::uint64_t>(
                         std::strtoull(e.value.c_str(), nullptr, 10));
            else if (e.key == "duration_s") spec.duration_s = parse_double(e.value, "duration_s");
            else if (e.key == "event") {
                std::istringstream es(e.value);
                std::string kind;
                es >> kind;
                SynthEvent ev;
                ev.kind = gt_kind_from_string(kind);
                std::string field;
                while (es >> field) {
                    std::size_t eq = field.find('=');
                    if (eq == std::string::npos)
                        throw_error(ErrorCode::format_error,
                                    "synth spec line " + std::to_string(e.line_no) +
                                        ": event fields are key=value");
                    std::string k = field.substr(0, eq), v = field.substr(eq + 1);
                    if (k == "roi") ev.roi_target = parse_int(v, "roi");
                    else if (k == "onset") ev.onset = parse_int(v, "onset");
                    else if (k == "duration") ev.duration = parse_int(v, "duration");
                    else if (k == "amplitude") ev.amplitude = parse_double(v, "amplitude");
                    else
                        throw_error(ErrorCode::format_error,
                                    "synth spec line " + std::to_string(e.line_no) +
                                        ": unknown event field '" + k + "'");
                }
                spec.events.push_back(ev);
            } else {
                throw_error(ErrorCode::format_error, "synth spec line " + std::to_string(e.line_no) +
                                                         ": unknown key '" + e.key + "'");
            }
        }
        suite.videos.push_back(std::move(spec));
    }
    if (suite.videos.empty())
        throw_error(ErrorCode::format_error, "synth spec defines no videos");
    return suite;
}

SynthSuite parse_synth_suite(const std::filesystem::path& path) {
    return parse_synth_suite_text(read_text_file(path));
}

void write_synth_dataset(const SynthSuite& suite, const std::filesystem::path& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir / "frames");
    fs::create_directories(out_dir / "landmarks");

    std::vector<GroundTruthInterval> all_gt;
    std::ostringstream manifest;
    manifest << "dataset = " << suite.dataset << "\n";
    manifest << "gt = gt.csv\n";
    for (const SynthSpec& spec : suite.videos) {
        SynthResult r = generate_sequence(spec);
        std::string frames_rel;
        if (suite.format == "packed") {
            frames_rel = "frames/" + spec.video_id + ".mev";
            write_packed_video(out_dir / frames_rel, r.video);
        } else {
            frames_rel = "frames/" + spec.video_id;
            fs::create_directories(out_dir / frames_rel);
            char name[32];
            for (std::size_t i = 0; i < r.video.frames.size(); ++i) {
                std::snprintf(name, sizeof name, "%06zu.pgm", i + 1);
                write_pgm(out_dir / frames_rel / name, r.video.frames[i]);
            }
        }
        std::string lm_rel = "landmarks/" + spec.video_id + ".csv";
        write_file_atomic(out_dir / lm_rel, landmark_track_to_csv(r.landmarks));
        all_gt.insert(all_gt.end(), r.ground_truth.begin(), r.ground_truth.end());
        manifest << "video = " << spec.video_id << " " << spec.subject_id << " " << frames_rel
                 << " " << lm_rel << "\n";
    }
    std::stable_sort(all_gt.begin(), all_gt.end(),
                     [](const GroundTruthInterval& a, const GroundTruthInterval& b) {
                         if (a.video_id != b.video_id) return a.video_id < b.video_id;
                         return a.onset < b.onset;
                     });
    write_file_atomic(out_dir / "gt.csv", ground_truth_to_csv(all_gt));
    write_file_atomic(out_dir / "manifest.txt", manifest.str());
}

}  // namespace mespot
