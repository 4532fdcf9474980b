#include "mespot/dataio.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include "mespot/io_util.hpp"

namespace mespot {

namespace fs = std::filesystem;

std::string to_string(GtKind kind) {
    switch (kind) {
        case GtKind::micro: return "micro";
        case GtKind::macro: return "macro";
        case GtKind::blink: return "blink";
        case GtKind::other: return "other";
    }
    return "other";
}

GtKind gt_kind_from_string(const std::string& s) {
    if (s == "micro") return GtKind::micro;
    if (s == "macro") return GtKind::macro;
    if (s == "blink") return GtKind::blink;
    if (s == "other") return GtKind::other;
    throw_error(ErrorCode::format_error, "unknown ground-truth kind '" + s + "'");
}

std::string to_string(SpotSource source) {
    return source == SpotSource::ltp_ml ? "ltp_ml" : "lbp_chi2";
}

SpotSource spot_source_from_string(const std::string& s) {
    if (s == "ltp_ml") return SpotSource::ltp_ml;
    if (s == "lbp_chi2") return SpotSource::lbp_chi2;
    throw_error(ErrorCode::format_error, "unknown interval source '" + s + "'");
}

void DatasetConfig::validate() const {
    if (fps <= 0) throw_error(ErrorCode::format_error, "config: fps must be > 0");
    if (l_window < 1) throw_error(ErrorCode::format_error, "config: l_window must be >= 1");
    if (l_overlap <= 0 || l_overlap >= l_window)
        throw_error(ErrorCode::format_error, "config: need 0 < l_overlap < l_window");
    if (l_interval < 2) throw_error(ErrorCode::format_error, "config: l_interval must be >= 2");
    if (size_roi && *size_roi < 4)
        throw_error(ErrorCode::format_error, "config: size_roi must be >= 4");
    if (peak_threshold_tau < 0.0 || peak_threshold_tau >= 1.0)
        throw_error(ErrorCode::format_error, "config: tau must lie in [0, 1)");
}

DatasetConfig dataset_config(Dataset name) {
    DatasetConfig c;
    switch (name) {
        case Dataset::SAMM:
            c.name = "samm";
            c.fps = 200.0;
            c.l_window = 200;
            c.l_overlap = 60;
            c.l_interval = 60;
            c.size_roi = 15;
            c.peak_threshold_tau = 0.05;
            break;
        case Dataset::CASME2:
            c.name = "casme2";
            c.fps = 30.0;
            c.l_window = 30;
            c.l_overlap = 9;
            c.l_interval = 9;
            c.size_roi = 10;
            c.peak_threshold_tau = 0.15;
            break;
    }
    return c;
}

DatasetConfig dataset_config(const std::string& name) {
    std::string n;
    for (char ch : name) n.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
    if (n == "samm") return dataset_config(Dataset::SAMM);
    if (n == "casme2" || n == "cas(me)2" || n == "casme^2") return dataset_config(Dataset::CASME2);
    throw_error(ErrorCode::unknown_dataset, "unknown dataset '" + name + "'");
}

DatasetConfig parse_config_file(const fs::path& path) {
    DatasetConfig c;
    bool have_base = false;
    std::map<std::string, bool> seen;
    for (const KvEntry& e : parse_kv_file(path)) {
        if (!e.section.empty() || e.key.find('.') != std::string::npos)
            continue;  // other modules' keys (fusion.*, roi.*) share the file
        if (e.key == "base") {
            c = dataset_config(e.value);
            have_base = true;
        } else if (e.key == "name") {
            c.name = e.value;
        } else if (e.key == "fps") {
            c.fps = parse_double(e.value, "fps");
        } else if (e.key == "l_window") {
            c.l_window = parse_int(e.value, "l_window");
        } else if (e.key == "l_overlap") {
            c.l_overlap = parse_int(e.value, "l_overlap");
        } else if (e.key == "l_interval") {
            c.l_interval = parse_int(e.value, "l_interval");
        } else if (e.key == "size_roi") {
            if (e.value == "none")
                c.size_roi.reset();
            else
                c.size_roi = parse_int(e.value, "size_roi");
        } else if (e.key == "tau") {
            c.peak_threshold_tau = parse_double(e.value, "tau");
        } else {
            throw_error(ErrorCode::format_error, path.string() + ": line " +
                                                     std::to_string(e.line_no) +
                                                     ": unknown config key '" + e.key + "'");
        }
        seen[e.key] = true;
    }
    if (!have_base && c.name.empty()) c.name = "custom";
    c.validate();
    return c;
}

// ---------------------------------------------------------------------------
// PGM (P5, 8-bit)

namespace {

int next_pgm_token(std::istream& in) {
    // skips whitespace and '#' comment lines between header fields
    int c = in.get();
    while (c != EOF) {
        if (c == '#') {
            while (c != EOF && c != '\n') c = in.get();
        } else if (!std::isspace(c)) {
            break;
        }
        c = in.get();
    }
    if (c == EOF) return -1;
    int value = 0;
    while (c != EOF && std::isdigit(c)) {
        value = value * 10 + (c - '0');
        c = in.get();
    }
    return value;
}

}  // namespace

Frame read_pgm(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw_error(ErrorCode::io_error, "cannot open " + path.string());
    char magic[2] = {0, 0};
    in.read(magic, 2);
    if (!in || magic[0] != 'P' || magic[1] != '5')
        throw_error(ErrorCode::format_error, path.string() + ": not a P5 PGM file");
    int width = next_pgm_token(in);
    int height = next_pgm_token(in);
    int maxval = next_pgm_token(in);
    if (width <= 0 || height <= 0 || maxval <= 0 || maxval > 255)
        throw_error(ErrorCode::format_error, path.string() + ": bad PGM header");
    Frame f;
    f.width = width;
    f.height = height;
    f.pixels.resize(static_cast<std::size_t>(width) * height);
    in.read(reinterpret_cast<char*>(f.pixels.data()),
            static_cast<std::streamsize>(f.pixels.size()));
    if (in.gcount() != static_cast<std::streamsize>(f.pixels.size()))
        throw_error(ErrorCode::io_error, path.string() + ": truncated pixel data");
    return f;
}

void write_pgm(const fs::path& path, const Frame& frame) {
    std::ostringstream out;
    out << "P5\n" << frame.width << " " << frame.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(frame.pixels.data()),
              static_cast<std::streamsize>(frame.pixels.size()));
    write_file_atomic(path, out.str());
}

// ---------------------------------------------------------------------------
// Packed raw video: 16-byte header of little-endian u32 fields
// { magic "MEPV", width, height, frame_count }, then frame_count frames of
// width*height bytes each, row-major, in index order.

static constexpr std::uint32_t kPackedMagic = 0x5650454Du;  // "MEPV"

namespace {

std::uint32_t read_u32le(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

void put_u32le(std::string& s, std::uint32_t v) {
    s.push_back(static_cast<char>(v & 0xff));
    s.push_back(static_cast<char>((v >> 8) & 0xff));
    s.push_back(static_cast<char>((v >> 16) & 0xff));
    s.push_back(static_cast<char>((v >> 24) & 0xff));
}

}  // namespace

FrameSequence read_packed_video(const fs::path& path, const VideoMeta& meta) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw_error(ErrorCode::io_error, "cannot open " + path.string());
    unsigned char header[16];
    in.read(reinterpret_cast<char*>(header), 16);
    if (in.gcount() != 16)
        throw_error(ErrorCode::io_error, path.string() + ": truncated packed header");
    if (read_u32le(header) != kPackedMagic)
        throw_error(ErrorCode::format_error, path.string() + ": bad packed magic");
    std::uint32_t width = read_u32le(header + 4);
    std::uint32_t height = read_u32le(header + 8);
    std::uint32_t count = read_u32le(header + 12);
    if (width == 0 || height == 0)
        throw_error(ErrorCode::format_error, path.string() + ": zero frame dimensions");
    if (count == 0) throw_error(ErrorCode::empty_video, path.string() + ": zero frames");

    FrameSequence seq;
    seq.video_id = meta.video_id;
    seq.subject_id = meta.subject_id;
    seq.fps = meta.fps;
    seq.first_index = meta.first_index;
    seq.frames.reserve(count);
    const std::size_t frame_bytes = static_cast<std::size_t>(width) * height;
    for (std::uint32_t i = 0; i < count; ++i) {
        Frame f;
        f.width = static_cast<int>(width);
        f.height = static_cast<int>(height);
        f.pixels.resize(frame_bytes);
        in.read(reinterpret_cast<char*>(f.pixels.data()), static_cast<std::streamsize>(frame_bytes));
        if (in.gcount() != static_cast<std::streamsize>(frame_bytes))
            throw_error(ErrorCode::io_error, path.string() + ": truncated at frame " +
                                                 std::to_string(i + 1) + " of " +
                                                 std::to_string(count));
        seq.frames.push_back(std::move(f));
    }
    return seq;
}

void write_packed_video(const fs::path& path, const FrameSequence& seq) {
    if (seq.frames.empty()) throw_error(ErrorCode::empty_video, "refusing to write empty video");
    std::string out;
    const Frame& first = seq.frames.front();
    out.reserve(16 + seq.frames.size() * first.pixels.size());
    put_u32le(out, kPackedMagic);
    put_u32le(out, static_cast<std::uint32_t>(first.width));
    put_u32le(out, static_cast<std::uint32_t>(first.height));
    put_u32le(out, static_cast<std::uint32_t>(seq.frames.size()));
    for (const Frame& f : seq.frames) {
        if (f.width != first.width || f.height != first.height)
            throw_error(ErrorCode::dimension_mismatch, "mixed frame dimensions in " + seq.video_id);
        out.append(reinterpret_cast<const char*>(f.pixels.data()), f.pixels.size());
    }
    write_file_atomic(path, out);
}

FrameSequence load_frame_sequence(const fs::path& path, const VideoMeta& meta) {
    if (!fs::exists(path)) throw_error(ErrorCode::io_error, "no such path: " + path.string());
    if (!fs::is_directory(path)) return read_packed_video(path, meta);

    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(path)) {
        if (entry.is_regular_file() && entry.path().extension() == ".pgm")
            files.push_back(entry.path());
    }
    if (files.empty()) throw_error(ErrorCode::empty_video, "no .pgm frames in " + path.string());
    std::sort(files.begin(), files.end(),
              [](const fs::path& a, const fs::path& b) { return a.filename() < b.filename(); });

    FrameSequence seq;
    seq.video_id = meta.video_id;
    seq.subject_id = meta.subject_id;
    seq.fps = meta.fps;
    seq.first_index = meta.first_index;
    seq.frames.reserve(files.size());
    for (const fs::path& f : files) {
        Frame frame = read_pgm(f);
        if (!seq.frames.empty() &&
            (frame.width != seq.frames.front().width || frame.height != seq.frames.front().height))
            throw_error(ErrorCode::dimension_mismatch,
                        f.string() + ": frame dimensions differ from first frame");
        seq.frames.push_back(std::move(frame));
    }
    return seq;
}

// ---------------------------------------------------------------------------
// Landmark CSV

LandmarkTrack parse_landmark_track_text(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    std::vector<std::pair<int, std::vector<Point>>> rows;
    while (std::getline(in, line)) {
        ++line_no;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        std::vector<std::string> cols = split(t, ',');
        if (cols.size() != 1 + 2 * kLandmarkCount)
            throw_error(ErrorCode::format_error,
                        "landmark row " + std::to_string(line_no) + ": expected " +
                            std::to_string(1 + 2 * kLandmarkCount) + " columns, got " +
                            std::to_string(cols.size()));
        int frame_idx = parse_int(cols[0], "frame_idx");
        std::vector<Point> pts(kLandmarkCount);
        for (int i = 0; i < kLandmarkCount; ++i) {
            pts[i].x = parse_double(cols[1 + 2 * i], "x");
            pts[i].y = parse_double(cols[2 + 2 * i], "y");
        }
        rows.emplace_back(frame_idx, std::move(pts));
    }
    if (rows.empty()) throw_error(ErrorCode::empty_track, "landmark file has no rows");
    std::sort(rows.begin(), rows.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t i = 1; i < rows.size(); ++i)
        if (rows[i].first == rows[i - 1].first)
            throw_error(ErrorCode::format_error,
                        "duplicate landmark row for frame " + std::to_string(rows[i].first));

    LandmarkTrack track;
    track.first_index = rows.front().first;
    int last = rows.back().first;
    track.frames.reserve(static_cast<std::size_t>(last - track.first_index + 1));
    std::size_t r = 0;
    for (int f = track.first_index; f <= last; ++f) {
        if (rows[r].first == f) {
            track.frames.push_back(rows[r].second);
            ++r;
            continue;
        }
        // gap: interpolate between the bracketing tracked frames
        const auto& lo = rows[r - 1];
        const auto& hi = rows[r];
        double t = static_cast<double>(f - lo.first) / (hi.first - lo.first);
        std::vector<Point> pts(kLandmarkCount);
        for (int i = 0; i < kLandmarkCount; ++i) {
            pts[i].x = lo.second[i].x + t * (hi.second[i].x - lo.second[i].x);
            pts[i].y = lo.second[i].y + t * (hi.second[i].y - lo.second[i].y);
        }
        track.frames.push_back(std::move(pts));
    }
    return track;
}

LandmarkTrack parse_landmark_track(const fs::path& path) {
    return parse_landmark_track_text(read_text_file(path));
}

std::string landmark_track_to_csv(const LandmarkTrack& track) {
    std::ostringstream out;
    char buf[32];
    for (std::size_t i = 0; i < track.frames.size(); ++i) {
        out << (track.first_index + static_cast<int>(i));
        for (const Point& p : track.frames[i]) {
            std::snprintf(buf, sizeof buf, "%.17g", p.x);
            out << ',' << buf;
            std::snprintf(buf, sizeof buf, "%.17g", p.y);
            out << ',' << buf;
        }
        out << '\n';
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// Ground-truth CSV

std::vector<GroundTruthInterval> parse_ground_truth_text(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    std::vector<GroundTruthInterval> out;
    while (std::getline(in, line)) {
        ++line_no;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        std::vector<std::string> cols = split(t, ',');
        if (cols.size() != 5)
            throw_error(ErrorCode::format_error, "ground-truth row " + std::to_string(line_no) +
                                                     ": expected 5 columns, got " +
                                                     std::to_string(cols.size()));
        GroundTruthInterval gt;
        gt.video_id = cols[0];
        gt.kind = gt_kind_from_string(cols[1]);
        gt.onset = parse_int(cols[2], "onset");
        if (!cols[3].empty()) gt.apex = parse_int(cols[3], "apex");
        gt.offset = parse_int(cols[4], "offset");
        if (gt.onset > gt.offset)
            throw_error(ErrorCode::invalid_interval,
                        "ground-truth row " + std::to_string(line_no) + ": onset " +
                            std::to_string(gt.onset) + " > offset " + std::to_string(gt.offset));
        if (gt.apex && (*gt.apex < gt.onset || *gt.apex > gt.offset))
            throw_error(ErrorCode::invalid_interval,
                        "ground-truth row " + std::to_string(line_no) + ": apex " +
                            std::to_string(*gt.apex) + " outside [onset, offset]");
        out.push_back(gt);
    }
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        if (a.video_id != b.video_id) return a.video_id < b.video_id;
        return a.onset < b.onset;
    });
    return out;
}

std::vector<GroundTruthInterval> parse_ground_truth(const fs::path& path) {
    return parse_ground_truth_text(read_text_file(path));
}

std::string ground_truth_to_csv(const std::vector<GroundTruthInterval>& intervals) {
    std::ostringstream out;
    for (const GroundTruthInterval& gt : intervals) {
        out << gt.video_id << ',' << to_string(gt.kind) << ',' << gt.onset << ',';
        if (gt.apex) out << *gt.apex;
        out << ',' << gt.offset << '\n';
    }
    return out.str();
}

}  // namespace mespot
