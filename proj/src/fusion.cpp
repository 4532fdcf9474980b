#include "mespot/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

#include "mespot/io_util.hpp"

namespace mespot {

int FusionParams::tolerance_for(int l_interval) const {
    if (t_tolerance > 0) return t_tolerance;
    return static_cast<int>(std::lround(l_interval / 3.0));
}

int FusionParams::merge_gap_for(int l_interval) const {
    if (merge_gap > 0) return merge_gap;
    return (l_interval + 1) / 2;
}

FusionParams fusion_params_from_config(const std::filesystem::path& path) {
    FusionParams p;
    for (const KvEntry& e : parse_kv_file(path)) {
        if (!e.section.empty() || e.key.rfind("fusion.", 0) != 0) continue;
        std::string key = e.key.substr(7);
        if (key == "d_min")
            p.d_min = parse_double(e.value, "fusion.d_min");
        else if (key == "t_tolerance")
            p.t_tolerance = parse_int(e.value, "fusion.t_tolerance");
        else if (key == "k_max")
            p.k_max_rois = parse_int(e.value, "fusion.k_max");
        else if (key == "merge_gap")
            p.merge_gap = parse_int(e.value, "fusion.merge_gap");
        else if (key == "nose_veto")
            p.nose_veto = e.value == "true" || e.value == "1" || e.value == "on";
        else
            throw_error(ErrorCode::format_error, "unknown fusion key '" + e.key + "'");
    }
    return p;
}

std::vector<RoiPositive> local_qualification(const std::vector<RoiPositive>& positives,
                                             const FusionParams& params) {
    std::vector<RoiPositive> kept;
    kept.reserve(positives.size());
    for (const RoiPositive& p : positives) {
        if (p.cn <= 0.0) continue;
        if (p.max_distance < params.d_min) continue;
        kept.push_back(p);
    }
    return kept;
}

std::vector<int> spatial_fusion(const std::vector<RoiPositive>& qualified,
                                const FusionParams& params, int l_interval) {
    if (qualified.empty()) return {};
    const int tol = params.tolerance_for(l_interval);

    // Positive frames per ROI, plus the frame range worth scanning.
    std::map<int, std::vector<int>> frames_by_roi;
    std::map<int, RoiRole> role_of;
    int lo = qualified.front().global_frame, hi = lo;
    for (const RoiPositive& p : qualified) {
        frames_by_roi[p.roi_id].push_back(p.global_frame);
        role_of[p.roi_id] = p.role;
        lo = std::min(lo, p.global_frame);
        hi = std::max(hi, p.global_frame);
    }
    for (auto& [roi, frames] : frames_by_roi) {
        std::sort(frames.begin(), frames.end());
        frames.erase(std::unique(frames.begin(), frames.end()), frames.end());
    }
    auto fires_near = [&](const std::vector<int>& frames, int n) {
        auto it = std::lower_bound(frames.begin(), frames.end(), n - tol);
        return it != frames.end() && *it <= n + tol;
    };

    std::vector<int> candidates;
    for (int n = std::max(1, lo - tol); n <= hi + tol; ++n) {
        int rois_firing = 0;
        bool non_nose = false;
        bool nose = false;
        for (const auto& [roi, frames] : frames_by_roi) {
            if (!fires_near(frames, n)) continue;
            ++rois_firing;
            if (role_of[roi] == RoiRole::nose_reference)
                nose = true;
            else
                non_nose = true;
        }
        if (!non_nose) continue;
        if (params.nose_veto && nose) continue;
        if (rois_firing > params.k_max_rois) continue;
        candidates.push_back(n);
    }
    return candidates;
}

std::vector<SpottedInterval> merge_intervals(const std::vector<int>& instants, int l_interval,
                                             const FusionParams& params, const std::string& video_id,
                                             int first_frame, int last_frame) {
    const int gap = params.merge_gap_for(l_interval);
    std::vector<int> sorted = instants;
    std::sort(sorted.begin(), sorted.end());

    std::vector<SpottedInterval> out;
    for (int n : sorted) {
        int onset = n;
        int offset = n + l_interval - 1;
        if (!out.empty() && onset - out.back().offset <= gap) {
            out.back().offset = std::max(out.back().offset, offset);
            out.back().score += 1.0;
        } else {
            SpottedInterval si;
            si.video_id = video_id;
            si.onset = onset;
            si.offset = offset;
            si.score = 1.0;
            si.source = SpotSource::ltp_ml;
            out.push_back(si);
        }
    }
    for (SpottedInterval& si : out) {
        si.onset = std::max(si.onset, first_frame);
        si.offset = std::min(si.offset, last_frame);
    }
    return out;
}

std::vector<SpottedInterval> fuse_video(const std::vector<RoiPositive>& positives,
                                        const FusionParams& params, int l_interval,
                                        const std::string& video_id, int first_frame,
                                        int last_frame) {
    std::vector<RoiPositive> qualified = local_qualification(positives, params);
    std::vector<int> instants = spatial_fusion(qualified, params, l_interval);
    return merge_intervals(instants, l_interval, params, video_id, first_frame, last_frame);
}

std::string intervals_to_csv(const std::vector<SpottedInterval>& intervals) {
    std::ostringstream out;
    char buf[32];
    for (const SpottedInterval& si : intervals) {
        std::snprintf(buf, sizeof buf, "%.9g", si.score);
        out << si.video_id << ',' << si.onset << ',' << si.offset << ',' << buf << ','
            << to_string(si.source) << '\n';
    }
    return out.str();
}

std::vector<SpottedInterval> parse_intervals_csv_text(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    std::vector<SpottedInterval> out;
    while (std::getline(in, line)) {
        ++line_no;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        std::vector<std::string> cols = split(t, ',');
        if (cols.size() != 5)
            throw_error(ErrorCode::format_error, "intervals row " + std::to_string(line_no) +
                                                     ": expected 5 columns, got " +
                                                     std::to_string(cols.size()));
        SpottedInterval si;
        si.video_id = cols[0];
        si.onset = parse_int(cols[1], "onset");
        si.offset = parse_int(cols[2], "offset");
        si.score = parse_double(cols[3], "score");
        si.source = spot_source_from_string(cols[4]);
        if (si.onset > si.offset)
            throw_error(ErrorCode::invalid_interval,
                        "intervals row " + std::to_string(line_no) + ": onset > offset");
        out.push_back(std::move(si));
    }
    return out;
}

std::vector<SpottedInterval> parse_intervals_csv(const std::filesystem::path& path) {
    return parse_intervals_csv_text(read_text_file(path));
}

}  // namespace mespot
