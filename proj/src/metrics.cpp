#include "mespot/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include <nlohmann/json.hpp>

namespace mespot {

double interval_iou(int onset_a, int offset_a, int onset_b, int offset_b) {
    const long long inter = std::min(offset_a, offset_b) - std::max(onset_a, onset_b) + 1;
    if (inter <= 0) return 0.0;
    const long long len_a = offset_a - onset_a + 1;
    const long long len_b = offset_b - onset_b + 1;
    const long long uni = len_a + len_b - inter;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

VideoCounts match_intervals(const std::vector<SpottedInterval>& spotted,
                            const std::vector<GroundTruthInterval>& ground_truth, double k) {
    VideoCounts counts;
    if (!spotted.empty())
        counts.video_id = spotted.front().video_id;
    else if (!ground_truth.empty())
        counts.video_id = ground_truth.front().video_id;
    counts.m = static_cast<int>(ground_truth.size());
    counts.n = static_cast<int>(spotted.size());

    struct Pair {
        double iou;
        int gt;
        int sp;
    };
    std::vector<Pair> pairs;
    for (int g = 0; g < counts.m; ++g) {
        for (int s = 0; s < counts.n; ++s) {
            double iou = interval_iou(spotted[static_cast<std::size_t>(s)].onset,
                                      spotted[static_cast<std::size_t>(s)].offset,
                                      ground_truth[static_cast<std::size_t>(g)].onset,
                                      ground_truth[static_cast<std::size_t>(g)].offset);
            if (iou >= k) pairs.push_back({iou, g, s});
        }
    }
    std::sort(pairs.begin(), pairs.end(), [&](const Pair& a, const Pair& b) {
        if (a.iou != b.iou) return a.iou > b.iou;
        int ga = ground_truth[static_cast<std::size_t>(a.gt)].onset;
        int gb = ground_truth[static_cast<std::size_t>(b.gt)].onset;
        if (ga != gb) return ga < gb;
        int sa = spotted[static_cast<std::size_t>(a.sp)].onset;
        int sb = spotted[static_cast<std::size_t>(b.sp)].onset;
        if (sa != sb) return sa < sb;
        // fully deterministic order even for duplicated intervals
        if (a.gt != b.gt) return a.gt < b.gt;
        return a.sp < b.sp;
    });

    std::vector<bool> gt_used(static_cast<std::size_t>(counts.m), false);
    std::vector<bool> sp_used(static_cast<std::size_t>(counts.n), false);
    for (const Pair& p : pairs) {
        if (gt_used[static_cast<std::size_t>(p.gt)] || sp_used[static_cast<std::size_t>(p.sp)])
            continue;
        gt_used[static_cast<std::size_t>(p.gt)] = true;
        sp_used[static_cast<std::size_t>(p.sp)] = true;
        ++counts.a;
    }
    return counts;
}

VideoMetrics video_metrics(const VideoCounts& counts) {
    VideoMetrics m;
    if (counts.m > 0) m.recall = static_cast<double>(counts.a) / counts.m;
    if (counts.n > 0) m.precision = static_cast<double>(counts.a) / counts.n;
    if (counts.m + counts.n > 0) m.f1 = 2.0 * counts.a / (counts.m + counts.n);
    return m;
}

EvalReport database_metrics(const std::vector<VideoCounts>& all_counts) {
    EvalReport report;
    report.videos = all_counts;
    for (const VideoCounts& c : all_counts) {
        report.total_tp += c.a;
        report.total_spotted += c.n;
        report.total_gt += c.m;
    }
    report.total_fp = report.total_spotted - report.total_tp;
    report.total_fn = report.total_gt - report.total_tp;
    if (report.total_gt > 0)
        report.recall = static_cast<double>(report.total_tp) / static_cast<double>(report.total_gt);
    if (report.total_spotted > 0)
        report.precision =
            static_cast<double>(report.total_tp) / static_cast<double>(report.total_spotted);
    if (report.recall && report.precision && (*report.recall + *report.precision) > 0.0)
        report.f1 = 2.0 * (*report.recall * *report.precision) / (*report.recall + *report.precision);
    return report;
}

namespace {

std::string fmt_opt(const std::optional<double>& v) {
    if (!v) return "NA";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", *v);
    return buf;
}

}  // namespace

std::string report_to_csv(const EvalReport& report) {
    std::ostringstream out;
    out << "video_id,m,n,tp,fp,fn,recall,precision,f1\n";
    for (const VideoCounts& c : report.videos) {
        VideoMetrics vm = video_metrics(c);
        out << c.video_id << ',' << c.m << ',' << c.n << ',' << c.a << ',' << c.fp() << ','
            << c.fn() << ',' << fmt_opt(vm.recall) << ',' << fmt_opt(vm.precision) << ','
            << fmt_opt(vm.f1) << '\n';
    }
    out << "ALL," << report.total_gt << ',' << report.total_spotted << ',' << report.total_tp << ','
        << report.total_fp << ',' << report.total_fn << ',' << fmt_opt(report.recall) << ','
        << fmt_opt(report.precision) << ',' << fmt_opt(report.f1) << '\n';
    return out.str();
}

std::string report_to_json(const EvalReport& report) {
    auto opt = [](const std::optional<double>& v) {
        return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
    };
    nlohmann::ordered_json j;
    j["videos"] = nlohmann::ordered_json::array();
    for (const VideoCounts& c : report.videos) {
        VideoMetrics vm = video_metrics(c);
        nlohmann::ordered_json v;
        v["video_id"] = c.video_id;
        v["m"] = c.m;
        v["n"] = c.n;
        v["tp"] = c.a;
        v["fp"] = c.fp();
        v["fn"] = c.fn();
        v["recall"] = opt(vm.recall);
        v["precision"] = opt(vm.precision);
        v["f1"] = opt(vm.f1);
        j["videos"].push_back(std::move(v));
    }
    nlohmann::ordered_json d;
    d["tp"] = report.total_tp;
    d["fp"] = report.total_fp;
    d["fn"] = report.total_fn;
    d["m"] = report.total_gt;
    d["n"] = report.total_spotted;
    d["recall"] = opt(report.recall);
    d["precision"] = opt(report.precision);
    d["f1"] = opt(report.f1);
    j["database"] = std::move(d);
    return j.dump(2) + "\n";
}

}  // namespace mespot
