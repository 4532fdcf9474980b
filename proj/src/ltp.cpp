#include "mespot/ltp.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace mespot {

namespace {

using MatrixRM = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Flips u so its largest-magnitude entry (first of them on ties) is >= 0.
void fix_sign(Eigen::VectorXd& u) {
    int arg = 0;
    double best = -1.0;
    for (int i = 0; i < u.size(); ++i) {
        double a = std::abs(u[i]);
        if (a > best) {
            best = a;
            arg = i;
        }
    }
    if (u[arg] < 0) u = -u;
}

}  // namespace

ProjectedTrack temporal_pca(const RoiTrack& track) {
    const int n = track.frame_count;
    const int dim = track.dim;
    if (n < 2)
        throw_error(ErrorCode::too_few_frames,
                    "temporal_pca needs at least 2 frames, got " + std::to_string(n));

    Eigen::Map<const MatrixRM> frames(track.data.data(), n, dim);  // rows = frames
    Eigen::RowVectorXd mean = frames.colwise().mean();
    MatrixRM centered = frames.rowwise() - mean;
    const double total_var = centered.squaredNorm();

    ProjectedTrack out;
    out.dim = dim;
    out.mean.assign(mean.data(), mean.data() + dim);
    out.basis.assign(static_cast<std::size_t>(2) * dim, 0.0);
    out.points.assign(static_cast<std::size_t>(n), Point{0.0, 0.0});

    if (total_var <= 0.0) {
        out.variance_captured = 1.0;  // nothing varies; the zero map captures it all
        return out;
    }

    Eigen::VectorXd directions[2];
    double top_eigenvalues[2] = {0.0, 0.0};

    if (n <= dim) {
        // Gram route: eigenvectors of the small N x N matrix lift to pixel space.
        Eigen::MatrixXd gram = centered * centered.transpose();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
        for (int k = 0; k < 2; ++k) {
            int idx = n - 1 - k;
            if (idx < 0) break;
            double lambda = std::max(0.0, eig.eigenvalues()[idx]);
            top_eigenvalues[k] = lambda;
            if (lambda <= total_var * 1e-18) continue;
            Eigen::VectorXd u = centered.transpose() * eig.eigenvectors().col(idx);
            double norm = u.norm();
            if (norm <= 0.0) continue;
            u /= norm;
            directions[k] = std::move(u);
        }
    } else {
        // Covariance route for long windows on small ROIs.
        Eigen::MatrixXd cov = centered.transpose() * centered;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
        for (int k = 0; k < 2; ++k) {
            int idx = dim - 1 - k;
            if (idx < 0) break;
            double lambda = std::max(0.0, eig.eigenvalues()[idx]);
            top_eigenvalues[k] = lambda;
            if (lambda <= total_var * 1e-18) continue;
            directions[k] = eig.eigenvectors().col(idx);
        }
    }

    for (int k = 0; k < 2; ++k) {
        if (directions[k].size() == 0) continue;
        fix_sign(directions[k]);
        for (int i = 0; i < dim; ++i) out.basis[static_cast<std::size_t>(k) * dim + i] = directions[k][i];
        Eigen::VectorXd proj = centered * directions[k];
        for (int i = 0; i < n; ++i) {
            if (k == 0)
                out.points[static_cast<std::size_t>(i)].x = proj[i];
            else
                out.points[static_cast<std::size_t>(i)].y = proj[i];
        }
    }
    out.variance_captured = (top_eigenvalues[0] + top_eigenvalues[1]) / total_var;
    return out;
}

std::vector<double> distance_pattern(const ProjectedTrack& proj, int n, int l_interval) {
    const int count = static_cast<int>(proj.points.size());
    std::vector<double> deltas;
    deltas.reserve(static_cast<std::size_t>(l_interval - 1));
    const Point& p0 = proj.points.at(static_cast<std::size_t>(n - 1));
    for (int w = 1; w <= l_interval - 1 && n + w <= count; ++w) {
        const Point& pw = proj.points[static_cast<std::size_t>(n - 1 + w)];
        deltas.push_back(std::hypot(pw.x - p0.x, pw.y - p0.y));
    }
    return deltas;
}

std::vector<double> LtpFeature::to_vector() const {
    std::vector<double> v;
    v.reserve(distances.size() + 1);
    v.push_back(cn);
    v.insert(v.end(), distances.begin(), distances.end());
    return v;
}

std::vector<LtpFeature> normalize_roi(const std::vector<RawPattern>& patterns, int l_interval) {
    double cn = 0.0;
    for (const RawPattern& p : patterns)
        for (double d : p.deltas)
            if (d > cn) cn = d;

    std::vector<LtpFeature> out;
    out.reserve(patterns.size());
    for (const RawPattern& p : patterns) {
        LtpFeature f;
        f.roi_id = p.roi_id;
        f.global_frame = p.global_frame;
        f.span_index = p.span_index;
        f.cn = cn;
        f.distances.assign(static_cast<std::size_t>(l_interval - 1), 0.0);
        for (std::size_t i = 0; i < p.deltas.size(); ++i)
            f.distances[i] = cn > 0.0 ? p.deltas[i] / cn : 0.0;
        out.push_back(std::move(f));
    }
    return out;
}

namespace {

// Raw patterns of one (span, ROI) cell, in frame order.
std::vector<RawPattern> span_roi_patterns(const FrameSequence& video, const WindowSpan& span,
                                          const RoiRect& rect, int l_interval) {
    RoiTrack track = extract_roi_track(video, span.start, span.length(), rect);
    std::vector<RawPattern> out;
    out.reserve(static_cast<std::size_t>(span.length()));
    if (span.length() < 2) {
        // degenerate one-frame span: no projection, empty distance set
        out.push_back({rect.roi_id, video.first_index + span.start - 1, span.index_m, {}});
        return out;
    }
    ProjectedTrack proj = temporal_pca(track);
    for (int n : roi_window_starts(span.length(), l_interval)) {
        RawPattern p;
        p.roi_id = rect.roi_id;
        p.global_frame = video.first_index + span.start + n - 2;
        p.span_index = span.index_m;
        p.deltas = distance_pattern(proj, n, l_interval);
        out.push_back(std::move(p));
    }
    return out;
}

struct SpanGeometry {
    WindowSpan span;
    std::vector<RoiRect> rects;
};

std::vector<SpanGeometry> plan_spans(const FrameSequence& video, const LandmarkTrack& landmarks,
                                     const DatasetConfig& config, const RoiLayoutMap& layout) {
    if (video.frames.empty()) throw_error(ErrorCode::empty_video, video.video_id + ": no frames");
    layout.validate();
    const int width = video.frames.front().width;
    const int height = video.frames.front().height;
    std::vector<SpanGeometry> plan;
    for (const WindowSpan& span : segment_video(video.frame_count(), config)) {
        const auto& anchor = landmarks.at_frame(video.first_index + span.start - 1);
        int side = roi_side(inner_eye_distance(anchor, layout), config);
        plan.push_back({span, roi_layout(anchor, side, layout, width, height)});
    }
    return plan;
}

VideoLtpFeatures assemble(const FrameSequence& video, const RoiLayoutMap& layout,
                          const DatasetConfig& config,
                          const std::vector<std::vector<RawPattern>>& cells, int n_spans) {
    VideoLtpFeatures out;
    out.video_id = video.video_id;
    out.subject_id = video.subject_id;
    out.total_frames = video.frame_count();
    out.first_index = video.first_index;
    for (const RoiLayoutEntry& e : layout.rois) out.roles[static_cast<std::size_t>(e.roi_id)] = e.role;
    for (int roi = 0; roi < kRoiCount; ++roi) {
        std::vector<RawPattern> merged;
        for (int s = 0; s < n_spans; ++s) {
            const auto& cell = cells[static_cast<std::size_t>(s) * kRoiCount + roi];
            merged.insert(merged.end(), cell.begin(), cell.end());
        }
        out.per_roi[static_cast<std::size_t>(roi)] = normalize_roi(merged, config.l_interval);
    }
    return out;
}

}  // namespace

VideoLtpFeatures extract_ltp_features_serial(const FrameSequence& video,
                                             const LandmarkTrack& landmarks,
                                             const DatasetConfig& config,
                                             const RoiLayoutMap& layout) {
    const std::vector<SpanGeometry> plan = plan_spans(video, landmarks, config, layout);
    std::vector<std::vector<RawPattern>> cells(plan.size() * kRoiCount);
    for (std::size_t s = 0; s < plan.size(); ++s)
        for (int roi = 0; roi < kRoiCount; ++roi)
            cells[s * kRoiCount + roi] = span_roi_patterns(
                video, plan[s].span, plan[s].rects[static_cast<std::size_t>(roi)], config.l_interval);
    return assemble(video, layout, config, cells, static_cast<int>(plan.size()));
}

VideoLtpFeatures extract_ltp_features(const FrameSequence& video, const LandmarkTrack& landmarks,
                                      const DatasetConfig& config, const RoiLayoutMap& layout) {
    const std::vector<SpanGeometry> plan = plan_spans(video, landmarks, config, layout);
    std::vector<std::vector<RawPattern>> cells(plan.size() * kRoiCount);
    const int n_cells = static_cast<int>(cells.size());
#pragma omp parallel for schedule(dynamic)
    for (int c = 0; c < n_cells; ++c) {
        const std::size_t s = static_cast<std::size_t>(c) / kRoiCount;
        const int roi = c % kRoiCount;
        cells[static_cast<std::size_t>(c)] = span_roi_patterns(
            video, plan[s].span, plan[s].rects[static_cast<std::size_t>(roi)], config.l_interval);
    }
    return assemble(video, layout, config, cells, static_cast<int>(plan.size()));
}

std::string ltp_features_to_csv(const VideoLtpFeatures& features) {
    std::ostringstream out;
    char buf[32];
    for (const auto& roi_features : features.per_roi) {
        for (const LtpFeature& f : roi_features) {
            out << features.video_id << ',' << f.roi_id << ',' << f.global_frame;
            std::snprintf(buf, sizeof buf, "%.9g", f.cn);
            out << ',' << buf;
            for (double d : f.distances) {
                std::snprintf(buf, sizeof buf, "%.9g", d);
                out << ',' << buf;
            }
            out << '\n';
        }
    }
    return out.str();
}

}  // namespace mespot
