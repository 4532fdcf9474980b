// mespot: micro-expression spotting toolkit CLI.
//
// Subcommands: synth (render a synthetic dataset), spot (run one spotter over
// a manifest), loso (leave-one-subject-out train + spot + evaluate), evaluate
// (score a spotted-intervals CSV against ground truth).

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "mespot/dataio.hpp"
#include "mespot/fusion.hpp"
#include "mespot/io_util.hpp"
#include "mespot/lbpchi2.hpp"
#include "mespot/manifest.hpp"
#include "mespot/metrics.hpp"
#include "mespot/pipeline.hpp"
#include "mespot/synth.hpp"

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace fs = std::filesystem;
using namespace mespot;

namespace {

constexpr int kExitData = 1;
constexpr int kExitUsage = 2;

struct CommonOpts {
    std::string manifest_path;
    std::string dataset;
    std::string config_path;
    std::string layout_path;
    std::string out_dir = "out";
    int jobs = 0;
    bool no_nose_veto = false;
};

void apply_jobs(int jobs) {
#if defined(_OPENMP)
    if (jobs > 0) omp_set_num_threads(jobs);
#else
    (void)jobs;
#endif
}

DatasetConfig resolve_config(const CommonOpts& opts, const RunManifest& manifest) {
    if (!opts.config_path.empty()) return parse_config_file(opts.config_path);
    if (!opts.dataset.empty()) return dataset_config(opts.dataset);
    if (!manifest.config_path.empty()) return parse_config_file(manifest.config_path);
    if (!manifest.dataset.empty()) return dataset_config(manifest.dataset);
    throw_error(ErrorCode::format_error,
                "no dataset configuration: pass --dataset/--config or set one in the manifest");
}

RoiLayoutMap resolve_layout(const CommonOpts& opts) {
    if (!opts.layout_path.empty()) return parse_roi_layout_file(opts.layout_path);
    return default_roi_layout();
}

FusionParams resolve_fusion(const CommonOpts& opts) {
    FusionParams fusion;
    if (!opts.config_path.empty()) fusion = fusion_params_from_config(opts.config_path);
    if (opts.no_nose_veto) fusion.nose_veto = false;
    return fusion;
}

std::vector<GroundTruthInterval> load_gt(const RunManifest& manifest) {
    if (manifest.gt_path.empty()) return {};
    return parse_ground_truth(manifest.gt_path);
}

void write_report_files(const fs::path& out_dir, const EvalReport& report) {
    write_file_atomic(out_dir / "report.csv", report_to_csv(report));
    write_file_atomic(out_dir / "report.json", report_to_json(report));
}

int cmd_spot(const CommonOpts& opts, const std::string& method, const std::string& model_path,
             double tau, bool dump_curves, bool dump_features) {
    if (method != "ltp-ml" && method != "lbp-chi2") {
        std::cerr << "error: --method must be ltp-ml or lbp-chi2\n";
        return kExitUsage;
    }
    if (method == "ltp-ml" && model_path.empty()) {
        std::cerr << "error: ltp-ml spotting needs --model (train one with `mespot loso`)\n";
        return kExitUsage;
    }
    apply_jobs(opts.jobs);
    RunManifest manifest = parse_manifest(opts.manifest_path);
    DatasetConfig config = resolve_config(opts, manifest);
    RoiLayoutMap layout = resolve_layout(opts);
    FusionParams fusion = resolve_fusion(opts);

    fs::create_directories(opts.out_dir);
    SvmModel model;
    if (method == "ltp-ml") model = load_model(model_path);
    std::vector<SpottedInterval> all;
    std::string curves_csv, features_csv;
    for (const ManifestVideo& v : manifest.videos) {
        if (method == "lbp-chi2") {
            VideoMeta meta{v.video_id, v.subject_id, config.fps, v.first_index};
            FrameSequence seq = load_frame_sequence(v.frames, meta);
            LandmarkTrack landmarks = parse_landmark_track(v.landmarks);
            LbpSpotResult r = spot_lbp_chi2(seq, landmarks, config, tau);
            all.insert(all.end(), r.intervals.begin(), r.intervals.end());
            if (dump_curves) curves_csv += curve_to_csv(v.video_id, r.curve, v.first_index);
        } else {
            VideoLtpFeatures f = extract_video_features(v, config, layout);
            std::vector<SpottedInterval> intervals =
                spot_video_ltp(f, model, fusion, config.l_interval);
            all.insert(all.end(), intervals.begin(), intervals.end());
            if (dump_features) features_csv += ltp_features_to_csv(f);
        }
    }
    write_file_atomic(fs::path(opts.out_dir) / "spotted.csv", intervals_to_csv(all));
    if (dump_curves)
        write_file_atomic(fs::path(opts.out_dir) / "curves.csv",
                          "video_id,frame,d,c\n" + curves_csv);
    if (dump_features)
        write_file_atomic(fs::path(opts.out_dir) / "features.csv", features_csv);
    std::cout << "spotted " << all.size() << " intervals over " << manifest.videos.size()
              << " videos -> " << (fs::path(opts.out_dir) / "spotted.csv").string() << "\n";
    return 0;
}

int cmd_loso(const CommonOpts& opts, double c_param, double k, std::uint64_t seed,
             double max_class_weight) {
    apply_jobs(opts.jobs);
    RunManifest manifest = parse_manifest(opts.manifest_path);
    LosoOptions options;
    options.config = resolve_config(opts, manifest);
    options.layout = resolve_layout(opts);
    options.fusion = resolve_fusion(opts);
    options.c_param = c_param;
    options.k = k;
    options.seed = seed;
    options.max_class_weight = max_class_weight;
    std::vector<GroundTruthInterval> gt = load_gt(manifest);

    LosoOutput result = run_loso(manifest, gt, options);

    fs::path out_dir(opts.out_dir);
    fs::create_directories(out_dir / "models");
    for (const auto& [subject, model] : result.fold_models)
        save_model(out_dir / "models" / (subject + ".svm"), model);
    write_file_atomic(out_dir / "spotted.csv", intervals_to_csv(result.intervals));
    write_report_files(out_dir, result.report);

    std::cout << "loso: " << result.fold_models.size() << " folds, "
              << result.intervals.size() << " pooled intervals\n";
    std::cout << report_to_csv(result.report);
    return 0;
}

int cmd_evaluate(const std::string& spotted_path, const std::string& gt_path, double k,
                 const std::string& out_dir) {
    std::vector<SpottedInterval> spotted = parse_intervals_csv(spotted_path);
    std::vector<GroundTruthInterval> gt = parse_ground_truth(gt_path);

    // Ground truth (any kind) defines the video universe.
    std::vector<std::string> video_ids;
    for (const GroundTruthInterval& g : gt) video_ids.push_back(g.video_id);
    std::sort(video_ids.begin(), video_ids.end());
    video_ids.erase(std::unique(video_ids.begin(), video_ids.end()), video_ids.end());

    EvalReport report = database_metrics(evaluate_intervals(spotted, gt, video_ids, k));
    fs::create_directories(out_dir);
    write_report_files(out_dir, report);
    std::cout << report_to_csv(report);
    return 0;
}

int cmd_synth(const std::string& spec_path, const std::string& out_dir, bool reseed,
              std::uint64_t seed) {
    SynthSuite suite = parse_synth_suite(spec_path);
    if (reseed) {
        std::uint64_t ordinal = 0;
        for (SynthSpec& spec : suite.videos) spec.seed = seed + ++ordinal;
    }
    write_synth_dataset(suite, out_dir);
    std::cout << "wrote " << suite.videos.size() << " videos to " << out_dir << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"micro-expression spotting toolkit"};
    app.require_subcommand(1);

    CommonOpts common;
    std::string method, model_path, spotted_path, gt_path, spec_path;
    double tau = -1.0;
    double c_param = 1.0;
    double k = 0.5;
    std::uint64_t seed = 1;
    bool dump_curves = false, dump_features = false;

    auto add_common = [&](CLI::App* cmd, bool needs_manifest) {
        if (needs_manifest)
            cmd->add_option("--manifest", common.manifest_path, "run manifest file")->required();
        cmd->add_option("--dataset", common.dataset, "built-in dataset config (samm|casme2)");
        cmd->add_option("--config", common.config_path, "dataset config override file");
        cmd->add_option("--layout", common.layout_path, "ROI layout file");
        cmd->add_option("--out", common.out_dir, "output directory");
        cmd->add_option("--jobs", common.jobs, "worker threads (0 = library default)");
        cmd->add_flag("--no-nose-veto", common.no_nose_veto,
                      "disable the nose-reference veto in spatial fusion");
    };

    CLI::App* spot = app.add_subcommand("spot", "spot intervals with one method");
    add_common(spot, true);
    spot->add_option("--method", method, "ltp-ml | lbp-chi2")->required();
    spot->add_option("--model", model_path, "trained SVM model (ltp-ml)");
    spot->add_option("--tau", tau, "peak-selection threshold override (lbp-chi2)");
    spot->add_flag("--dump-curves", dump_curves, "write per-frame difference curves");
    spot->add_flag("--dump-features", dump_features, "write LTP feature vectors");

    double max_class_weight = 32.0;
    CLI::App* loso = app.add_subcommand("loso", "leave-one-subject-out train/spot/evaluate");
    add_common(loso, true);
    loso->add_option("--c", c_param, "SVM C parameter");
    loso->add_option("--k", k, "IoU threshold for evaluation");
    loso->add_option("--seed", seed, "training seed");
    loso->add_option("--max-class-weight", max_class_weight,
                     "cap for the inverse-frequency class weights");

    CLI::App* evaluate = app.add_subcommand("evaluate", "score spotted intervals");
    evaluate->add_option("--spotted", spotted_path, "spotted intervals CSV")->required();
    evaluate->add_option("--gt", gt_path, "ground-truth CSV")->required();
    evaluate->add_option("--k", k, "IoU threshold");
    evaluate->add_option("--out", common.out_dir, "output directory");

    CLI::App* synth = app.add_subcommand("synth", "render a synthetic dataset");
    synth->add_option("--spec", spec_path, "synthesis spec file")->required();
    synth->add_option("--out", common.out_dir, "output directory")->required();
    synth->add_option("--seed", seed, "override the suite seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (spot->parsed())
            return cmd_spot(common, method, model_path, tau, dump_curves, dump_features);
        if (loso->parsed()) return cmd_loso(common, c_param, k, seed, max_class_weight);
        if (evaluate->parsed()) return cmd_evaluate(spotted_path, gt_path, k, common.out_dir);
        if (synth->parsed())
            return cmd_synth(spec_path, common.out_dir, synth->count("--seed") > 0, seed);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
    return kExitUsage;
}
