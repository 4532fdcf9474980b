#ifndef MESPOT_MANIFEST_HPP
#define MESPOT_MANIFEST_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "mespot/types.hpp"

namespace mespot {

struct ManifestVideo {
    std::string video_id;
    std::string subject_id;
    std::filesystem::path frames;     // resolved against the manifest directory
    std::filesystem::path landmarks;
    int first_index = 1;
};

/// Run manifest, key=value text:
///   dataset = samm | casme2      (or: config = relative/path.cfg)
///   gt = gt.csv
///   video = <id> <subject> <frames_path> <landmarks_path> [first=<n>]
struct RunManifest {
    std::string dataset;
    std::filesystem::path config_path;  // empty unless `config =` was given
    std::filesystem::path gt_path;
    std::vector<ManifestVideo> videos;
    std::filesystem::path base_dir;
};

RunManifest parse_manifest(const std::filesystem::path& path);

}  // namespace mespot

#endif
