#include "mespot/manifest.hpp"

#include <set>
#include <sstream>

#include "mespot/io_util.hpp"

namespace mespot {

RunManifest parse_manifest(const std::filesystem::path& path) {
    RunManifest m;
    m.base_dir = path.parent_path();
    for (const KvEntry& e : parse_kv_file(path)) {
        if (!e.section.empty())
            throw_error(ErrorCode::format_error,
                        path.string() + ": line " + std::to_string(e.line_no) +
                            ": manifests have no sections");
        if (e.key == "dataset") {
            m.dataset = e.value;
        } else if (e.key == "config") {
            m.config_path = m.base_dir / e.value;
        } else if (e.key == "gt") {
            m.gt_path = m.base_dir / e.value;
        } else if (e.key == "video") {
            std::istringstream fields(e.value);
            ManifestVideo v;
            std::string frames, landmarks;
            if (!(fields >> v.video_id >> v.subject_id >> frames >> landmarks))
                throw_error(ErrorCode::format_error,
                            path.string() + ": line " + std::to_string(e.line_no) +
                                ": video needs '<id> <subject> <frames> <landmarks>'");
            v.frames = m.base_dir / frames;
            v.landmarks = m.base_dir / landmarks;
            std::string extra;
            while (fields >> extra) {
                if (extra.rfind("first=", 0) == 0)
                    v.first_index = parse_int(extra.substr(6), "first");
                else
                    throw_error(ErrorCode::format_error,
                                path.string() + ": line " + std::to_string(e.line_no) +
                                    ": unknown video field '" + extra + "'");
            }
            m.videos.push_back(std::move(v));
        } else {
            throw_error(ErrorCode::format_error, path.string() + ": line " +
                                                     std::to_string(e.line_no) +
                                                     ": unknown manifest key '" + e.key + "'");
        }
    }
    if (m.videos.empty())
        throw_error(ErrorCode::format_error, path.string() + ": manifest lists no videos");
    std::set<std::string> ids;
    for (const ManifestVideo& v : m.videos)
        if (!ids.insert(v.video_id).second)
            throw_error(ErrorCode::format_error,
                        path.string() + ": duplicate video id '" + v.video_id + "'");
    return m;
}

}  // namespace mespot
