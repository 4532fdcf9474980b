#ifndef MESPOT_IO_UTIL_HPP
#define MESPOT_IO_UTIL_HPP

#include <filesystem>
#include <string>
#include <vector>

namespace mespot {

std::string trim(const std::string& s);

/// Splits on `sep` without any quoting rules; fields are trimmed.
std::vector<std::string> split(const std::string& line, char sep);

/// One `key = value` line of a config-style file. Lines under a
/// `[section ...]` header carry that header's text (without brackets).
struct KvEntry {
    std::string section;  // empty for the top of the file
    std::string key;
    std::string value;
    int line_no = 0;
};

/// Parses `key = value` text with `#` comments and optional [sections].
/// Repeated keys are preserved in file order.
std::vector<KvEntry> parse_kv_text(const std::string& text);
std::vector<KvEntry> parse_kv_file(const std::filesystem::path& path);

double parse_double(const std::string& s, const std::string& what);
int parse_int(const std::string& s, const std::string& what);

std::string read_text_file(const std::filesystem::path& path);

/// Writes to `<path>.tmp` then renames, so readers never observe a partial file.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace mespot

#endif
