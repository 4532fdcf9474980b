#include "mespot/io_util.hpp"

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "mespot/types.hpp"

namespace mespot {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == sep) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(trim(cur));
    return out;
}

std::vector<KvEntry> parse_kv_text(const std::string& text) {
    std::vector<KvEntry> entries;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw_error(ErrorCode::format_error,
                            "line " + std::to_string(line_no) + ": unterminated section header");
            section = trim(t.substr(1, t.size() - 2));
            continue;
        }
        std::size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw_error(ErrorCode::format_error,
                        "line " + std::to_string(line_no) + ": expected key = value");
        KvEntry e;
        e.section = section;
        e.key = trim(t.substr(0, eq));
        e.value = trim(t.substr(eq + 1));
        e.line_no = line_no;
        if (e.key.empty())
            throw_error(ErrorCode::format_error, "line " + std::to_string(line_no) + ": empty key");
        entries.push_back(std::move(e));
    }
    return entries;
}

std::vector<KvEntry> parse_kv_file(const std::filesystem::path& path) {
    return parse_kv_text(read_text_file(path));
}

double parse_double(const std::string& s, const std::string& what) {
    const char* begin = s.c_str();
    char* end = nullptr;
    errno = 0;
    double v = std::strtod(begin, &end);
    if (end == begin || trim(end)[0] != '\0' || errno == ERANGE)
        throw_error(ErrorCode::format_error, "bad number for " + what + ": '" + s + "'");
    return v;
}

int parse_int(const std::string& s, const std::string& what) {
    const char* begin = s.c_str();
    char* end = nullptr;
    errno = 0;
    long v = std::strtol(begin, &end, 10);
    if (end == begin || trim(end)[0] != '\0' || errno == ERANGE)
        throw_error(ErrorCode::format_error, "bad integer for " + what + ": '" + s + "'");
    return static_cast<int>(v);
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw_error(ErrorCode::io_error, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw_error(ErrorCode::io_error, "cannot write " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw_error(ErrorCode::io_error, "short write to " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw_error(ErrorCode::io_error, "rename " + tmp.string() + " -> " + path.string() +
                                                 ": " + ec.message());
}

}  // namespace mespot
