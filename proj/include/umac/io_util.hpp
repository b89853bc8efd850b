#pragma once

// Small file-output helpers shared by the exporters and experiment runners.

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <stdexcept>
#include <string>

namespace umac::io {

// Writes body to a sibling temp file, then renames it over path. A crashed or
// interrupted run leaves either the old file or the new one, never a torn mix.
inline void atomic_write(const std::string& path, const std::string& body) {
    namespace fs = std::filesystem;
    fs::path target(path);
    if (target.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(target.parent_path(), ec);
        if (ec)
            throw std::runtime_error("cannot create directory " +
                                     target.parent_path().string() + ": " + ec.message());
    }
    fs::path tmp = target;
    tmp += ".tmp";

    std::FILE* f = std::fopen(tmp.string().c_str(), "wb");
    if (!f) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    size_t written = body.empty() ? 0 : std::fwrite(body.data(), 1, body.size(), f);
    int close_rc = std::fclose(f);
    if (written != body.size() || close_rc != 0) {
        std::remove(tmp.string().c_str());
        throw std::runtime_error("short write to " + tmp.string());
    }

    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        std::remove(tmp.string().c_str());
        throw std::runtime_error("cannot rename " + tmp.string() + " to " + path + ": " +
                                 ec.message());
    }
}

// Appends the 4 bytes of an IEEE-754 float, little-endian.
inline void append_le_float(std::string& body, float v) {
    static_assert(sizeof(float) == 4);
    uint32_t bits;
    std::memcpy(&bits, &v, 4);
    char b[4] = {static_cast<char>(bits & 0xff), static_cast<char>((bits >> 8) & 0xff),
                 static_cast<char>((bits >> 16) & 0xff), static_cast<char>((bits >> 24) & 0xff)};
    body.append(b, 4);
}

}  // namespace umac::io
