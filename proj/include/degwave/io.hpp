#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace degwave {

/// Shortest round-trip decimal form of a double; used for every numeric
/// cell so identical runs produce byte-identical files.
std::string format_double(double v);

/// FNV-1a 64-bit content digest, reported as 16 hex digits.
std::uint64_t fnv1a64(std::string_view bytes);
std::string digest_hex(std::string_view bytes);

/// Collects artifact files under one output directory and writes
/// MANIFEST.txt with a "path<TAB>digest" line per artifact, sorted by
/// path. The log file carries timestamps and stays out of the manifest.
class ArtifactWriter {
public:
    explicit ArtifactWriter(std::filesystem::path dir);

    void write_file(const std::string& name, const std::string& content);
    void append_log(const std::string& line);
    void finalize_manifest();

    const std::filesystem::path& dir() const { return dir_; }

private:
    std::filesystem::path dir_;
    std::vector<std::pair<std::string, std::string>> entries_;
};

/// Row-oriented CSV accumulator with a fixed header.
class CsvBuilder {
public:
    explicit CsvBuilder(std::string header);
    void add_row(const std::vector<double>& values);
    void add_raw_row(const std::string& row);
    const std::string& str() const { return text_; }

private:
    std::string text_;
};

}  // namespace degwave
