#include "degwave/io.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>

#include "degwave/errors.hpp"

namespace degwave {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string digest_hex(std::string_view bytes) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(bytes)));
    return buf;
}

ArtifactWriter::ArtifactWriter(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
}

void ArtifactWriter::write_file(const std::string& name, const std::string& content) {
    std::ofstream out(dir_ / name, std::ios::binary);
    if (!out)
        throw ValidationError("run.output_dir", "cannot write " + (dir_ / name).string());
    out << content;
    entries_.emplace_back(name, digest_hex(content));
}

void ArtifactWriter::append_log(const std::string& line) {
    std::ofstream out(dir_ / "run.log", std::ios::app);
    const auto now = std::chrono::system_clock::now().time_since_epoch();
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now).count();
    out << ms << " " << line << "\n";
}

void ArtifactWriter::finalize_manifest() {
    std::sort(entries_.begin(), entries_.end());
    std::string content;
    for (const auto& [name, digest] : entries_)
        content += name + "\t" + digest + "\n";
    std::ofstream out(dir_ / "MANIFEST.txt", std::ios::binary);
    out << content;
}

CsvBuilder::CsvBuilder(std::string header) : text_(std::move(header)) {
    text_ += "\n";
}

void CsvBuilder::add_row(const std::vector<double>& values) {
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) text_ += ",";
        text_ += format_double(values[i]);
    }
    text_ += "\n";
}

void CsvBuilder::add_raw_row(const std::string& row) {
    text_ += row;
    text_ += "\n";
}

}  // namespace degwave
