#pragma once

#include <json.hpp>

#include <filesystem>
#include <string>

namespace pdqrng::pipeline {

/// manifest.json of an output directory. Commands merge their sections into
/// it; file entries map names relative to the directory to SHA-256 digests.
class Manifest {
public:
    /// Existing manifest of `dir`, or an empty one.
    static Manifest load(const std::filesystem::path& dir);
    /// Empty manifest that replaces any existing one on save().
    static Manifest create(const std::filesystem::path& dir);

    nlohmann::json& section(const std::string& name) { return doc_[name]; }
    const nlohmann::json& doc() const noexcept { return doc_; }
    bool has(const std::string& name) const { return doc_.contains(name); }

    void add_file(const std::filesystem::path& file);
    void save() const;

private:
    std::filesystem::path dir_;
    nlohmann::json doc_ = nlohmann::json::object();
};

nlohmann::json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const nlohmann::json& doc);

} // namespace pdqrng::pipeline
