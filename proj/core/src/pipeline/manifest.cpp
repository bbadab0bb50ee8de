#include "manifest.hpp"

#include "pdqrng/errors.hpp"
#include "pdqrng/pipeline/io.hpp"

namespace pdqrng::pipeline {

Manifest Manifest::load(const std::filesystem::path& dir) {
    Manifest m;
    m.dir_ = dir;
    const auto path = dir / "manifest.json";
    if (std::filesystem::exists(path)) {
        m.doc_ = read_json(path);
    }
    return m;
}

Manifest Manifest::create(const std::filesystem::path& dir) {
    Manifest m;
    m.dir_ = dir;
    return m;
}

void Manifest::add_file(const std::filesystem::path& file) {
    const auto rel = std::filesystem::relative(file, dir_).generic_string();
    doc_["files"][rel] = sha256_file(file);
}

void Manifest::save() const { write_json(dir_ / "manifest.json", doc_); }

nlohmann::json read_json(const std::filesystem::path& path) {
    try {
        return nlohmann::json::parse(read_text(path));
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
}

void write_json(const std::filesystem::path& path, const nlohmann::json& doc) {
    write_text(path, doc.dump(2) + "\n");
}

} // namespace pdqrng::pipeline
