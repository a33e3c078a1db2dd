#include "vrsal/reports.hpp"

#include <filesystem>
#include <fstream>

namespace vrsal {

void write_json(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw Error("write_json: cannot open " + path);
    out << j.dump(2) << "\n";
}

json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("read_json: cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw Error("read_json: malformed JSON in " + path + ": " + e.what());
    }
    return j;
}

namespace {

void dump_text(std::ostream& out, const json& j, const std::string& prefix) {
    for (const auto& [key, value] : j.items()) {
        const std::string name = prefix.empty() ? key : prefix + "." + key;
        if (value.is_object()) {
            dump_text(out, value, name);
        } else if (value.is_array() && value.size() > 12) {
            out << name << ": [" << value.size() << " values]\n";
        } else {
            out << name << ": " << value.dump() << "\n";
        }
    }
}

}  // namespace

void write_text_report(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw Error("write_text_report: cannot open " + path);
    dump_text(out, j, "");
}

void save_saliency_map(const std::string& basePath, const SaliencyMap& m, const json& extraMeta) {
    save_pfm(basePath + ".pfm", m.grid().image());

    // 8-bit max-one preview
    Image preview = m.grid().image();
    float maxV = 0;
    for (float v : preview.data) maxV = std::max(maxV, v);
    if (maxV > 0)
        for (float& v : preview.data) v /= maxV;
    save_png(basePath + ".png", preview);

    json meta;
    meta["normalization"] = normalization_name(m.normalization());
    meta["width"] = m.width();
    meta["height"] = m.height();
    for (const auto& [key, value] : extraMeta.items()) meta[key] = value;
    write_json(basePath + ".json", meta);
}

SaliencyMap load_saliency_map(const std::string& path) {
    namespace fs = std::filesystem;
    std::string base = path;
    const auto ext = fs::path(path).extension().string();
    if (ext == ".pfm" || ext == ".png" || ext == ".json")
        base = path.substr(0, path.size() - ext.size());

    std::string dataPath;
    if (fs::exists(base + ".pfm")) dataPath = base + ".pfm";
    else if (fs::exists(path) && ext != ".json") dataPath = path;
    else throw Error("load_saliency_map: no map data for " + path);

    Image img = load_image(dataPath).to_gray();
    Normalization norm = Normalization::RawCounts;
    if (fs::exists(base + ".json")) {
        const json meta = read_json(base + ".json");
        if (meta.contains("normalization"))
            norm = parse_normalization(meta.at("normalization").get<std::string>());
        if (meta.contains("width") && meta.at("width").get<int>() != img.width)
            throw Error("load_saliency_map: sidecar width mismatch for " + path);
    }
    return SaliencyMap(EquirectGrid(std::move(img)), norm);
}

}  // namespace vrsal
