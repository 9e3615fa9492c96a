#include "pipeline.hpp"

#include <walkscope/error.hpp>

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace walkscope::cli {

using nlohmann::json;

std::string_view command_name(Command c) noexcept {
    switch (c) {
    case Command::rasterize: return "rasterize";
    case Command::analyze: return "analyze";
    case Command::evaluate: return "evaluate";
    case Command::aggregate: return "aggregate";
    case Command::render: return "render";
    case Command::synth: return "synth";
    }
    return "?";
}

std::vector<double> parse_edges(const std::string& text) {
    std::vector<double> edges;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        const auto b = item.find_first_not_of(" \t");
        const auto e = item.find_last_not_of(" \t");
        if (b == std::string::npos) {
            throw PreconditionError("empty bin edge in '" + text + "'");
        }
        item = item.substr(b, e - b + 1);
        if (item == "inf" || item == "+inf") {
            edges.push_back(kInf);
            continue;
        }
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != item.size()) {
            throw PreconditionError("bad bin edge '" + item + "'");
        }
        edges.push_back(v);
    }
    return edges;
}

ClassPriority parse_priority(const std::string& text) {
    ClassPriority out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        const auto c = parse_class(item);
        if (!c) {
            throw PreconditionError("unknown class '" + item + "' in priority list");
        }
        out.push_back(*c);
    }
    return out;
}

namespace {

std::vector<double> edges_from_json(const json& v) {
    if (v.is_string()) {
        return parse_edges(v.get<std::string>());
    }
    std::vector<double> edges;
    for (const json& e : v) {
        if (e.is_string()) {
            const auto parsed = parse_edges(e.get<std::string>());
            edges.insert(edges.end(), parsed.begin(), parsed.end());
        } else {
            edges.push_back(e.get<double>());
        }
    }
    return edges;
}

ReportFormat parse_format(const std::string& s) {
    if (s == "csv") {
        return ReportFormat::csv;
    }
    if (s == "json") {
        return ReportFormat::json;
    }
    throw PreconditionError("unknown format '" + s + "' (csv or json)");
}

BinKey parse_bin_key(const std::string& s) {
    if (s == "gt") {
        return BinKey::ground_truth;
    }
    if (s == "pred") {
        return BinKey::prediction;
    }
    throw PreconditionError("unknown bin key '" + s + "' (gt or pred)");
}

JoinRule parse_join(const std::string& s) {
    if (s == "majority") {
        return JoinRule::majority_area;
    }
    if (s == "centroid") {
        return JoinRule::centroid;
    }
    throw PreconditionError("unknown join rule '" + s + "' (majority or centroid)");
}

void require_path(const std::filesystem::path& p, const char* what) {
    if (p.empty()) {
        throw PreconditionError(std::string("missing required input: ") + what);
    }
    if (!std::filesystem::exists(p)) {
        throw PreconditionError(std::string(what) + " does not exist: " + p.string());
    }
}

void optional_path(const std::filesystem::path& p, const char* what) {
    if (!p.empty() && !std::filesystem::exists(p)) {
        throw PreconditionError(std::string(what) + " does not exist: " + p.string());
    }
}

} // namespace

void apply_config_json(RunConfig& config, const std::string& json_text, const std::filesystem::path& base_dir) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception& e) {
        throw FormatError(std::string("config: ") + e.what());
    }
    if (!doc.is_object()) {
        throw FormatError("config: top level must be an object");
    }
    auto path = [&base_dir](const json& v) {
        std::filesystem::path p = v.get<std::string>();
        return p.is_relative() && !base_dir.empty() ? base_dir / p : p;
    };
    try {
        for (const auto& [key, v] : doc.items()) {
            if (key == "gt") config.gt_dir = path(v);
            else if (key == "pred") config.pred_dir = path(v);
            else if (key == "input") config.input_dir = path(v);
            else if (key == "vector") config.vector_path = path(v);
            else if (key == "sidewalk") config.sidewalk_path = path(v);
            else if (key == "road") config.road_path = path(v);
            else if (key == "building") config.building_path = path(v);
            else if (key == "manifest") config.manifest_path = path(v);
            else if (key == "landuse") config.landuse_path = path(v);
            else if (key == "metrics") config.metrics_path = path(v);
            else if (key == "out") config.out_dir = path(v);
            else if (key == "h") config.h = v.get<int>();
            else if (key == "prune") config.prune_length = v.get<int>();
            else if (key == "trim_end_caps") config.trim_end_caps = v.get<bool>();
            else if (key == "workers") config.workers = v.get<int>();
            else if (key == "format") config.format = parse_format(v.get<std::string>());
            else if (key == "tile_width") config.tile_width = v.get<int>();
            else if (key == "tile_height") config.tile_height = v.get<int>();
            else if (key == "priority") {
                if (v.is_string()) {
                    config.priority = parse_priority(v.get<std::string>());
                } else {
                    config.priority.clear();
                    for (const json& c : v) {
                        const auto parsed = parse_priority(c.get<std::string>());
                        config.priority.insert(config.priority.end(), parsed.begin(), parsed.end());
                    }
                }
            }
            else if (key == "class_property") config.class_property = v.get<std::string>();
            else if (key == "width_bins") config.bins[0].edges = edges_from_json(v);
            else if (key == "angle_bins") config.bins[1].edges = edges_from_json(v);
            else if (key == "curvature_bins") config.bins[2].edges = edges_from_json(v);
            else if (key == "bin_key") config.bin_key = parse_bin_key(v.get<std::string>());
            else if (key == "per_tile_scores") config.per_tile_scores = v.get<bool>();
            else if (key == "landuse_property") config.landuse_property = v.get<std::string>();
            else if (key == "join") config.join = parse_join(v.get<std::string>());
            else if (key == "categories") config.category_order = v.get<std::vector<std::string>>();
            else if (key == "points") config.dump_points = v.get<bool>();
            else if (key == "skeletons") config.dump_skeletons = v.get<bool>();
            else if (key == "count") config.synth.count = v.get<int>();
            else if (key == "kind") config.synth.kind = v.get<std::string>();
            else if (key == "size") config.synth.size = v.get<int>();
            else if (key == "ribbon_width") config.synth.width = v.get<int>();
            else if (key == "seed") config.synth.seed = v.get<std::uint64_t>();
            else throw FormatError("config: unknown key '" + key + "'");
        }
    } catch (const json::exception& e) {
        throw FormatError(std::string("config: ") + e.what());
    }
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot read config " + path.string());
    }
    std::stringstream buf;
    buf << in.rdbuf();
    RunConfig config;
    apply_config_json(config, buf.str(), path.parent_path());
    return config;
}

void RunConfig::validate(Command command) const {
    if (h < 2) {
        throw PreconditionError("h must be >= 2 (got " + std::to_string(h) + ")");
    }
    if (workers < 1) {
        throw PreconditionError("workers must be >= 1 (got " + std::to_string(workers) + ")");
    }
    if (prune_length < 0) {
        throw PreconditionError("prune length must be >= 0");
    }
    for (const BinSpec& b : bins) {
        b.validate();
    }
    switch (command) {
    case Command::rasterize:
        require_path(manifest_path, "manifest");
        if (vector_path.empty() && sidewalk_path.empty() && road_path.empty() && building_path.empty()) {
            throw PreconditionError("missing required input: at least one vector layer");
        }
        optional_path(vector_path, "vector layer");
        optional_path(sidewalk_path, "sidewalk layer");
        optional_path(road_path, "road layer");
        optional_path(building_path, "building layer");
        if (tile_width <= 0 || tile_height <= 0) {
            throw PreconditionError("tile size must be positive");
        }
        break;
    case Command::analyze:
    case Command::render:
        require_path(input_dir, "input tile directory");
        break;
    case Command::evaluate:
        require_path(gt_dir, "ground-truth tile directory");
        require_path(pred_dir, "prediction tile directory");
        break;
    case Command::aggregate:
        require_path(metrics_path, "tile metrics file");
        require_path(manifest_path, "manifest");
        require_path(landuse_path, "land-use layer");
        break;
    case Command::synth:
        if (synth.count < 0) {
            throw PreconditionError("count must be >= 0");
        }
        if (synth.kind != "straight" && synth.kind != "arc" && synth.kind != "mixed") {
            throw PreconditionError("kind must be straight, arc or mixed");
        }
        if (synth.size < 32) {
            throw PreconditionError("synthetic tile size must be >= 32");
        }
        if (synth.width != 0 && (synth.width < 3 || synth.width % 2 == 0)) {
            throw PreconditionError("ribbon width must be odd and >= 3");
        }
        break;
    }
}

MeasureOptions RunConfig::measure_options() const {
    MeasureOptions m;
    m.h = h;
    m.thin.prune_length = prune_length;
    m.trim_end_caps = trim_end_caps;
    return m;
}

} // namespace walkscope::cli
