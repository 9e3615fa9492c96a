#include "pipeline.hpp"

#include "worker_pool.hpp"

#include <walkscope/error.hpp>

#include <fmt/format.h>
#include <json.hpp>
#include <spdlog/spdlog.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>

namespace walkscope::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

void write_text(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
}

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot read " + path.string());
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

const char* extension(ReportFormat f) { return f == ReportFormat::csv ? ".csv" : ".json"; }

CommandResult finish(Command command, const RunConfig& config, CommandResult result) {
    json errors = json::array();
    for (const TileError& e : result.errors) {
        errors.push_back({{"tile_id", e.tile_id}, {"message", e.message}});
        std::fprintf(stderr, "error: tile %s: %s\n", e.tile_id.c_str(), e.message.c_str());
    }
    const json doc = {{"command", std::string(command_name(command))},
                      {"n_tiles", result.n_tiles},
                      {"n_errors", result.errors.size()},
                      {"errors", errors}};
    write_text(config.out_dir / "errors.json", doc.dump(2) + "\n");
    spdlog::info("{}: {} tiles, {} errors", command_name(command), result.n_tiles, result.errors.size());
    return result;
}

std::string num(double v) { return fmt::format("{:.6f}", v); }

// Splits one CSV record; double quotes wrap fields and "" escapes a quote.
std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                field += '"';
                ++i;
            } else if (ch == '"') {
                quoted = false;
            } else {
                field += ch;
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            out.push_back(std::move(field));
            field.clear();
        } else if (ch != '\r') {
            field += ch;
        }
    }
    out.push_back(std::move(field));
    return out;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (char ch : s) {
        out += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    }
    return out + "\"";
}

std::optional<double> curvature_of(const TileMetrics& m) {
    return m.defined && m.n_curvature_points > 0 ? std::optional<double>(m.mean_curvature) : std::nullopt;
}

TileRaster load_checked(const TileFile& f) {
    TileRaster tile = load_tile(f.image, f.sidecar);
    if (tile.tile_id() != f.tile_id) {
        throw FormatError("sidecar tile_id '" + tile.tile_id() + "' does not match file name " +
                          f.image.filename().string());
    }
    return tile;
}

} // namespace

std::vector<TileFile> list_tiles(const fs::path& dir) {
    if (!fs::is_directory(dir)) {
        throw IoError("not a directory: " + dir.string());
    }
    std::vector<TileFile> out;
    for (const fs::directory_entry& e : fs::directory_iterator(dir)) {
        if (!e.is_regular_file()) {
            continue;
        }
        const fs::path& p = e.path();
        const std::string ext = p.extension().string();
        if (ext != ".png" && ext != ".pgm") {
            continue;
        }
        fs::path sidecar = default_sidecar_path(p);
        if (!fs::exists(sidecar)) {
            spdlog::debug("skipping {}: no sidecar", p.string());
            continue;
        }
        out.push_back({p.stem().string(), p, std::move(sidecar)});
    }
    std::sort(out.begin(), out.end(), [](const TileFile& a, const TileFile& b) { return a.image < b.image; });
    return out;
}

std::string metrics_csv(const std::vector<TileMetrics>& metrics) {
    std::string out = "tile_id,mean_width,mean_angle,mean_curvature,n_points,n_curvature_points,n_skipped,defined\n";
    for (const TileMetrics& m : metrics) {
        const auto k = curvature_of(m);
        out += fmt::format("{},{},{},{},{},{},{},{}\n", csv_field(m.tile_id), m.defined ? num(m.mean_width) : "",
                           m.defined ? num(m.mean_angle) : "", k ? num(*k) : "", m.n_points,
                           m.n_curvature_points, m.n_skipped, m.defined ? 1 : 0);
    }
    return out;
}

std::string metrics_json(const std::vector<TileMetrics>& metrics) {
    json rows = json::array();
    for (const TileMetrics& m : metrics) {
        const auto k = curvature_of(m);
        rows.push_back({{"tile_id", m.tile_id},
                        {"mean_width", m.defined ? json(m.mean_width) : json(nullptr)},
                        {"mean_angle", m.defined ? json(m.mean_angle) : json(nullptr)},
                        {"mean_curvature", k ? json(*k) : json(nullptr)},
                        {"n_points", m.n_points},
                        {"n_curvature_points", m.n_curvature_points},
                        {"n_skipped", m.n_skipped},
                        {"defined", m.defined}});
    }
    return json{{"tiles", rows}}.dump(2) + "\n";
}

std::vector<TileMetrics> read_metrics(const fs::path& path) {
    const std::string text = read_text(path);
    std::vector<TileMetrics> out;
    if (path.extension() == ".json") {
        try {
            const json doc = json::parse(text);
            for (const json& r : doc.at("tiles")) {
                TileMetrics m;
                m.tile_id = r.at("tile_id").get<std::string>();
                m.defined = r.value("defined", !r.at("mean_width").is_null());
                if (m.defined) {
                    m.mean_width = r.at("mean_width").get<double>();
                    m.mean_angle = r.at("mean_angle").get<double>();
                }
                m.n_points = r.value("n_points", std::size_t{0});
                m.n_skipped = r.value("n_skipped", std::size_t{0});
                if (!r.at("mean_curvature").is_null()) {
                    m.mean_curvature = r.at("mean_curvature").get<double>();
                    m.n_curvature_points = r.value("n_curvature_points", std::size_t{1});
                }
                out.push_back(std::move(m));
            }
        } catch (const json::exception& e) {
            throw FormatError(path.string() + ": " + e.what());
        }
        return out;
    }

    std::stringstream in(text);
    std::string line;
    if (!std::getline(in, line)) {
        throw FormatError(path.string() + ": empty metrics file");
    }
    const std::vector<std::string> header = split_csv(line);
    std::map<std::string, std::size_t> col;
    for (std::size_t i = 0; i < header.size(); ++i) {
        col[header[i]] = i;
    }
    for (const char* required : {"tile_id", "mean_width", "mean_angle", "mean_curvature"}) {
        if (!col.contains(required)) {
            throw FormatError(path.string() + ": missing column " + required);
        }
    }
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") {
            continue;
        }
        const std::vector<std::string> f = split_csv(line);
        if (f.size() != header.size()) {
            throw FormatError(fmt::format("{}:{}: expected {} fields, got {}", path.string(), line_no,
                                          header.size(), f.size()));
        }
        auto number = [&](const char* name) -> std::optional<double> {
            const std::string& s = f[col.at(name)];
            if (s.empty()) {
                return std::nullopt;
            }
            std::size_t used = 0;
            double v = 0.0;
            try {
                v = std::stod(s, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != s.size()) {
                throw FormatError(fmt::format("{}:{}: bad number '{}' in {}", path.string(), line_no, s, name));
            }
            return v;
        };
        auto count = [&](const char* name, std::size_t fallback) {
            if (!col.contains(name)) {
                return fallback;
            }
            const auto v = number(name);
            return v ? static_cast<std::size_t>(*v) : fallback;
        };
        TileMetrics m;
        m.tile_id = f[col.at("tile_id")];
        const auto w = number("mean_width");
        const auto a = number("mean_angle");
        const auto k = number("mean_curvature");
        m.defined = col.contains("defined") ? (f[col.at("defined")] == "1" || f[col.at("defined")] == "true")
                                            : w.has_value();
        if (m.defined && (!w || !a)) {
            throw FormatError(fmt::format("{}:{}: defined tile without means", path.string(), line_no));
        }
        m.mean_width = w.value_or(0.0);
        m.mean_angle = a.value_or(0.0);
        m.mean_curvature = k.value_or(0.0);
        m.n_points = count("n_points", m.defined ? 1 : 0);
        m.n_curvature_points = count("n_curvature_points", k ? 1 : 0);
        m.n_skipped = count("n_skipped", 0);
        out.push_back(std::move(m));
    }
    return out;
}

Rgb class_color(ClassId c) noexcept {
    switch (c) {
    case ClassId::sidewalk: return {255, 0, 0};
    case ClassId::building: return {0, 0, 255};
    case ClassId::road: return {128, 128, 128};
    case ClassId::background: break;
    }
    return {255, 255, 255};
}

RgbImage render_overlay(const TileRaster& tile) {
    RgbImage img(tile.width(), tile.height());
    for (int r = 0; r < tile.height(); ++r) {
        for (int c = 0; c < tile.width(); ++c) {
            img(r, c) = class_color(tile.label(r, c));
        }
    }
    return img;
}

CommandResult cmd_rasterize(const RunConfig& config) {
    config.validate(Command::rasterize);
    std::vector<VectorLayer> layers;
    if (!config.vector_path.empty()) {
        layers.push_back(read_vector_layer(config.vector_path, std::nullopt, config.class_property));
    }
    const std::pair<const fs::path*, ClassId> per_class[] = {{&config.sidewalk_path, ClassId::sidewalk},
                                                             {&config.road_path, ClassId::road},
                                                             {&config.building_path, ClassId::building}};
    for (const auto& [path, cls] : per_class) {
        if (!path->empty()) {
            layers.push_back(read_vector_layer(*path, cls));
        }
    }
    const std::vector<ManifestEntry> entries = read_manifest(config.manifest_path);
    fs::create_directories(config.out_dir);

    std::vector<std::optional<std::string>> failures(entries.size());
    std::set<std::string> seen;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (!seen.insert(entries[i].extent.tile_id).second) {
            failures[i] = "duplicate tile_id in manifest";
        }
    }
    parallel_for(entries.size(), config.workers, [&](std::size_t i) {
        if (failures[i]) {
            return;
        }
        const ManifestEntry& e = entries[i];
        try {
            std::vector<VectorLayer> clipped;
            clipped.reserve(layers.size());
            for (const VectorLayer& layer : layers) {
                clipped.push_back(clip_layer(layer, e.extent));
            }
            const int w = e.width > 0 ? e.width : config.tile_width;
            const int h = e.height > 0 ? e.height : config.tile_height;
            const TileRaster tile = rasterize(clipped, e.extent, w, h, config.priority);
            save_tile(tile, config.out_dir / (e.extent.tile_id + ".png"));
        } catch (const std::exception& ex) {
            failures[i] = ex.what();
        }
    });

    CommandResult result;
    result.n_tiles = entries.size();
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (failures[i]) {
            result.errors.push_back({entries[i].extent.tile_id, *failures[i]});
        }
    }
    return finish(Command::rasterize, config, std::move(result));
}

CommandResult cmd_analyze(const RunConfig& config) {
    config.validate(Command::analyze);
    const std::vector<TileFile> tiles = list_tiles(config.input_dir);
    const MeasureOptions options = config.measure_options();
    fs::create_directories(config.out_dir);
    if (config.dump_skeletons) {
        fs::create_directories(config.out_dir / "skeletons");
    }

    struct Outcome {
        std::optional<TileMetrics> metrics;
        std::string points;
        std::optional<std::string> error;
    };
    std::vector<Outcome> outcomes(tiles.size());
    parallel_for(tiles.size(), config.workers, [&](std::size_t i) {
        Outcome& o = outcomes[i];
        try {
            const TileRaster tile = load_checked(tiles[i]);
            TileAnalysis a = analyze_tile(tile, options);
            if (config.dump_points) {
                for (const PointMeasure& p : a.points) {
                    o.points += fmt::format("{},{},{},{},{},{}\n", csv_field(tile.tile_id()), p.point.row,
                                            p.point.col, num(p.width), num(p.angle),
                                            p.curvature ? num(*p.curvature) : "");
                }
            }
            if (config.dump_skeletons) {
                GrayImage img(a.skeleton.width(), a.skeleton.height());
                std::transform(a.skeleton.bits.values().begin(), a.skeleton.bits.values().end(),
                               img.values().begin(), [](std::uint8_t v) { return v != 0 ? 255 : 0; });
                write_gray_image(config.out_dir / "skeletons" / (tile.tile_id() + ".png"), img);
            }
            o.metrics = std::move(a.metrics);
        } catch (const std::exception& ex) {
            o.error = ex.what();
        }
    });

    CommandResult result;
    result.n_tiles = tiles.size();
    std::vector<TileMetrics> metrics;
    std::string points = "tile_id,row,col,width,angle,curvature\n";
    for (std::size_t i = 0; i < tiles.size(); ++i) {
        Outcome& o = outcomes[i];
        if (o.error) {
            result.errors.push_back({tiles[i].tile_id, *o.error});
            continue;
        }
        if (!o.metrics->defined) {
            spdlog::info("tile {}: no measurable sidewalk", o.metrics->tile_id);
        }
        metrics.push_back(std::move(*o.metrics));
        points += o.points;
    }
    const fs::path report = config.out_dir / (std::string("tile_metrics") + extension(config.format));
    write_text(report, config.format == ReportFormat::csv ? metrics_csv(metrics) : metrics_json(metrics));
    if (config.dump_points) {
        write_text(config.out_dir / "points.csv", points);
    }
    return finish(Command::analyze, config, std::move(result));
}

CommandResult cmd_evaluate(const RunConfig& config) {
    config.validate(Command::evaluate);
    const std::vector<TileFile> gt_tiles = list_tiles(config.gt_dir);
    std::map<std::string, TileFile> pred_by_id;
    for (TileFile& f : list_tiles(config.pred_dir)) {
        pred_by_id.emplace(f.tile_id, std::move(f));
    }
    const MeasureOptions options = config.measure_options();
    fs::create_directories(config.out_dir);

    struct Outcome {
        ConfusionMatrix cm;
        ClassScores tile_scores;
        TileMetrics gt;
        TileMetrics pred;
        std::optional<std::string> error;
    };
    std::vector<Outcome> outcomes(gt_tiles.size());
    parallel_for(gt_tiles.size(), config.workers, [&](std::size_t i) {
        Outcome& o = outcomes[i];
        const auto it = pred_by_id.find(gt_tiles[i].tile_id);
        if (it == pred_by_id.end()) {
            o.error = "missing prediction tile " + gt_tiles[i].tile_id;
            return;
        }
        try {
            const TileRaster gt = load_checked(gt_tiles[i]);
            const TileRaster pred = load_checked(it->second);
            o.cm = confusion(gt, pred);
            o.tile_scores = scores(o.cm);
            o.gt = analyze_tile(gt, options).metrics;
            o.pred = analyze_tile(pred, options).metrics;
        } catch (const std::exception& ex) {
            o.error = ex.what();
        }
    });
    std::set<std::string> gt_ids;
    for (const TileFile& f : gt_tiles) {
        gt_ids.insert(f.tile_id);
    }
    for (const auto& [id, _] : pred_by_id) {
        if (!gt_ids.contains(id)) {
            spdlog::warn("prediction tile {} has no ground truth; ignored", id);
        }
    }

    CommandResult result;
    result.n_tiles = gt_tiles.size();
    ConfusionMatrix total;
    std::vector<ClassScores> per_tile;
    std::array<std::vector<ValuePair>, 3> pairs;
    for (std::size_t i = 0; i < gt_tiles.size(); ++i) {
        const Outcome& o = outcomes[i];
        if (o.error) {
            result.errors.push_back({gt_tiles[i].tile_id, *o.error});
            continue;
        }
        total.accumulate(o.cm);
        per_tile.push_back(o.tile_scores);
        auto side = [](const TileMetrics& m, double v) { return m.defined ? std::optional<double>(v) : std::nullopt; };
        pairs[0].push_back({side(o.gt, o.gt.mean_width), side(o.pred, o.pred.mean_width)});
        pairs[1].push_back({side(o.gt, o.gt.mean_angle), side(o.pred, o.pred.mean_angle)});
        pairs[2].push_back({curvature_of(o.gt), curvature_of(o.pred)});
    }
    const ClassScores s = config.per_tile_scores ? average_scores(per_tile) : scores(total);
    std::vector<BinnedRmse> tables;
    for (std::size_t f = 0; f < 3; ++f) {
        tables.push_back(binned_rmse(pairs[f], config.bins[f], config.bin_key));
    }
    const bool csv = config.format == ReportFormat::csv;
    write_text(config.out_dir / (std::string("segmentation_scores") + extension(config.format)),
               csv ? scores_csv(s) : scores_json(s));
    write_text(config.out_dir / (std::string("binned_rmse") + extension(config.format)),
               csv ? binned_rmse_csv(tables) : binned_rmse_json(tables));
    return finish(Command::evaluate, config, std::move(result));
}

CommandResult cmd_aggregate(const RunConfig& config) {
    config.validate(Command::aggregate);
    const std::vector<TileMetrics> metrics = read_metrics(config.metrics_path);
    std::vector<TileExtent> extents;
    for (const ManifestEntry& e : read_manifest(config.manifest_path)) {
        extents.push_back(e.extent);
    }
    const LandUseLayer layer = read_landuse_layer(config.landuse_path, config.landuse_property);
    const std::map<std::string, std::string> assignment = landuse_join(extents, layer, config.join);
    const Aggregation agg = aggregate_by_landuse(metrics, assignment, config.category_order);

    std::set<std::string> known;
    for (const TileExtent& e : extents) {
        known.insert(e.tile_id);
    }
    CommandResult result;
    result.n_tiles = metrics.size();
    for (const TileMetrics& m : metrics) {
        if (!known.contains(m.tile_id)) {
            result.errors.push_back({m.tile_id, "tile not in manifest"});
        }
    }
    spdlog::info("aggregate: {} unassigned, {} undefined", agg.n_unassigned, agg.n_undefined);

    std::string assigned = "tile_id,land_use\n";
    for (const auto& [id, category] : assignment) {
        assigned += csv_field(id) + "," + csv_field(category) + "\n";
    }
    fs::create_directories(config.out_dir);
    write_text(config.out_dir / (std::string("landuse_aggregate") + extension(config.format)),
               config.format == ReportFormat::csv ? aggregation_csv(agg) : aggregation_json(agg));
    write_text(config.out_dir / "tile_landuse.csv", assigned);
    return finish(Command::aggregate, config, std::move(result));
}

CommandResult cmd_render(const RunConfig& config) {
    config.validate(Command::render);
    const std::vector<TileFile> tiles = list_tiles(config.input_dir);
    fs::create_directories(config.out_dir);
    std::vector<std::optional<std::string>> failures(tiles.size());
    parallel_for(tiles.size(), config.workers, [&](std::size_t i) {
        try {
            const TileRaster tile = load_checked(tiles[i]);
            write_rgb_png(config.out_dir / (tile.tile_id() + ".overlay.png"), render_overlay(tile));
        } catch (const std::exception& ex) {
            failures[i] = ex.what();
        }
    });
    CommandResult result;
    result.n_tiles = tiles.size();
    for (std::size_t i = 0; i < tiles.size(); ++i) {
        if (failures[i]) {
            result.errors.push_back({tiles[i].tile_id, *failures[i]});
        }
    }
    return finish(Command::render, config, std::move(result));
}

namespace {

RibbonSpec random_spec(const SynthOptions& o, std::size_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(o.seed), static_cast<std::uint32_t>(o.seed >> 32),
                      static_cast<std::uint32_t>(index)};
    std::mt19937_64 rng(seq);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    RibbonSpec s;
    s.canvas_width = o.size;
    s.canvas_height = o.size;
    s.width = o.width > 0 ? o.width : 3 + 2 * static_cast<int>(rng() % 6);
    const bool arc = o.kind == "arc" || (o.kind == "mixed" && rng() % 2 == 1);
    s.kind = arc ? RibbonKind::arc : RibbonKind::straight;
    s.jitter = true;
    s.seed = rng();
    const double room = o.size / 2.0 - 2.0 - s.width / 2.0 - 1.0;
    if (arc) {
        const double lo = std::min(room, std::max(s.width + 1.0, 0.15 * o.size));
        s.radius = lo + unit(rng) * (room - lo);
        s.length = unit(rng) < 0.3 ? 7.0 * s.radius : (1.0 + 3.0 * unit(rng)) * s.radius;
        s.arc_mid_angle = 360.0 * unit(rng);
    } else {
        s.heading = 180.0 * unit(rng);
        s.length = (0.4 + 0.4 * unit(rng)) * o.size;
    }
    return s;
}

} // namespace

CommandResult cmd_synth(const RunConfig& config) {
    config.validate(Command::synth);
    fs::create_directories(config.out_dir);
    const auto n = static_cast<std::size_t>(config.synth.count);
    std::vector<std::optional<std::string>> failures(n);
    std::vector<std::string> ids(n);
    parallel_for(n, config.workers, [&](std::size_t i) {
        ids[i] = fmt::format("synth_{:05d}", i);
        RibbonSpec spec = random_spec(config.synth, i);
        try {
            for (int attempt = 0;; ++attempt) {
                try {
                    write_fixture(config.out_dir, ids[i], make_ribbon(spec), spec);
                    break;
                } catch (const PreconditionError&) {
                    if (attempt == 8) {
                        throw;
                    }
                    spec.length *= 0.8;
                    spec.radius = std::max(spec.width + 1.0, spec.radius * 0.8);
                }
            }
        } catch (const std::exception& ex) {
            failures[i] = ex.what();
        }
    });
    CommandResult result;
    result.n_tiles = n;
    for (std::size_t i = 0; i < n; ++i) {
        if (failures[i]) {
            result.errors.push_back({ids[i], *failures[i]});
        }
    }
    return finish(Command::synth, config, std::move(result));
}

CommandResult run_command(Command command, const RunConfig& config) {
    switch (command) {
    case Command::rasterize: return cmd_rasterize(config);
    case Command::analyze: return cmd_analyze(config);
    case Command::evaluate: return cmd_evaluate(config);
    case Command::aggregate: return cmd_aggregate(config);
    case Command::render: return cmd_render(config);
    case Command::synth: return cmd_synth(config);
    }
    throw PreconditionError("unknown command");
}

} // namespace walkscope::cli
