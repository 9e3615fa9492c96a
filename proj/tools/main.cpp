#include "pipeline.hpp"

#include <walkscope/error.hpp>

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdio>
#include <cstdlib>
#include <map>

namespace {

using walkscope::cli::Command;
using nlohmann::json;

void setup_logging() {
    auto logger = spdlog::stderr_color_mt("walkscope");
    logger->set_pattern("[%l] %v");
    spdlog::set_default_logger(logger);
    const char* env = std::getenv("WALKSCOPE_LOG");
    spdlog::set_level(env != nullptr ? spdlog::level::from_str(env) : spdlog::level::warn);
}

template <typename T>
void option(CLI::App* app, json& overrides, const std::string& flag, const std::string& key, const std::string& help) {
    app->add_option_function<T>(flag, [&overrides, key](const T& v) { overrides[key] = v; }, help);
}

void toggle(CLI::App* app, json& overrides, const std::string& flag, const std::string& key, bool value,
            const std::string& help) {
    app->add_flag_callback(flag, [&overrides, key, value] { overrides[key] = value; }, help);
}

} // namespace

int main(int argc, char** argv) {
    setup_logging();
    CLI::App app{"Sidewalk morphometrics from class-labelled raster tiles"};
    app.set_help_flag("--help", "Print this help message and exit");
    app.require_subcommand(1);

    json overrides = json::object();
    std::string config_path;
    std::map<CLI::App*, Command> commands;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON config file; flags override its values");
        option<int>(sub, overrides, "--workers", "workers", "worker threads");
        option<int>(sub, overrides, "--h", "h", "finite-difference scale in pixels");
        option<std::string>(sub, overrides, "--out", "out", "output directory");
        option<std::string>(sub, overrides, "--format", "format", "report format: csv or json");
    };
    auto measure = [&](CLI::App* sub) {
        option<int>(sub, overrides, "--prune", "prune", "spur prune length (0 disables)");
        toggle(sub, overrides, "--no-trim", "trim_end_caps", false, "measure end-cap points too");
    };

    CLI::App* rasterize = app.add_subcommand("rasterize", "burn vector layers into annotation tiles");
    common(rasterize);
    option<std::string>(rasterize, overrides, "--manifest", "manifest", "tile extent manifest (JSON)");
    option<std::string>(rasterize, overrides, "--vector", "vector", "GeoJSON with a per-feature class property");
    option<std::string>(rasterize, overrides, "--sidewalk", "sidewalk", "sidewalk GeoJSON");
    option<std::string>(rasterize, overrides, "--road", "road", "road GeoJSON");
    option<std::string>(rasterize, overrides, "--building", "building", "building GeoJSON");
    option<std::string>(rasterize, overrides, "--class-property", "class_property", "class property name");
    option<std::string>(rasterize, overrides, "--priority", "priority", "burn priority, e.g. sidewalk,road,building");
    option<int>(rasterize, overrides, "--tile-width", "tile_width", "raster width when the manifest has none");
    option<int>(rasterize, overrides, "--tile-height", "tile_height", "raster height when the manifest has none");
    commands[rasterize] = Command::rasterize;

    CLI::App* analyze = app.add_subcommand("analyze", "per-tile width, angle and curvature");
    common(analyze);
    measure(analyze);
    option<std::string>(analyze, overrides, "--input", "input", "directory of tiles");
    toggle(analyze, overrides, "--points", "points", true, "also write points.csv");
    toggle(analyze, overrides, "--skeletons", "skeletons", true, "also write skeleton PNGs");
    commands[analyze] = Command::analyze;

    CLI::App* evaluate = app.add_subcommand("evaluate", "segmentation scores and binned RMSE");
    common(evaluate);
    measure(evaluate);
    option<std::string>(evaluate, overrides, "--gt", "gt", "ground-truth tile directory");
    option<std::string>(evaluate, overrides, "--pred", "pred", "prediction tile directory");
    option<std::string>(evaluate, overrides, "--width-bins", "width_bins", "e.g. 0,7,14,inf");
    option<std::string>(evaluate, overrides, "--angle-bins", "angle_bins", "e.g. 0,45,90,135,180");
    option<std::string>(evaluate, overrides, "--curvature-bins", "curvature_bins", "e.g. 0,0.1,0.2,0.3,inf");
    option<std::string>(evaluate, overrides, "--bin-key", "bin_key", "bin on gt or pred values");
    toggle(evaluate, overrides, "--per-tile-scores", "per_tile_scores", true, "average per-tile scores");
    commands[evaluate] = Command::evaluate;

    CLI::App* aggregate = app.add_subcommand("aggregate", "tile metrics by land use");
    common(aggregate);
    option<std::string>(aggregate, overrides, "--metrics", "metrics", "tile_metrics.csv or .json");
    option<std::string>(aggregate, overrides, "--manifest", "manifest", "tile extent manifest (JSON)");
    option<std::string>(aggregate, overrides, "--landuse", "landuse", "land-use GeoJSON");
    option<std::string>(aggregate, overrides, "--landuse-property", "landuse_property", "category property name");
    option<std::string>(aggregate, overrides, "--join", "join", "majority or centroid");
    option<std::vector<std::string>>(aggregate, overrides, "--categories", "categories", "report row order");
    commands[aggregate] = Command::aggregate;

    CLI::App* render = app.add_subcommand("render", "colour overlays of label tiles");
    common(render);
    option<std::string>(render, overrides, "--input", "input", "directory of tiles");
    commands[render] = Command::render;

    CLI::App* synth = app.add_subcommand("synth", "synthetic ribbon fixtures with ground truth");
    common(synth);
    option<int>(synth, overrides, "--count", "count", "number of tiles");
    option<std::string>(synth, overrides, "--kind", "kind", "straight, arc or mixed");
    option<int>(synth, overrides, "--size", "size", "tile side in pixels");
    option<int>(synth, overrides, "--ribbon-width", "ribbon_width", "odd ribbon width (0 = random)");
    option<std::uint64_t>(synth, overrides, "--seed", "seed", "random seed");
    commands[synth] = Command::synth;

    CLI11_PARSE(app, argc, argv);

    try {
        walkscope::cli::RunConfig config;
        if (!config_path.empty()) {
            config = walkscope::cli::load_config(config_path);
        }
        walkscope::cli::apply_config_json(config, overrides.dump());
        for (const auto& [sub, command] : commands) {
            if (sub->parsed()) {
                return walkscope::cli::run_command(command, config).exit_status();
            }
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 2;
}
