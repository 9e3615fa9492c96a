#pragma once

#include <walkscope/aggregate.hpp>
#include <walkscope/evaluation.hpp>
#include <walkscope/image_codec.hpp>
#include <walkscope/morphometrics.hpp>
#include <walkscope/synth.hpp>
#include <walkscope/vectorize.hpp>

#include <array>
#include <filesystem>
#include <string>
#include <vector>

namespace walkscope::cli {

enum class ReportFormat { csv, json };

/// Which inputs a subcommand needs; checked by RunConfig::validate.
enum class Command { rasterize, analyze, evaluate, aggregate, render, synth };

std::string_view command_name(Command c) noexcept;

struct SynthOptions {
    int count = 10;
    /// "straight", "arc" or "mixed".
    std::string kind = "mixed";
    int size = 512;
    /// 0 picks a width per tile from {3, 5, ..., 13}.
    int width = 0;
    std::uint64_t seed = 1;
};

struct RunConfig {
    std::filesystem::path gt_dir;
    std::filesystem::path pred_dir;
    /// Tiles read by analyze and render.
    std::filesystem::path input_dir;
    /// Multi-class vector file (class taken from `class_property`).
    std::filesystem::path vector_path;
    std::filesystem::path sidewalk_path;
    std::filesystem::path road_path;
    std::filesystem::path building_path;
    std::filesystem::path manifest_path;
    std::filesystem::path landuse_path;
    std::filesystem::path metrics_path;
    std::filesystem::path out_dir = ".";

    int h = 5;
    int prune_length = 3;
    bool trim_end_caps = true;
    int workers = 1;
    ReportFormat format = ReportFormat::csv;

    /// Used when a manifest entry carries no raster size.
    int tile_width = 512;
    int tile_height = 512;
    ClassPriority priority = default_class_priority();
    std::string class_property = "class";

    std::array<BinSpec, 3> bins = {default_bins(Feature::width), default_bins(Feature::angle),
                                   default_bins(Feature::curvature)};
    BinKey bin_key = BinKey::ground_truth;
    bool per_tile_scores = false;

    std::string landuse_property = "landuse";
    JoinRule join = JoinRule::majority_area;
    std::vector<std::string> category_order;

    bool dump_points = false;
    bool dump_skeletons = false;

    SynthOptions synth;

    /// Throws PreconditionError on h < 2, workers < 1, or a missing input path.
    void validate(Command command) const;
    MeasureOptions measure_options() const;
};

/// Reads a JSON config file. Keys mirror the long flag names with dashes
/// replaced by underscores; unknown keys are rejected. Relative paths are
/// taken relative to the config file.
RunConfig load_config(const std::filesystem::path& path);
/// Applies config keys onto `config`, resolving relative paths against `base_dir`.
void apply_config_json(RunConfig& config, const std::string& json_text,
                       const std::filesystem::path& base_dir = {});

/// "0,7,14,inf" -> {0, 7, 14, +inf}.
std::vector<double> parse_edges(const std::string& text);
ClassPriority parse_priority(const std::string& text);

struct TileError {
    std::string tile_id;
    std::string message;
};

struct CommandResult {
    std::size_t n_tiles = 0;
    std::vector<TileError> errors;

    int exit_status() const noexcept { return errors.empty() ? 0 : 1; }
};

/// A tile image and its sidecar found in a corpus directory.
struct TileFile {
    std::string tile_id;
    std::filesystem::path image;
    std::filesystem::path sidecar;
};

/// Every .png/.pgm in `dir` with a sibling .json sidecar, sorted by file name.
/// The tile id is the file stem; the sidecar's tile_id is checked on load.
std::vector<TileFile> list_tiles(const std::filesystem::path& dir);

/// Per-tile metrics table written by analyze and read by aggregate.
std::string metrics_csv(const std::vector<TileMetrics>& metrics);
std::string metrics_json(const std::vector<TileMetrics>& metrics);
std::vector<TileMetrics> read_metrics(const std::filesystem::path& path);

/// Sidewalk red, building blue, road gray, background white.
Rgb class_color(ClassId c) noexcept;
RgbImage render_overlay(const TileRaster& tile);

/// Every command writes `<out>/errors.json` and lists failing tiles on stderr.
CommandResult cmd_rasterize(const RunConfig& config);
CommandResult cmd_analyze(const RunConfig& config);
CommandResult cmd_evaluate(const RunConfig& config);
CommandResult cmd_aggregate(const RunConfig& config);
CommandResult cmd_render(const RunConfig& config);
CommandResult cmd_synth(const RunConfig& config);

CommandResult run_command(Command command, const RunConfig& config);

} // namespace walkscope::cli
