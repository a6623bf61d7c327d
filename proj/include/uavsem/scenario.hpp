#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "uavsem/aco.hpp"
#include "uavsem/association.hpp"
#include "uavsem/rate.hpp"

namespace uavsem {

/// Rectangular ground area covered by the search grid.
struct Area {
    Vec2 origin = Vec2::Zero();  ///< meters, lower-left corner
    double width = 0.0;          ///< meters
    double height = 0.0;         ///< meters
};

/// Everything a run needs: physics, the load model, users, grid, budgets,
/// solver tolerances and colony parameters.
struct ScenarioConfig {
    ArrayGeometry array;
    PortLayout ports;
    PiecewiseLoadModel load_model = PiecewiseLoadModel::default_model();
    std::vector<UserSite> users;
    Area area;
    Vec2 start = Vec2::Zero();   ///< meters; mapped onto the containing grid cell
    int n_slots = 2;             ///< C
    double p_max = 1.0;          ///< watts
    double noise_power = 0.0;    ///< watts; must be given explicitly
    double h0 = 1.0;             ///< reference amplitude at 1 m
    double d_max = 1.0;          ///< meters per slot; also the grid cell size
    bool robust_mode = false;
    double eps_fractional = 1e-6;
    double eps_outer = 1e-4;
    int max_outer = 20;
    AcoParams aco;
    std::uint64_t seed = 0;

    Grid grid() const;           ///< derived from area, d_max and start
    RateOptions rate_options() const;
    void validate() const;       ///< throws ConfigError listing every violation
};

/// Parse a config document (JSON text). Field names accept both spelled-out
/// names and their usual symbols (N, M, m0, H, lambda, C, P_max, sigma2, ...).
ScenarioConfig parse_config(const std::string& text);

/// Read and parse a config file.
ScenarioConfig load_config(const std::filesystem::path& path);

/// Canonical JSON echo of a config; parse_config(dump) reproduces the config.
std::string dump_config(const ScenarioConfig& cfg);

/// K users placed uniformly at random in the area; deterministic per seed.
std::vector<UserSite> generate_users(int count, const Area& area, std::uint64_t seed);

/// Memoized per-(cell, user) rate solutions; computing a miss runs the full
/// per-user optimization at that cell. Safe for concurrent lookups.
class RateCache {
public:
    explicit RateCache(const ScenarioConfig& cfg);
    RateSolution solution(const Cell& cell, int user) const;
    double rate(const Cell& cell, int user) const;
    CellRateFn fn() const;
    std::size_t size() const;

private:
    const ScenarioConfig& cfg_;
    Grid grid_;
    mutable std::mutex mutex_;
    mutable std::unordered_map<std::int64_t, RateSolution> memo_;
};

/// Outcome of the full joint optimization: the colony-search trajectory with
/// its slot assignment and rate table, plus both baselines and the per-round
/// search history.
struct RunResult {
    ScenarioConfig config;
    Trajectory trajectory;
    Association association;
    RateTable rate_table;        ///< users x slots along `trajectory`
    double gamma = 0.0;
    std::vector<std::optional<RateSolution>> slot_solutions;  ///< per served slot
    BaselineResult rectangle;
    AcoResult normal_ac;
    std::vector<AcoHistoryEntry> history;
};

/// Full pipeline: colony trajectory search (rates solved per (cell, user) and
/// memoized, assignment solved per candidate trajectory), then both baseline
/// schemes on the same cache.
RunResult run_joint_optimization(const ScenarioConfig& cfg);

/// Rectangle and edge-pheromone baselines only (no colony search).
struct BaselineRun {
    ScenarioConfig config;
    BaselineResult rectangle;
    AcoResult normal_ac;
};
BaselineRun run_baselines(const ScenarioConfig& cfg);

/// Write trajectory/rate/association CSVs, summary.json and an overhead SVG
/// into `dir` (created if missing). File formats are documented in README.md.
void export_result(const RunResult& result, const std::filesystem::path& dir);

/// Writers shared with the baseline-only flow.
void export_baselines(const BaselineRun& result, const std::filesystem::path& dir);

/// Re-read an exported trajectory CSV; exact for files produced by export.
Trajectory import_trajectory_csv(const std::filesystem::path& file, const Grid& grid);

/// Rebuild plot.svg in `dir` from the CSV/JSON files already there.
void render_plot_from_dir(const std::filesystem::path& dir);

}  // namespace uavsem
