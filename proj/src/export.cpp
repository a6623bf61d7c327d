#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "uavsem/scenario.hpp"

namespace uavsem {

using nlohmann::json;

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    out << content;
    if (!out) throw IoError("write failed: " + path.string());
}

std::string trajectory_csv(const Trajectory& traj, const Grid& grid) {
    std::string s = "slot,x,y\n";
    for (int i = 0; i < traj.n_slots(); ++i) {
        const Vec2 p = grid.center(traj.cells[i]);
        s += std::to_string(i + 1) + "," + fmt(p.x()) + "," + fmt(p.y()) + "\n";
    }
    return s;
}

std::string matrix_csv(const Eigen::MatrixXd& m, bool as_int) {
    std::string s = "user";
    for (int c = 0; c < m.cols(); ++c) s += ",slot_" + std::to_string(c + 1);
    s += "\n";
    for (int u = 0; u < m.rows(); ++u) {
        s += std::to_string(u + 1);
        for (int c = 0; c < m.cols(); ++c)
            s += "," + (as_int ? std::to_string(static_cast<int>(m(u, c))) : fmt(m(u, c)));
        s += "\n";
    }
    return s;
}

struct PlotLine {
    std::string name;
    std::string color;
    double width = 2.0;
    std::vector<Vec2> points;  // meters
};

std::string render_svg(const Area& area, const std::vector<UserSite>& users,
                       const std::vector<PlotLine>& lines, const Vec2& start) {
    const double margin = 0.04 * std::max(area.width, area.height);
    const double x0 = area.origin.x() - margin;
    const double w = area.width + 2 * margin;
    const double h = area.height + 2 * margin;
    // flip y so north is up
    const auto ty = [&](double y) { return 2 * area.origin.y() + area.height - y; };
    const double y0 = ty(area.origin.y() + area.height) - margin;

    auto coord = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.6g", v);
        return std::string(buf);
    };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << coord(x0) << " "
        << coord(y0) << " " << coord(w) << " " << coord(h)
        << "\" width=\"800\" height=\"800\">\n";
    svg << "  <rect x=\"" << coord(area.origin.x()) << "\" y=\""
        << coord(ty(area.origin.y() + area.height)) << "\" width=\"" << coord(area.width)
        << "\" height=\"" << coord(area.height)
        << "\" fill=\"none\" stroke=\"#999999\" stroke-width=\""
        << coord(0.002 * area.width) << "\"/>\n";
    for (const PlotLine& line : lines) {
        svg << "  <polyline id=\"" << line.name << "\" fill=\"none\" stroke=\"" << line.color
            << "\" stroke-width=\"" << coord(line.width) << "\" points=\"";
        for (std::size_t i = 0; i < line.points.size(); ++i) {
            if (i) svg << " ";
            svg << coord(line.points[i].x()) << "," << coord(ty(line.points[i].y()));
        }
        svg << "\"/>\n";
    }
    const double r_user = 0.008 * std::max(area.width, area.height);
    for (const UserSite& u : users)
        svg << "  <circle cx=\"" << coord(u.position.x()) << "\" cy=\""
            << coord(ty(u.position.y())) << "\" r=\"" << coord(r_user)
            << "\" fill=\"#111111\"/>\n";
    svg << "  <rect x=\"" << coord(start.x() - r_user) << "\" y=\""
        << coord(ty(start.y()) - r_user) << "\" width=\"" << coord(2 * r_user)
        << "\" height=\"" << coord(2 * r_user) << "\" fill=\"#ff9900\"/>\n";
    svg << "</svg>\n";
    return svg.str();
}

std::vector<Vec2> centers(const Trajectory& traj, const Grid& grid) {
    std::vector<Vec2> pts;
    pts.reserve(traj.n_slots());
    for (const Cell& c : traj.cells) pts.push_back(grid.center(c));
    return pts;
}

json history_json(const std::vector<AcoHistoryEntry>& history) {
    json h = json::array();
    for (const AcoHistoryEntry& e : history)
        h.push_back({{"round", e.round},
                     {"round_best", e.round_best},
                     {"best_so_far", e.best_so_far}});
    return h;
}

}  // namespace

void export_result(const RunResult& result, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory: " + dir.string());
    const Grid grid = result.config.grid();

    write_file(dir / "trajectory_proposed.csv", trajectory_csv(result.trajectory, grid));
    write_file(dir / "trajectory_rectangle.csv",
               trajectory_csv(result.rectangle.trajectory, grid));
    write_file(dir / "trajectory_normal_ac.csv",
               trajectory_csv(result.normal_ac.trajectory, grid));
    write_file(dir / "rate_table.csv", matrix_csv(result.rate_table, false));
    write_file(dir / "association.csv", matrix_csv(result.association.assign, true));

    json summary;
    summary["config"] = json::parse(dump_config(result.config));
    summary["gamma_bits"] = {{"proposed", result.gamma},
                             {"rectangle", result.rectangle.gamma},
                             {"normal_ac", result.normal_ac.gamma}};
    summary["history"] = history_json(result.history);
    summary["rate_units"] = "bits";
    summary["seed"] = result.config.seed;
    write_file(dir / "summary.json", summary.dump(2) + "\n");

    const std::vector<PlotLine> lines{
        {"proposed", "#d62728", 0.006 * result.config.area.width,
         centers(result.trajectory, grid)},
        {"rectangle", "#1f77b4", 0.004 * result.config.area.width,
         centers(result.rectangle.trajectory, grid)},
        {"normal_ac", "#2ca02c", 0.0025 * result.config.area.width,
         centers(result.normal_ac.trajectory, grid)},
    };
    write_file(dir / "plot.svg",
               render_svg(result.config.area, result.config.users, lines, result.config.start));
}

void export_baselines(const BaselineRun& result, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory: " + dir.string());
    const Grid grid = result.config.grid();

    write_file(dir / "trajectory_rectangle.csv",
               trajectory_csv(result.rectangle.trajectory, grid));
    write_file(dir / "trajectory_normal_ac.csv",
               trajectory_csv(result.normal_ac.trajectory, grid));

    json summary;
    summary["config"] = json::parse(dump_config(result.config));
    summary["gamma_bits"] = {{"rectangle", result.rectangle.gamma},
                             {"normal_ac", result.normal_ac.gamma}};
    summary["history"] = history_json(result.normal_ac.history);
    summary["rate_units"] = "bits";
    summary["seed"] = result.config.seed;
    write_file(dir / "summary.json", summary.dump(2) + "\n");

    const std::vector<PlotLine> lines{
        {"rectangle", "#1f77b4", 0.004 * result.config.area.width,
         centers(result.rectangle.trajectory, grid)},
        {"normal_ac", "#2ca02c", 0.0025 * result.config.area.width,
         centers(result.normal_ac.trajectory, grid)},
    };
    write_file(dir / "plot.svg",
               render_svg(result.config.area, result.config.users, lines, result.config.start));
}

Trajectory import_trajectory_csv(const std::filesystem::path& file, const Grid& grid) {
    std::ifstream in(file);
    if (!in) throw IoError("cannot open trajectory file: " + file.string());
    std::string line;
    if (!std::getline(in, line) || line.rfind("slot,x,y", 0) != 0)
        throw IoError("bad trajectory header in " + file.string());
    Trajectory traj;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        int slot;
        double x, y;
        if (std::sscanf(line.c_str(), "%d,%lf,%lf", &slot, &x, &y) != 3)
            throw IoError("bad trajectory row in " + file.string() + ": " + line);
        Cell c;
        c.x = static_cast<int>(std::lround((x - grid.origin.x()) / grid.cell_size - 0.5));
        c.y = static_cast<int>(std::lround((y - grid.origin.y()) / grid.cell_size - 0.5));
        traj.cells.push_back(c);
    }
    traj.validate(grid);
    return traj;
}

void render_plot_from_dir(const std::filesystem::path& dir) {
    std::ifstream in(dir / "summary.json");
    if (!in) throw IoError("cannot open " + (dir / "summary.json").string());
    json summary;
    try {
        summary = json::parse(in);
    } catch (const std::exception& e) {
        throw IoError("bad summary.json: " + std::string(e.what()));
    }
    if (!summary.contains("config")) throw IoError("summary.json has no config echo");
    const ScenarioConfig cfg = parse_config(summary["config"].dump());
    const Grid grid = cfg.grid();

    const std::vector<std::tuple<std::string, std::string, double>> known{
        {"proposed", "#d62728", 0.006 * cfg.area.width},
        {"rectangle", "#1f77b4", 0.004 * cfg.area.width},
        {"normal_ac", "#2ca02c", 0.0025 * cfg.area.width},
    };
    std::vector<PlotLine> lines;
    for (const auto& [name, color, width] : known) {
        const std::filesystem::path file = dir / ("trajectory_" + name + ".csv");
        if (!std::filesystem::exists(file)) continue;
        lines.push_back({name, color, width, centers(import_trajectory_csv(file, grid), grid)});
    }
    write_file(dir / "plot.svg", render_svg(cfg.area, cfg.users, lines, cfg.start));
}

}  // namespace uavsem
