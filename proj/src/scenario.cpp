#include "uavsem/scenario.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "uavsem/rng.hpp"

namespace uavsem {

using nlohmann::json;

namespace {

const json* find_member(const json& obj, std::initializer_list<const char*> names) {
    if (!obj.is_object()) return nullptr;
    for (const char* n : names) {
        if (auto it = obj.find(n); it != obj.end()) return &*it;
    }
    return nullptr;
}

struct Reader {
    std::vector<std::string> issues;

    bool ok() const { return issues.empty(); }

    double num(const json& obj, const std::string& path,
               std::initializer_list<const char*> names, std::optional<double> fallback) {
        const json* j = find_member(obj, names);
        if (!j) {
            if (fallback) return *fallback;
            issues.push_back(path + ": missing required value");
            return 0.0;
        }
        if (!j->is_number()) {
            issues.push_back(path + ": expected a number");
            return fallback.value_or(0.0);
        }
        return j->get<double>();
    }

    int integer(const json& obj, const std::string& path,
                std::initializer_list<const char*> names, std::optional<int> fallback) {
        const double v = num(obj, path, names,
                             fallback ? std::optional<double>(*fallback) : std::nullopt);
        if (v != std::floor(v)) {
            issues.push_back(path + ": expected an integer");
            return fallback.value_or(0);
        }
        return static_cast<int>(v);
    }

    bool boolean(const json& obj, const std::string& path,
                 std::initializer_list<const char*> names, bool fallback) {
        const json* j = find_member(obj, names);
        if (!j) return fallback;
        if (!j->is_boolean()) {
            issues.push_back(path + ": expected a boolean");
            return fallback;
        }
        return j->get<bool>();
    }

    Vec2 point(const json& obj, const std::string& path,
               std::initializer_list<const char*> names, std::optional<Vec2> fallback) {
        const json* j = find_member(obj, names);
        if (!j) {
            if (fallback) return *fallback;
            issues.push_back(path + ": missing required value");
            return Vec2::Zero();
        }
        if (!j->is_array() || j->size() != 2 || !(*j)[0].is_number() || !(*j)[1].is_number()) {
            issues.push_back(path + ": expected [x, y]");
            return fallback.value_or(Vec2::Zero());
        }
        return Vec2((*j)[0].get<double>(), (*j)[1].get<double>());
    }
};

ScenarioConfig config_from_json(const json& doc) {
    if (!doc.is_object()) throw ConfigError("config: top level must be an object");
    Reader r;
    ScenarioConfig cfg;

    const json empty = json::object();
    const json* arr = find_member(doc, {"array", "antenna_array"});
    if (!arr) r.issues.push_back("array: missing required section");
    const json& ja = arr ? *arr : empty;
    cfg.array.n_antennas = r.integer(ja, "array.n_antennas", {"n_antennas", "N"}, std::nullopt);
    cfg.array.antenna_spacing =
        r.num(ja, "array.antenna_spacing", {"antenna_spacing", "d_BS", "d_bs"}, std::nullopt);
    cfg.array.uav_height = r.num(ja, "array.uav_height", {"uav_height", "H"}, std::nullopt);
    cfg.array.carrier_wavelength =
        r.num(ja, "array.carrier_wavelength", {"carrier_wavelength", "lambda"}, std::nullopt);

    const json* ports = find_member(doc, {"ports", "port_layout", "fas"});
    if (!ports) r.issues.push_back("ports: missing required section");
    const json& jp = ports ? *ports : empty;
    cfg.ports.n_ports = r.integer(jp, "ports.n_ports", {"n_ports", "M"}, std::nullopt);
    cfg.ports.port_spacing =
        r.num(jp, "ports.port_spacing", {"port_spacing", "d_U", "d_u"}, std::nullopt);
    cfg.ports.n_active = r.integer(jp, "ports.n_active", {"n_active", "m0"}, std::nullopt);

    if (const json* lm = find_member(doc, {"load_model", "compression_model"})) {
        const double p0 = r.num(*lm, "load_model.power_coeff", {"power_coeff", "p0"}, 1.0);
        std::vector<LoadSegment> segments;
        const json* js = find_member(*lm, {"segments"});
        if (!js || !js->is_array() || js->empty()) {
            r.issues.push_back("load_model.segments: expected a nonempty array");
        } else {
            int i = 0;
            for (const json& seg : *js) {
                const std::string path = "load_model.segments[" + std::to_string(i++) + "]";
                LoadSegment ls;
                ls.slope = r.num(seg, path + ".slope", {"slope", "A"}, std::nullopt);
                ls.intercept = r.num(seg, path + ".intercept", {"intercept", "B"}, std::nullopt);
                ls.lower_break =
                    r.num(seg, path + ".lower_break", {"lower_break", "D"}, std::nullopt);
                segments.push_back(ls);
            }
        }
        if (r.ok()) {
            try {
                cfg.load_model = PiecewiseLoadModel(segments, p0);
            } catch (const std::exception& e) {
                r.issues.push_back(std::string("load_model: ") + e.what());
            }
        }
    }

    const json* area = find_member(doc, {"area", "search_area"});
    if (!area) r.issues.push_back("area: missing required section");
    const json& jar = area ? *area : empty;
    cfg.area.origin = r.point(jar, "area.origin", {"origin"}, Vec2::Zero());
    cfg.area.width = r.num(jar, "area.width", {"width", "side"}, std::nullopt);
    cfg.area.height = r.num(jar, "area.height", {"height"}, cfg.area.width);

    cfg.start = r.point(doc, "start", {"start", "start_xy", "q0"}, std::nullopt);
    cfg.n_slots = r.integer(doc, "n_slots", {"n_slots", "C"}, std::nullopt);
    cfg.p_max = r.num(doc, "p_max", {"p_max", "P_max"}, std::nullopt);
    cfg.d_max = r.num(doc, "d_max", {"d_max"}, std::nullopt);
    cfg.robust_mode = r.boolean(doc, "robust_mode", {"robust_mode", "robust"}, false);
    cfg.seed = static_cast<std::uint64_t>(
        r.num(doc, "seed", {"seed"}, 0.0));

    // Noise power has no sensible default; demand it explicitly.
    if (!find_member(doc, {"noise_power", "sigma2"})) {
        r.issues.push_back("noise_power: required (alias sigma2); no default is assumed");
    } else {
        cfg.noise_power = r.num(doc, "noise_power", {"noise_power", "sigma2"}, std::nullopt);
    }

    if (const json* jh = find_member(doc, {"h0"})) {
        if (!jh->is_number())
            r.issues.push_back("h0: expected a number");
        else
            cfg.h0 = jh->get<double>();
    } else if (const json* jdb = find_member(doc, {"h0_db"})) {
        // power gain in dB at 1 m -> amplitude
        if (!jdb->is_number())
            r.issues.push_back("h0_db: expected a number");
        else
            cfg.h0 = std::pow(10.0, jdb->get<double>() / 20.0);
    } else {
        r.issues.push_back("h0: missing required value (or h0_db)");
    }

    if (const json* solver = find_member(doc, {"solver", "tolerances"})) {
        cfg.eps_fractional =
            r.num(*solver, "solver.eps_fractional", {"eps_fractional", "eps1"}, 1e-6);
        cfg.eps_outer = r.num(*solver, "solver.eps_outer", {"eps_outer", "eps2"}, 1e-4);
        cfg.max_outer = r.integer(*solver, "solver.max_outer", {"max_outer"}, 20);
    }

    if (const json* aco = find_member(doc, {"aco", "colony"})) {
        cfg.aco.n_ants = r.integer(*aco, "aco.n_ants", {"n_ants", "N_A"}, 50);
        cfg.aco.n_rounds = r.integer(*aco, "aco.n_rounds", {"n_rounds", "I_r"}, 100);
        cfg.aco.alpha = r.num(*aco, "aco.alpha", {"alpha"}, 1.0);
        cfg.aco.beta = r.num(*aco, "aco.beta", {"beta"}, 2.0);
        cfg.aco.evaporation = r.num(*aco, "aco.evaporation", {"evaporation", "v"}, 0.1);
        cfg.aco.tau0 = r.num(*aco, "aco.tau0", {"tau0"}, 1.0);
    }

    const double default_v = r.num(doc, "user_uncertainty_radius_sq",
                                   {"user_uncertainty_radius_sq", "V"}, 0.0);
    if (const json* ju = find_member(doc, {"users"})) {
        if (ju->is_array()) {
            int i = 0;
            for (const json& e : *ju) {
                const std::string path = "users[" + std::to_string(i++) + "]";
                UserSite u;
                u.uncertainty_radius_sq = default_v;
                if (e.is_array() && (e.size() == 2 || e.size() == 3)) {
                    bool numbers = true;
                    for (const json& x : e) numbers = numbers && x.is_number();
                    if (!numbers) {
                        r.issues.push_back(path + ": expected numbers");
                        continue;
                    }
                    u.position = Vec2(e[0].get<double>(), e[1].get<double>());
                    if (e.size() == 3) u.uncertainty_radius_sq = e[2].get<double>();
                } else if (e.is_object()) {
                    u.position = r.point(e, path + ".position", {"position", "w"}, std::nullopt);
                    u.uncertainty_radius_sq = r.num(
                        e, path + ".uncertainty_radius_sq", {"uncertainty_radius_sq", "V"},
                        default_v);
                } else {
                    r.issues.push_back(path + ": expected [x, y], [x, y, V] or an object");
                    continue;
                }
                cfg.users.push_back(u);
            }
        } else if (ju->is_object()) {
            const int count = r.integer(*ju, "users.count", {"count", "K"}, std::nullopt);
            const int useed = r.integer(*ju, "users.seed", {"seed"}, 0);
            if (r.ok() && count >= 1) {
                cfg.users = generate_users(count, cfg.area, static_cast<std::uint64_t>(useed));
                for (UserSite& u : cfg.users) u.uncertainty_radius_sq = default_v;
            } else if (count < 1) {
                r.issues.push_back("users.count: must be >= 1");
            }
        } else {
            r.issues.push_back("users: expected an array or {count, seed}");
        }
    } else {
        r.issues.push_back("users: missing required section");
    }

    if (!r.ok()) {
        std::string msg = "config parse failed:";
        for (const std::string& s : r.issues) msg += "\n  - " + s;
        throw ConfigError(msg);
    }
    cfg.validate();
    return cfg;
}

json config_to_json(const ScenarioConfig& cfg) {
    json doc;
    doc["array"] = {{"n_antennas", cfg.array.n_antennas},
                    {"antenna_spacing", cfg.array.antenna_spacing},
                    {"uav_height", cfg.array.uav_height},
                    {"carrier_wavelength", cfg.array.carrier_wavelength}};
    doc["ports"] = {{"n_ports", cfg.ports.n_ports},
                    {"port_spacing", cfg.ports.port_spacing},
                    {"n_active", cfg.ports.n_active}};
    json segments = json::array();
    for (int s = 1; s <= cfg.load_model.n_segments(); ++s) {
        const LoadSegment& seg = cfg.load_model.segment(s);
        segments.push_back({{"slope", seg.slope},
                            {"intercept", seg.intercept},
                            {"lower_break", seg.lower_break}});
    }
    doc["load_model"] = {{"power_coeff", cfg.load_model.power_coeff()},
                         {"segments", segments}};
    json users = json::array();
    for (const UserSite& u : cfg.users)
        users.push_back({u.position.x(), u.position.y(), u.uncertainty_radius_sq});
    doc["users"] = users;
    doc["area"] = {{"origin", {cfg.area.origin.x(), cfg.area.origin.y()}},
                   {"width", cfg.area.width},
                   {"height", cfg.area.height}};
    doc["start"] = {cfg.start.x(), cfg.start.y()};
    doc["n_slots"] = cfg.n_slots;
    doc["p_max"] = cfg.p_max;
    doc["noise_power"] = cfg.noise_power;
    doc["h0"] = cfg.h0;
    doc["d_max"] = cfg.d_max;
    doc["robust_mode"] = cfg.robust_mode;
    doc["solver"] = {{"eps_fractional", cfg.eps_fractional},
                     {"eps_outer", cfg.eps_outer},
                     {"max_outer", cfg.max_outer}};
    doc["aco"] = {{"n_ants", cfg.aco.n_ants},     {"n_rounds", cfg.aco.n_rounds},
                  {"alpha", cfg.aco.alpha},       {"beta", cfg.aco.beta},
                  {"evaporation", cfg.aco.evaporation}, {"tau0", cfg.aco.tau0}};
    doc["edge_pheromone"] = "directed";  // informational: baseline edge variant
    doc["seed"] = cfg.seed;
    return doc;
}

}  // namespace

Grid ScenarioConfig::grid() const {
    Grid g;
    g.cell_size = d_max;
    g.origin = area.origin;
    g.nx = std::max(1, static_cast<int>(std::floor(area.width / d_max + 1e-9)));
    g.ny = std::max(1, static_cast<int>(std::floor(area.height / d_max + 1e-9)));
    auto to_cell = [&](double v, double o, int n) {
        int i = static_cast<int>(std::floor((v - o) / d_max));
        if (i == n && v <= o + n * d_max) i = n - 1;  // exactly on the far edge
        return i;
    };
    g.start.x = to_cell(start.x(), area.origin.x(), g.nx);
    g.start.y = to_cell(start.y(), area.origin.y(), g.ny);
    return g;
}

RateOptions ScenarioConfig::rate_options() const {
    RateOptions o;
    o.p_max = p_max;
    o.noise_power = noise_power;
    o.eps_fractional = eps_fractional;
    o.eps_outer = eps_outer;
    o.max_outer = max_outer;
    return o;
}

void ScenarioConfig::validate() const {
    std::vector<std::string> v;
    if (array.n_antennas < 1) v.push_back("array.n_antennas: must be >= 1");
    if (!(array.antenna_spacing > 0)) v.push_back("array.antenna_spacing: must be > 0");
    if (!(array.uav_height > 0)) v.push_back("array.uav_height: must be > 0");
    if (!(array.carrier_wavelength > 0)) v.push_back("array.carrier_wavelength: must be > 0");
    if (ports.n_ports < 1) v.push_back("ports.n_ports: must be >= 1");
    if (!(ports.port_spacing > 0)) v.push_back("ports.port_spacing: must be > 0");
    if (ports.n_active < 1 || ports.n_active > ports.n_ports)
        v.push_back("ports.n_active: must satisfy 1 <= n_active <= n_ports");
    if (users.empty()) v.push_back("users: need at least one user");
    for (std::size_t i = 0; i < users.size(); ++i) {
        if (!(users[i].uncertainty_radius_sq >= 0))
            v.push_back("users[" + std::to_string(i) + "].uncertainty_radius_sq: must be >= 0");
        if (!users[i].position.allFinite())
            v.push_back("users[" + std::to_string(i) + "].position: must be finite");
    }
    if (!(area.width > 0)) v.push_back("area.width: must be > 0");
    if (!(area.height > 0)) v.push_back("area.height: must be > 0");
    if (n_slots < 2) v.push_back("n_slots: must be >= 2");
    if (!(p_max > 0)) v.push_back("p_max: must be > 0");
    if (!(noise_power > 0)) v.push_back("noise_power: must be > 0 (give it explicitly)");
    if (!(h0 > 0)) v.push_back("h0: must be > 0");
    if (!(d_max > 0)) v.push_back("d_max: must be > 0");
    if (d_max > 0 && area.width > 0 && area.width + 1e-9 < d_max)
        v.push_back("area.width: smaller than one grid cell (d_max)");
    if (d_max > 0 && area.height > 0 && area.height + 1e-9 < d_max)
        v.push_back("area.height: smaller than one grid cell (d_max)");
    if (!(eps_fractional > 0)) v.push_back("solver.eps_fractional: must be > 0");
    if (!(eps_outer > 0)) v.push_back("solver.eps_outer: must be > 0");
    if (max_outer < 1) v.push_back("solver.max_outer: must be >= 1");
    if (aco.n_ants < 1) v.push_back("aco.n_ants: must be >= 1");
    if (aco.n_rounds < 1) v.push_back("aco.n_rounds: must be >= 1");
    if (!(aco.alpha >= 0)) v.push_back("aco.alpha: must be >= 0");
    if (!(aco.beta >= 0)) v.push_back("aco.beta: must be >= 0");
    if (!(aco.evaporation > 0) || !(aco.evaporation < 1))
        v.push_back("aco.evaporation: must lie in (0, 1)");
    if (!(aco.tau0 > 0)) v.push_back("aco.tau0: must be > 0");
    if (v.empty()) {
        const Grid g = grid();
        if (!g.in_bounds(g.start)) v.push_back("start: outside the gridded area");
    }
    if (!v.empty()) {
        std::string msg = "config validation failed:";
        for (const std::string& s : v) msg += "\n  - " + s;
        throw ConfigError(msg);
    }
}

ScenarioConfig parse_config(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: not valid JSON: ") + e.what());
    }
    return config_from_json(doc);
}

ScenarioConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string dump_config(const ScenarioConfig& cfg) {
    return config_to_json(cfg).dump(2);
}

std::vector<UserSite> generate_users(int count, const Area& area, std::uint64_t seed) {
    if (count < 1) throw InvalidInputError("generate_users: count must be >= 1");
    if (!(area.width > 0) || !(area.height > 0))
        throw InvalidInputError("generate_users: area must have positive extent");
    std::mt19937_64 rng(mix64(seed));
    std::vector<UserSite> users(count);
    for (UserSite& u : users) {
        const double x = area.origin.x() + uniform01(rng) * area.width;
        const double y = area.origin.y() + uniform01(rng) * area.height;
        u.position = Vec2(x, y);
    }
    return users;
}

RateCache::RateCache(const ScenarioConfig& cfg) : cfg_(cfg), grid_(cfg.grid()) {}

RateSolution RateCache::solution(const Cell& cell, int user) const {
    if (!grid_.in_bounds(cell)) throw InvalidInputError("rate cache: cell out of bounds");
    if (user < 0 || user >= static_cast<int>(cfg_.users.size()))
        throw InvalidInputError("rate cache: user index out of range");
    const std::int64_t key =
        static_cast<std::int64_t>(grid_.index(cell)) * static_cast<int>(cfg_.users.size()) +
        user;
    {
        std::lock_guard lock(mutex_);
        if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    }
    LinkGeometry link{cfg_.array, cfg_.ports, cfg_.users[user], grid_.center(cell), cfg_.h0,
                      cfg_.robust_mode};
    RateSolution sol = optimize_user_rate(link, cfg_.load_model, cfg_.rate_options());
    std::lock_guard lock(mutex_);
    auto [it, inserted] = memo_.emplace(key, std::move(sol));
    return it->second;
}

double RateCache::rate(const Cell& cell, int user) const { return solution(cell, user).rate; }

CellRateFn RateCache::fn() const {
    return [this](const Cell& c, int user) { return rate(c, user); };
}

std::size_t RateCache::size() const {
    std::lock_guard lock(mutex_);
    return memo_.size();
}

RunResult run_joint_optimization(const ScenarioConfig& cfg) {
    cfg.validate();
    const Grid grid = cfg.grid();
    const RateCache cache(cfg);
    const CellRateFn fn = cache.fn();
    const int n_users = static_cast<int>(cfg.users.size());

    RunResult result;
    result.config = cfg;

    AcoResult proposed = run_aco(grid, cfg.aco, cfg.users, cfg.n_slots, fn, cfg.seed);
    result.trajectory = std::move(proposed.trajectory);
    result.history = std::move(proposed.history);

    result.rate_table = RateTable(n_users, cfg.n_slots);
    for (int s = 0; s < cfg.n_slots; ++s)
        for (int u = 0; u < n_users; ++u)
            result.rate_table(u, s) = fn(result.trajectory.cells[s], u);
    AssociationSolution assoc = solve_association(result.rate_table);
    result.association = std::move(assoc.assoc);
    result.gamma = assoc.gamma;

    result.slot_solutions.resize(cfg.n_slots);
    for (int s = 0; s < cfg.n_slots; ++s)
        for (int u = 0; u < n_users; ++u)
            if (result.association.assign(u, s) == 1.0)
                result.slot_solutions[s] = cache.solution(result.trajectory.cells[s], u);

    result.rectangle = rectangle_baseline(grid, cfg.n_slots, n_users, fn);
    result.normal_ac = normal_ac_baseline(grid, cfg.aco, cfg.users, cfg.n_slots, fn, cfg.seed);
    return result;
}

BaselineRun run_baselines(const ScenarioConfig& cfg) {
    cfg.validate();
    const Grid grid = cfg.grid();
    const RateCache cache(cfg);
    const CellRateFn fn = cache.fn();
    BaselineRun result;
    result.config = cfg;
    result.rectangle = rectangle_baseline(grid, cfg.n_slots, static_cast<int>(cfg.users.size()),
                                          fn);
    result.normal_ac =
        normal_ac_baseline(grid, cfg.aco, cfg.users, cfg.n_slots, fn, cfg.seed);
    return result;
}

}  // namespace uavsem
