#include "uavsem/aco.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "uavsem/association.hpp"
#include "uavsem/rng.hpp"

namespace uavsem {

namespace {

constexpr double kPheromoneFloor = 1e-12;

const std::array<std::pair<int, int>, 4> kMoves{{{1, 0}, {-1, 0}, {0, 1}, {0, -1}}};

}  // namespace

void Grid::validate() const {
    if (nx < 1 || ny < 1) throw InvalidInputError("grid: nx and ny must be >= 1");
    if (!(cell_size > 0)) throw InvalidInputError("grid: cell_size must be > 0");
    if (!in_bounds(start)) throw InvalidInputError("grid: start cell out of bounds");
}

void AcoParams::validate() const {
    if (n_ants < 1) throw InvalidInputError("aco: n_ants must be >= 1");
    if (n_rounds < 1) throw InvalidInputError("aco: n_rounds must be >= 1");
    if (!(alpha >= 0) || !(beta >= 0))
        throw InvalidInputError("aco: alpha and beta must be >= 0");
    if (!(evaporation > 0) || !(evaporation < 1))
        throw InvalidInputError("aco: evaporation must lie in (0, 1)");
    if (!(tau0 > 0)) throw InvalidInputError("aco: tau0 must be > 0");
}

void Trajectory::validate(const Grid& grid) const {
    if (cells.size() < 2) throw InvalidInputError("trajectory: needs at least 2 slots");
    if (!(cells.front() == cells.back()))
        throw InvalidInputError("trajectory: must end where it starts");
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (!grid.in_bounds(cells[i])) throw InvalidInputError("trajectory: cell out of bounds");
        if (i > 0 && l1_distance(cells[i - 1], cells[i]) > 1)
            throw InvalidInputError("trajectory: consecutive cells must be identical or adjacent");
    }
}

CellPheromone::CellPheromone(const Grid& grid, double tau0) : grid_(grid) {
    grid.validate();
    if (!(tau0 > 0)) throw InvalidInputError("pheromone: tau0 must be > 0");
    tau_.assign(grid.n_cells(), tau0);
}

void CellPheromone::evaporate(double rate) {
    for (double& t : tau_) t = std::max((1.0 - rate) * t, kPheromoneFloor);
}

void CellPheromone::deposit(const Trajectory& best, double reward) {
    for (const Cell& c : best.cells) tau_[grid_.index(c)] += reward;
}

double CellPheromone::max_value() const { return *std::max_element(tau_.begin(), tau_.end()); }
double CellPheromone::min_value() const { return *std::min_element(tau_.begin(), tau_.end()); }

EdgePheromone::EdgePheromone(const Grid& grid, double tau0) : grid_(grid) {
    grid.validate();
    if (!(tau0 > 0)) throw InvalidInputError("pheromone: tau0 must be > 0");
    tau_.assign(static_cast<std::size_t>(grid.n_cells()) * 5, tau0);
}

int EdgePheromone::edge_index(const Cell& from, const Cell& to) const {
    const int dx = to.x - from.x;
    const int dy = to.y - from.y;
    int dir = -1;
    if (dx == 0 && dy == 0) dir = 0;
    else if (dx == 1 && dy == 0) dir = 1;
    else if (dx == -1 && dy == 0) dir = 2;
    else if (dx == 0 && dy == 1) dir = 3;
    else if (dx == 0 && dy == -1) dir = 4;
    if (dir < 0) throw InvalidInputError("edge pheromone: cells not adjacent");
    return grid_.index(from) * 5 + dir;
}

double EdgePheromone::at(const Cell& from, const Cell& to) const {
    return tau_[edge_index(from, to)];
}

void EdgePheromone::evaporate(double rate) {
    for (double& t : tau_) t = std::max((1.0 - rate) * t, kPheromoneFloor);
}

void EdgePheromone::deposit(const Trajectory& best, double reward) {
    for (std::size_t i = 0; i + 1 < best.cells.size(); ++i)
        tau_[edge_index(best.cells[i], best.cells[i + 1])] += reward;
}

double heuristic(const Cell& c, std::span<const UserSite> users, const Grid& grid) {
    if (!grid.in_bounds(c)) throw InvalidInputError("heuristic: cell out of bounds");
    const Vec2 pos = grid.center(c);
    const double min_dist = grid.cell_size / 100.0;
    double h = 0.0;
    for (const UserSite& u : users) h += 1.0 / std::max((pos - u.position).norm(), min_dist);
    return h;
}

namespace {

std::vector<StepOption> normalize(const Grid& grid, std::vector<Cell> candidates,
                                  const Cell& current, const PheromoneField& pher,
                                  const AcoParams& params, std::span<const UserSite> users) {
    std::vector<StepOption> out;
    out.reserve(candidates.size());
    double total = 0.0;
    for (const Cell& c : candidates) {
        const double w = std::pow(pher.weight(current, c), params.alpha) *
                         std::pow(heuristic(c, users, grid), params.beta);
        out.push_back({c, w});
        total += w;
    }
    if (total <= 0.0) {  // all weights underflowed; fall back to uniform
        for (StepOption& o : out) o.probability = 1.0 / out.size();
        return out;
    }
    for (StepOption& o : out) o.probability /= total;
    return out;
}

std::vector<Cell> neighbors(const Grid& grid, const Cell& c) {
    std::vector<Cell> out;
    out.reserve(4);
    for (const auto& [dx, dy] : kMoves) {
        const Cell n{c.x + dx, c.y + dy};
        if (grid.in_bounds(n)) out.push_back(n);
    }
    return out;
}

}  // namespace

std::vector<StepOption> stage1_step(const Grid& grid, const Cell& current,
                                    const std::vector<char>& visited,
                                    const PheromoneField& pher, const AcoParams& params,
                                    std::span<const UserSite> users) {
    std::vector<Cell> all = neighbors(grid, current);
    std::vector<Cell> fresh;
    for (const Cell& c : all)
        if (!visited[grid.index(c)]) fresh.push_back(c);
    if (fresh.empty()) fresh = all;  // boxed in by its own path: revisits allowed
    if (fresh.empty()) fresh.push_back(current);  // 1x1 grid: stay is the only move
    return normalize(grid, std::move(fresh), current, pher, params, users);
}

std::vector<StepOption> stage2_step(const Grid& grid, const Cell& current, const Cell& start,
                                    const std::vector<char>& visited,
                                    const PheromoneField& pher, const AcoParams& params,
                                    std::span<const UserSite> users, int moves_left) {
    if (current == start && moves_left < 2) return {{start, 1.0}};

    const int dist = l1_distance(current, start);
    std::vector<Cell> closer;
    for (const Cell& c : neighbors(grid, current))
        if (l1_distance(c, start) < dist) closer.push_back(c);
    if (closer.empty())
        throw InfeasibleReturnError("stage2_step: no cell closer to the start");

    std::vector<Cell> fresh;
    for (const Cell& c : closer)
        if (!visited[grid.index(c)]) fresh.push_back(c);
    if (fresh.empty()) fresh = closer;  // returning may cross explored cells
    return normalize(grid, std::move(fresh), current, pher, params, users);
}

namespace {

Cell sample_step(const std::vector<StepOption>& options, std::mt19937_64& rng) {
    const double u = uniform01(rng);
    double acc = 0.0;
    for (const StepOption& o : options) {
        acc += o.probability;
        if (u < acc) return o.cell;
    }
    return options.back().cell;
}

}  // namespace

Trajectory explore(const Grid& grid, const PheromoneField& pher, const AcoParams& params,
                   std::span<const UserSite> users, int n_slots, std::mt19937_64& rng) {
    grid.validate();
    params.validate();
    if (n_slots < 2) throw InvalidInputError("explore: need at least 2 slots");

    Trajectory traj;
    traj.cells.reserve(n_slots);
    traj.cells.push_back(grid.start);
    std::vector<char> visited(grid.n_cells(), 0);
    visited[grid.index(grid.start)] = 1;

    for (int idx = 1; idx < n_slots; ++idx) {
        const Cell current = traj.cells.back();
        const int after_next = n_slots - 1 - idx;  // moves left once this slot is placed
        std::vector<StepOption> options;
        if (after_next > l1_distance(current, grid.start))
            options = stage1_step(grid, current, visited, pher, params, users);
        else
            options = stage2_step(grid, current, grid.start, visited, pher, params, users,
                                  n_slots - idx);
        const Cell next = sample_step(options, rng);
        traj.cells.push_back(next);
        visited[grid.index(next)] = 1;
    }
    traj.validate(grid);
    return traj;
}

void update_pheromone(PheromoneField& pher, const Trajectory& best, double reward,
                      const AcoParams& params) {
    if (!(reward >= 0)) throw InvalidInputError("update_pheromone: reward must be >= 0");
    pher.evaporate(params.evaporation);
    pher.deposit(best, reward);
}

double trajectory_reward(const Trajectory& traj, int n_users, const CellRateFn& rate_fn) {
    if (n_users < 1) throw InvalidInputError("trajectory_reward: n_users must be >= 1");
    const int c = traj.n_slots();
    RateTable table(n_users, c);
    for (int s = 0; s < c; ++s)
        for (int u = 0; u < n_users; ++u) table(u, s) = rate_fn(traj.cells[s], u);
    return solve_association(table).gamma;
}

namespace {

AcoResult run_colony(PheromoneField& pher, const Grid& grid, const AcoParams& params,
                     std::span<const UserSite> users, int n_slots, const CellRateFn& rate_fn,
                     std::uint64_t seed) {
    grid.validate();
    params.validate();
    AcoResult result;
    result.gamma = -std::numeric_limits<double>::infinity();

    for (int round = 0; round < params.n_rounds; ++round) {
        Trajectory round_traj;
        double round_best = -std::numeric_limits<double>::infinity();
        for (int ant = 0; ant < params.n_ants; ++ant) {
            std::mt19937_64 rng(stream_seed(seed, static_cast<std::uint64_t>(round),
                                            static_cast<std::uint64_t>(ant)));
            Trajectory traj = explore(grid, pher, params, users, n_slots, rng);
            const double reward = trajectory_reward(traj, static_cast<int>(users.size()),
                                                    rate_fn);
            if (reward > round_best) {
                round_best = reward;
                round_traj = std::move(traj);
            }
        }
        if (round_best > result.gamma) {
            result.gamma = round_best;
            result.trajectory = round_traj;
        }
        update_pheromone(pher, round_traj, round_best, params);
        result.history.push_back({round, round_best, result.gamma});
    }
    return result;
}

}  // namespace

AcoResult run_aco(const Grid& grid, const AcoParams& params, std::span<const UserSite> users,
                  int n_slots, const CellRateFn& rate_fn, std::uint64_t seed) {
    CellPheromone pher(grid, params.tau0);
    return run_colony(pher, grid, params, users, n_slots, rate_fn, seed);
}

AcoResult normal_ac_baseline(const Grid& grid, const AcoParams& params,
                             std::span<const UserSite> users, int n_slots,
                             const CellRateFn& rate_fn, std::uint64_t seed) {
    EdgePheromone pher(grid, params.tau0);
    return run_colony(pher, grid, params, users, n_slots, rate_fn, seed);
}

BaselineResult rectangle_baseline(const Grid& grid, int n_slots, int n_users,
                                  const CellRateFn& rate_fn) {
    grid.validate();
    if (n_slots < 4) throw InvalidInputError("rectangle_baseline: need at least 4 slots");

    const Cell s = grid.start;
    // Side budget: perimeter 2(a+b) plus the duplicated start must fit n_slots.
    const int side_budget = (n_slots - 1) / 2;
    const int b_cap = std::max(s.y, grid.ny - 1 - s.y);
    const int total = std::min(side_budget, (grid.nx - 1) + b_cap);
    int b = std::min(b_cap, total / 2);
    int a = std::min(grid.nx - 1, total - b);
    b = std::min(b_cap, total - a);

    // Width a splits around the start where the grid allows; height b extends
    // toward the roomier vertical side.
    int left = std::min(a / 2, s.x);
    left = std::max(left, a - (grid.nx - 1 - s.x));
    const int right = a - left;
    const int dir_y = (grid.ny - 1 - s.y >= s.y) ? 1 : -1;

    Trajectory traj;
    traj.cells.push_back(s);
    auto walk = [&traj](int dx, int dy, int steps) {
        for (int i = 0; i < steps; ++i) {
            Cell c = traj.cells.back();
            c.x += dx;
            c.y += dy;
            traj.cells.push_back(c);
        }
    };
    walk(1, 0, right);
    walk(0, dir_y, b);
    walk(-1, 0, a);
    walk(0, -dir_y, b);
    walk(1, 0, left);
    while (traj.n_slots() < n_slots) traj.cells.push_back(s);  // idle at the start
    traj.validate(grid);

    BaselineResult result;
    result.gamma = trajectory_reward(traj, n_users, rate_fn);
    result.trajectory = std::move(traj);
    return result;
}

}  // namespace uavsem
