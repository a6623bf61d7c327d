#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "uavsem/geometry.hpp"

namespace uavsem {

struct Cell {
    int x = 0;
    int y = 0;
    bool operator==(const Cell&) const = default;
};

/// Discretized square search area. The cell side equals the per-slot movement
/// bound, so hopping between 4-adjacent cell centers is always legal.
struct Grid {
    int nx = 1;
    int ny = 1;
    double cell_size = 1.0;      ///< meters, == d_max
    Vec2 origin = Vec2::Zero();  ///< meters, lower-left corner of cell (0,0)
    Cell start;

    bool in_bounds(const Cell& c) const {
        return c.x >= 0 && c.x < nx && c.y >= 0 && c.y < ny;
    }
    Vec2 center(const Cell& c) const {
        return origin + Vec2((c.x + 0.5) * cell_size, (c.y + 0.5) * cell_size);
    }
    int index(const Cell& c) const { return c.y * nx + c.x; }
    int n_cells() const { return nx * ny; }
    void validate() const;
};

/// L1 distance in cells; with 4-connected moves this is the exact number of
/// steps needed to travel between two cells.
inline int l1_distance(const Cell& a, const Cell& b) {
    return std::abs(a.x - b.x) + std::abs(a.y - b.y);
}

struct AcoParams {
    int n_ants = 50;
    int n_rounds = 100;
    double alpha = 1.0;        ///< pheromone exponent
    double beta = 2.0;         ///< heuristic exponent
    double evaporation = 0.1;  ///< in (0,1)
    double tau0 = 1.0;         ///< initial pheromone

    void validate() const;
};

/// Closed cell walk over exactly n_slots slots: first == last, consecutive
/// cells identical or 4-adjacent.
struct Trajectory {
    std::vector<Cell> cells;

    int n_slots() const { return static_cast<int>(cells.size()); }
    void validate(const Grid& grid) const;
    bool operator==(const Trajectory&) const = default;
};

/// Pheromone storage abstracted over what carries it (cells or directed
/// edges) so one exploration loop serves both colony variants.
class PheromoneField {
public:
    virtual ~PheromoneField() = default;
    virtual double weight(const Cell& from, const Cell& to) const = 0;
    virtual void evaporate(double rate) = 0;
    virtual void deposit(const Trajectory& best, double reward) = 0;
};

/// Pheromone lives on cells; entries stay positive (floored after
/// evaporation).
class CellPheromone : public PheromoneField {
public:
    CellPheromone(const Grid& grid, double tau0);
    double at(const Cell& c) const { return tau_[grid_.index(c)]; }
    double weight(const Cell& from, const Cell& to) const override { return at(to); }
    void evaporate(double rate) override;
    void deposit(const Trajectory& best, double reward) override;
    double max_value() const;
    double min_value() const;

private:
    Grid grid_;
    std::vector<double> tau_;
};

/// Pheromone lives on directed cell-to-cell moves (including "stay").
class EdgePheromone : public PheromoneField {
public:
    EdgePheromone(const Grid& grid, double tau0);
    double at(const Cell& from, const Cell& to) const;
    double weight(const Cell& from, const Cell& to) const override { return at(from, to); }
    void evaporate(double rate) override;
    void deposit(const Trajectory& best, double reward) override;

private:
    int edge_index(const Cell& from, const Cell& to) const;
    Grid grid_;
    std::vector<double> tau_;  // n_cells x 5 directions
};

/// Inverse-distance pull of the user population on a cell; terms are clamped
/// at 100/cell_size when a user sits (almost) on the cell center.
double heuristic(const Cell& c, std::span<const UserSite> users, const Grid& grid);

struct StepOption {
    Cell cell;
    double probability = 0.0;
};

/// Free-exploration step distribution: unvisited in-bounds 4-neighbors,
/// weighted by pheromone^alpha * heuristic^beta; if everything adjacent was
/// visited the restriction is dropped.
std::vector<StepOption> stage1_step(const Grid& grid, const Cell& current,
                                    const std::vector<char>& visited,
                                    const PheromoneField& pher, const AcoParams& params,
                                    std::span<const UserSite> users);

/// Return-stage step distribution: same weighting, restricted to neighbors
/// strictly closer to the start. With fewer than 2 slots left at the start
/// cell the only action is to stay.
std::vector<StepOption> stage2_step(const Grid& grid, const Cell& current, const Cell& start,
                                    const std::vector<char>& visited,
                                    const PheromoneField& pher, const AcoParams& params,
                                    std::span<const UserSite> users, int moves_left);

/// Sample one feasible closed trajectory of n_slots slots. The return stage
/// engages as soon as the slots remaining after the next move would equal the
/// distance back, so "remaining slots >= return distance" holds at every slot.
Trajectory explore(const Grid& grid, const PheromoneField& pher, const AcoParams& params,
                   std::span<const UserSite> users, int n_slots, std::mt19937_64& rng);

/// Evaporate everywhere, then let only the round-best trajectory deposit its
/// reward (once per slot occurrence).
void update_pheromone(PheromoneField& pher, const Trajectory& best, double reward,
                      const AcoParams& params);

/// Equivalent rate of (cell, user); supplied by the scenario layer, normally
/// backed by a memo table.
using CellRateFn = std::function<double(const Cell&, int user)>;

/// Fairness value of a trajectory: assemble the per-slot rate table along it
/// and solve the slot-assignment problem.
double trajectory_reward(const Trajectory& traj, int n_users, const CellRateFn& rate_fn);

struct AcoHistoryEntry {
    int round = 0;
    double round_best = 0.0;
    double best_so_far = 0.0;
};

struct AcoResult {
    Trajectory trajectory;
    double gamma = 0.0;
    std::vector<AcoHistoryEntry> history;
};

/// Cell-pheromone colony search; deterministic for a fixed seed (each ant owns
/// the stream derived from (seed, round, ant)).
AcoResult run_aco(const Grid& grid, const AcoParams& params, std::span<const UserSite> users,
                  int n_slots, const CellRateFn& rate_fn, std::uint64_t seed);

/// Same loop with pheromone on directed edges, as classic route-search
/// colonies do.
AcoResult normal_ac_baseline(const Grid& grid, const AcoParams& params,
                             std::span<const UserSite> users, int n_slots,
                             const CellRateFn& rate_fn, std::uint64_t seed);

struct BaselineResult {
    Trajectory trajectory;
    double gamma = 0.0;
};

/// Fixed rectangular loop through the start cell: the largest perimeter that
/// fits in 2(a+b) <= n_slots - 1 and in the grid, x-centered on the start
/// where possible, leftover slots spent staying at the start.
BaselineResult rectangle_baseline(const Grid& grid, int n_slots, int n_users,
                                  const CellRateFn& rate_fn);

}  // namespace uavsem
