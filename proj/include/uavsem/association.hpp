#pragma once

#include <Eigen/Dense>

#include "uavsem/errors.hpp"

namespace uavsem {

/// Per-slot potential rates: rows = users, columns = slots; finite, >= 0.
using RateTable = Eigen::MatrixXd;

/// Slot-to-user assignment. Relaxed: entries in [0,1]; integral: entries in
/// {0,1}. Column sums never exceed 1 (at most one user served per slot).
struct Association {
    Eigen::MatrixXd assign;
    bool relaxed = false;
};

/// min over users of the assigned cumulative rate (the fairness objective).
double min_equivalent_rate(const RateTable& table, const Association& assoc);

struct RelaxedSolution {
    Association assoc;
    double gamma = 0.0;
};

/// Exact optimum of the relaxed max-min program
///   max gamma  s.t.  sum_c a(k,c) r(k,c) >= gamma,  sum_k a(k,c) <= 1,  a in [0,1],
/// solved by a dense simplex; feasibility and optimality are certified via the
/// dual solution (throws on certificate failure).
RelaxedSolution solve_relaxed(const RateTable& table);

/// Deterministic rounding of a relaxed assignment: each slot goes to its
/// largest fractional user (ties toward the smallest running cumulative
/// rate), then a greedy repair moves slots from the richest to the poorest
/// user while that strictly raises the objective.
Association round_association(const RateTable& table, const Association& relaxed);

struct AssociationSolution {
    Association assoc;          ///< integral
    double gamma = 0.0;         ///< objective of the integral assignment
    Association relaxed;
    double gamma_relaxed = 0.0; ///< upper bound from the relaxation
};

/// solve_relaxed followed by round_association.
AssociationSolution solve_association(const RateTable& table);

}  // namespace uavsem
