#include "uavsem/association.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace uavsem {

namespace {

void check_table(const RateTable& table) {
    if (table.rows() < 1 || table.cols() < 1)
        throw ShapeError("rate table: needs at least one user and one slot");
    if (!table.allFinite() || table.minCoeff() < 0)
        throw InvalidInputError("rate table: entries must be finite and >= 0");
}

// Dense tableau simplex for  max c^T x  s.t.  A x <= b,  x >= 0  with b >= 0,
// so the slack basis is immediately feasible. Dantzig pricing with smallest-
// index tie-breaks; switches to Bland's rule after a degenerate stall to stay
// cycle-free. Returns the primal solution, the duals (slack reduced costs)
// and the objective.
struct SimplexResult {
    Eigen::VectorXd x;
    Eigen::VectorXd duals;
    double objective = 0.0;
};

SimplexResult simplex_max(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                          const Eigen::VectorXd& c) {
    const int m = static_cast<int>(a.rows());
    const int n = static_cast<int>(a.cols());
    constexpr double tol = 1e-9;

    Eigen::MatrixXd t(m + 1, n + m + 1);
    t.setZero();
    t.block(0, 0, m, n) = a;
    t.block(0, n, m, m) = Eigen::MatrixXd::Identity(m, m);
    t.block(0, n + m, m, 1) = b;
    t.block(m, 0, 1, n) = -c.transpose();

    std::vector<int> basis(m);
    for (int i = 0; i < m; ++i) basis[i] = n + i;

    bool bland = false;
    int degenerate_streak = 0;
    const int max_pivots = 50 * (m + n) + 1000;

    for (int pivot = 0; pivot < max_pivots; ++pivot) {
        // Entering column.
        int enter = -1;
        if (bland) {
            for (int j = 0; j < n + m; ++j)
                if (t(m, j) < -tol) {
                    enter = j;
                    break;
                }
        } else {
            double best = -tol;
            for (int j = 0; j < n + m; ++j)
                if (t(m, j) < best) {
                    best = t(m, j);
                    enter = j;
                }
        }
        if (enter < 0) {
            SimplexResult res;
            res.x = Eigen::VectorXd::Zero(n);
            for (int i = 0; i < m; ++i)
                if (basis[i] < n) res.x(basis[i]) = t(i, n + m);
            res.duals = t.block(m, n, 1, m).transpose();
            res.objective = t(m, n + m);
            return res;
        }

        // Leaving row: minimum ratio, ties toward the smallest basis index.
        int leave = -1;
        double best_ratio = std::numeric_limits<double>::infinity();
        for (int i = 0; i < m; ++i) {
            if (t(i, enter) > tol) {
                const double ratio = t(i, n + m) / t(i, enter);
                if (ratio < best_ratio - tol ||
                    (ratio < best_ratio + tol && (leave < 0 || basis[i] < basis[leave]))) {
                    best_ratio = std::min(best_ratio, ratio);
                    leave = i;
                }
            }
        }
        if (leave < 0) throw Error("simplex: unbounded program");

        if (best_ratio <= tol) {
            if (++degenerate_streak > 2 * m) bland = true;
        } else {
            degenerate_streak = 0;
        }

        // Pivot.
        t.row(leave) /= t(leave, enter);
        for (int i = 0; i <= m; ++i) {
            if (i == leave) continue;
            const double f = t(i, enter);
            if (f != 0.0) t.row(i) -= f * t.row(leave);
        }
        basis[leave] = enter;
    }
    throw Error("simplex: pivot limit exceeded");
}

}  // namespace

double min_equivalent_rate(const RateTable& table, const Association& assoc) {
    check_table(table);
    if (assoc.assign.rows() != table.rows() || assoc.assign.cols() != table.cols())
        throw ShapeError("association: assignment/table shape mismatch");
    const Eigen::VectorXd per_user = (assoc.assign.array() * table.array()).rowwise().sum();
    return per_user.minCoeff();
}

RelaxedSolution solve_relaxed(const RateTable& table) {
    check_table(table);
    const int k = static_cast<int>(table.rows());
    const int c = static_cast<int>(table.cols());

    // Normalize so pivoting is scale-free; gamma rescales on the way out.
    const double scale = std::max(table.maxCoeff(), 1e-300);
    const Eigen::MatrixXd r = table / scale;

    // Variables: a(0,0)..a(k-1,c-1) row-major, then gamma.
    const int n = k * c + 1;
    const int m = k + c;
    Eigen::MatrixXd lp_a = Eigen::MatrixXd::Zero(m, n);
    Eigen::VectorXd lp_b = Eigen::VectorXd::Zero(m);
    Eigen::VectorXd lp_c = Eigen::VectorXd::Zero(n);
    lp_c(n - 1) = 1.0;
    for (int u = 0; u < k; ++u) {
        for (int s = 0; s < c; ++s) lp_a(u, u * c + s) = -r(u, s);
        lp_a(u, n - 1) = 1.0;  // gamma - sum a r <= 0
    }
    for (int s = 0; s < c; ++s) {
        for (int u = 0; u < k; ++u) lp_a(k + s, u * c + s) = 1.0;
        lp_b(k + s) = 1.0;  // at most one user per slot
    }

    const SimplexResult res = simplex_max(lp_a, lp_b, lp_c);

    // Certificate: primal feasibility, dual feasibility, zero duality gap.
    constexpr double cert_tol = 1e-7;
    if ((lp_a * res.x - lp_b).maxCoeff() > cert_tol || res.x.minCoeff() < -cert_tol)
        throw Error("solve_relaxed: primal certificate failed");
    if (res.duals.minCoeff() < -cert_tol)
        throw Error("solve_relaxed: dual sign certificate failed");
    if (((lp_a.transpose() * res.duals - lp_c).minCoeff()) < -cert_tol)
        throw Error("solve_relaxed: dual feasibility certificate failed");
    const double dual_obj = lp_b.dot(res.duals);
    if (std::abs(dual_obj - res.objective) > cert_tol * std::max(1.0, std::abs(res.objective)))
        throw Error("solve_relaxed: duality gap certificate failed");

    RelaxedSolution out;
    out.assoc.relaxed = true;
    out.assoc.assign = Eigen::MatrixXd(k, c);
    for (int u = 0; u < k; ++u)
        for (int s = 0; s < c; ++s)
            out.assoc.assign(u, s) = std::clamp(res.x(u * c + s), 0.0, 1.0);
    out.gamma = res.objective * scale;
    return out;
}

Association round_association(const RateTable& table, const Association& relaxed) {
    check_table(table);
    if (relaxed.assign.rows() != table.rows() || relaxed.assign.cols() != table.cols())
        throw ShapeError("round_association: shape mismatch");
    const int k = static_cast<int>(table.rows());
    const int c = static_cast<int>(table.cols());
    constexpr double support_tol = 1e-9;

    Association out;
    out.relaxed = false;
    out.assign = Eigen::MatrixXd::Zero(k, c);
    Eigen::VectorXd cum = Eigen::VectorXd::Zero(k);

    for (int s = 0; s < c; ++s) {
        int pick = -1;
        double best = 0.0;
        for (int u = 0; u < k; ++u) {
            const double a = relaxed.assign(u, s);
            if (a <= support_tol) continue;
            if (pick < 0 || a > best + support_tol) {
                best = a;
                pick = u;
            } else if (a > best - support_tol && cum(u) < cum(pick)) {
                // Fractional tie: favor the user currently worst off.
                best = std::max(best, a);
                pick = u;
            }
        }
        if (pick >= 0) {
            out.assign(pick, s) = 1.0;
            cum(pick) += table(pick, s);
        }
    }

    // Repair: move single slots from the richest to the poorest user while
    // that strictly raises the minimum.
    while (true) {
        int u_max = 0, u_min = 0;
        for (int u = 1; u < k; ++u) {
            if (cum(u) > cum(u_max)) u_max = u;
            if (cum(u) < cum(u_min)) u_min = u;
        }
        if (u_max == u_min) break;
        const double gamma = cum.minCoeff();

        int best_slot = -1;
        double best_gamma = gamma;
        for (int s = 0; s < c; ++s) {
            if (out.assign(u_max, s) != 1.0) continue;
            const double new_max = cum(u_max) - table(u_max, s);
            const double new_min = cum(u_min) + table(u_min, s);
            double cand = std::min(new_max, new_min);
            for (int u = 0; u < k; ++u)
                if (u != u_max && u != u_min) cand = std::min(cand, cum(u));
            if (cand > best_gamma) {
                best_gamma = cand;
                best_slot = s;
            }
        }
        if (best_slot < 0) break;
        out.assign(u_max, best_slot) = 0.0;
        out.assign(u_min, best_slot) = 1.0;
        cum(u_max) -= table(u_max, best_slot);
        cum(u_min) += table(u_min, best_slot);
    }
    return out;
}

AssociationSolution solve_association(const RateTable& table) {
    AssociationSolution out;
    RelaxedSolution rel = solve_relaxed(table);
    out.assoc = round_association(table, rel.assoc);
    out.gamma = min_equivalent_rate(table, out.assoc);
    out.relaxed = std::move(rel.assoc);
    out.gamma_relaxed = rel.gamma;
    if (out.gamma > out.gamma_relaxed + 1e-6 * std::max(1.0, out.gamma_relaxed))
        throw Error("solve_association: rounding exceeded the relaxation bound");
    return out;
}

}  // namespace uavsem
