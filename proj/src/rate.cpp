#include "uavsem/rate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace uavsem {

Covariance Covariance::zero(int n) {
    if (n < 0) throw InvalidInputError("covariance: negative dimension");
    return Covariance(Eigen::MatrixXcd::Zero(n, n));
}

Covariance Covariance::from_matrix(const Eigen::MatrixXcd& q) {
    if (q.rows() != q.cols()) throw InvalidCovarianceError("covariance: matrix not square");
    const double scale = std::max(1.0, q.cwiseAbs().maxCoeff());
    if ((q - q.adjoint()).cwiseAbs().maxCoeff() > 1e-9 * scale)
        throw InvalidCovarianceError("covariance: matrix not Hermitian");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(q, Eigen::EigenvaluesOnly);
    const double trace = q.trace().real();
    if (eig.eigenvalues().minCoeff() < -1e-9 * std::max(1.0, trace))
        throw InvalidCovarianceError("covariance: matrix not positive semidefinite");
    return Covariance(q);
}

Covariance Covariance::from_eigensystem(const Eigen::MatrixXcd& modes,
                                        const Eigen::VectorXd& powers) {
    if (modes.cols() != powers.size())
        throw ShapeError("covariance: modes/powers dimension mismatch");
    if (powers.size() > 0 && powers.minCoeff() < 0)
        throw InvalidCovarianceError("covariance: negative mode power");
    Eigen::MatrixXcd q = modes * powers.asDiagonal() * modes.adjoint();
    q = 0.5 * (q + q.adjoint().eval());  // kill rounding asymmetry
    return Covariance(std::move(q));
}

WaterfillResult waterfill(const ChannelMatrix& g, double trace_budget, double noise_power) {
    if (!(trace_budget >= 0)) throw InvalidInputError("waterfill: negative trace budget");
    if (!(noise_power > 0)) throw InvalidInputError("waterfill: noise power must be > 0");
    const int n = static_cast<int>(g.cols());

    if (trace_budget == 0.0 || g.size() == 0)
        return {Covariance::zero(n), 0.0};

    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(g, Eigen::ComputeThinV);
    const Eigen::VectorXd sv = svd.singularValues();

    // Mode gains, strongest first (SVD returns descending singular values).
    int n_pos = 0;
    const double sv_floor = sv.size() > 0 ? sv(0) * 1e-15 : 0.0;
    while (n_pos < sv.size() && sv(n_pos) > sv_floor && sv(n_pos) > 0) ++n_pos;
    if (n_pos == 0) {
        // No usable mode: spend the budget uniformly, capacity stays zero.
        Eigen::MatrixXcd q = Eigen::MatrixXcd::Identity(n, n) * (trace_budget / n);
        return {Covariance::from_matrix(q), 0.0};
    }

    Eigen::VectorXd inv_gain(n_pos);
    for (int i = 0; i < n_pos; ++i) inv_gain(i) = noise_power / (sv(i) * sv(i));

    // Largest active set whose water level clears its weakest mode.
    int k = n_pos;
    double level = 0.0;
    while (k > 0) {
        level = (trace_budget + inv_gain.head(k).sum()) / k;
        if (level - inv_gain(k - 1) >= 0) break;
        --k;
    }

    Eigen::VectorXd powers = Eigen::VectorXd::Zero(n_pos);
    double capacity = 0.0;
    for (int i = 0; i < k; ++i) {
        powers(i) = level - inv_gain(i);
        capacity += std::log2(level / inv_gain(i));
    }
    Covariance q = Covariance::from_eigensystem(svd.matrixV().leftCols(n_pos), powers);
    return {std::move(q), capacity};
}

double achievable_rate(const ChannelMatrix& g, const Covariance& q, double noise_power,
                       double ratio) {
    if (!(noise_power > 0)) throw InvalidInputError("achievable_rate: noise power must be > 0");
    if (!(ratio > 0)) throw DomainError("achievable_rate: ratio must be > 0");
    if (g.cols() != q.dim()) throw ShapeError("achievable_rate: channel/covariance mismatch");
    const int m = static_cast<int>(g.rows());
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Identity(m, m) +
                         (g * q.matrix() * g.adjoint()) / noise_power;
    Eigen::LLT<Eigen::MatrixXcd> llt(a);
    if (llt.info() != Eigen::Success)
        throw InvalidCovarianceError("achievable_rate: matrix I + gQg^H/sigma2 not PD");
    double log2det = 0.0;
    const auto& l = llt.matrixLLT();
    for (int i = 0; i < m; ++i) log2det += 2.0 * std::log2(l(i, i).real());
    return std::max(0.0, log2det / ratio);
}

namespace {

// Golden-section maximum of a concave function on [lo, hi], absolute tolerance
// on the argument. Returns (argmax, value).
template <class F>
std::pair<double, double> golden_section_max(F&& f, double lo, double hi, double tol) {
    constexpr double inv_phi = 0.6180339887498949;
    double a = lo, b = hi;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > tol) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        }
    }
    const double xm = 0.5 * (a + b);
    const double fm = f(xm);
    if (f1 >= f2 && f1 >= fm) return {x1, f1};
    if (f2 >= fm) return {x2, f2};
    return {xm, fm};
}

constexpr double kTraceSearchTol = 1e-6;  // watts

}  // namespace

CovarianceSolution dinkelbach_segment(const ChannelMatrix& g, double noise_power,
                                      const PiecewiseLoadModel& model, int segment,
                                      double p_max, double eps_fractional, int max_iters,
                                      DinkelbachDiagnostics* diag) {
    const auto bounds = model.trace_budget_bounds(segment, p_max);
    if (!bounds)
        throw SegmentInfeasibleError("dinkelbach_segment: no trace budget on segment " +
                                     std::to_string(segment));
    const auto [t_lo, t_hi] = *bounds;

    const auto ratio_at = [&](double t) { return model.ratio_from_power(p_max - t, segment); };
    const auto capacity_at = [&](double t) { return waterfill(g, t, noise_power).capacity; };

    const auto finish = [&](double t, double delta) {
        WaterfillResult wf = waterfill(g, t, noise_power);
        const double ratio = ratio_at(t);
        CovarianceSolution sol;
        sol.covariance = std::move(wf.covariance);
        sol.ratio = ratio;
        sol.segment = segment;
        sol.rate = wf.capacity / ratio;
        (void)delta;
        return sol;
    };

    if (t_hi - t_lo <= kTraceSearchTol) {
        // Degenerate budget: a single forced trace, no iteration needed.
        CovarianceSolution sol = finish(t_lo, 0.0);
        if (diag) {
            diag->deltas = {sol.rate};
            diag->objective_gap = 0.0;
        }
        return sol;
    }

    double t = 0.5 * (t_lo + t_hi);
    double delta = capacity_at(t) / ratio_at(t);
    if (diag) diag->deltas.clear();

    double gap = 0.0;
    for (int it = 0; it < max_iters; ++it) {
        auto [t_best, obj] = golden_section_max(
            [&](double tt) { return capacity_at(tt) - delta * ratio_at(tt); }, t_lo, t_hi,
            kTraceSearchTol);
        t = t_best;
        delta = capacity_at(t) / ratio_at(t);
        gap = obj;
        if (diag) diag->deltas.push_back(delta);
        if (obj < eps_fractional) break;
    }
    if (diag) diag->objective_gap = gap;
    return finish(t, delta);
}

CovarianceSolution optimize_covariance_ratio(const ChannelMatrix& g, double noise_power,
                                             const PiecewiseLoadModel& model, double p_max,
                                             double eps_fractional) {
    CovarianceSolution best;
    bool have = false;
    for (int s = 1; s <= model.n_segments(); ++s) {
        std::optional<std::pair<double, double>> bounds = model.trace_budget_bounds(s, p_max);
        if (!bounds) continue;
        CovarianceSolution sol = dinkelbach_segment(g, noise_power, model, s, p_max,
                                                    eps_fractional);
        if (!have || sol.rate > best.rate) {
            best = std::move(sol);
            have = true;
        }
    }
    if (!have)
        throw NoFeasibleSolutionError(
            "optimize_covariance_ratio: every segment infeasible at this power budget");
    return best;
}

PortSelection select_ports(const LinkGeometry& link, const Covariance& q, double ratio,
                           double noise_power, const PortSelection& start) {
    start.validate(link.layout);
    PortSelection sel = start;
    const int m0 = link.layout.n_active;
    const int n_ports = link.layout.n_ports;

    ChannelMatrix g = link.channel(sel);
    double rate = achievable_rate(g, q, noise_power, ratio);

    bool changed = true;
    while (changed) {
        changed = false;
        for (int m = 0; m < m0; ++m) {
            const int lo = (m == 0) ? 1 : sel.indices[m - 1] + 1;
            const int hi = (m == m0 - 1) ? n_ports : sel.indices[m + 1] - 1;
            for (int cand = lo; cand <= hi; ++cand) {
                if (cand == sel.indices[m]) continue;
                ChannelMatrix trial = g;
                link.rebuild_row(trial, m, cand);
                const double trial_rate = achievable_rate(trial, q, noise_power, ratio);
                if (trial_rate > rate) {
                    sel.indices[m] = cand;
                    g = std::move(trial);
                    rate = trial_rate;
                    changed = true;
                    break;  // greedy: take the first strict improvement
                }
            }
        }
    }
    return sel;
}

RateSolution optimize_user_rate(const LinkGeometry& link, const PiecewiseLoadModel& model,
                                const RateOptions& opts) {
    link.array.validate();
    link.layout.validate();
    link.user.validate();
    if (!(opts.p_max > 0)) throw InvalidInputError("optimize_user_rate: p_max must be > 0");
    if (!(opts.noise_power > 0))
        throw InvalidInputError("optimize_user_rate: noise power must be > 0");

    PortSelection sel = uniform_port_selection(link.layout);
    CovarianceSolution cov;
    double rate = 0.0;
    bool have_prev = false;

    for (int i = 0; i < opts.max_outer; ++i) {
        ChannelMatrix g = link.channel(sel);
        cov = optimize_covariance_ratio(g, opts.noise_power, model, opts.p_max,
                                        opts.eps_fractional);
        sel = select_ports(link, cov.covariance, cov.ratio, opts.noise_power, sel);
        const double new_rate =
            achievable_rate(link.channel(sel), cov.covariance, opts.noise_power, cov.ratio);
        const bool converged = have_prev && (new_rate - rate < opts.eps_outer);
        rate = new_rate;
        have_prev = true;
        if (converged) break;
    }

    RateSolution sol;
    sol.covariance = std::move(cov.covariance);
    sol.ratio = cov.ratio;
    sol.ports = std::move(sel);
    sol.segment = cov.segment;
    sol.rate = rate;
    return sol;
}

}  // namespace uavsem
