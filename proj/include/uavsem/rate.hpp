#pragma once

#include <Eigen/Dense>
#include <vector>

#include "uavsem/geometry.hpp"
#include "uavsem/semantic.hpp"

namespace uavsem {

/// Hermitian positive-semidefinite transmit covariance. Construction from an
/// arbitrary matrix validates both properties; construction from an
/// eigensystem with nonnegative powers is trusted.
class Covariance {
public:
    Covariance() : q_(Eigen::MatrixXcd::Zero(0, 0)) {}

    static Covariance zero(int n);
    /// Validates Hermitian symmetry and min eigenvalue >= -1e-9 * max(1, trace).
    static Covariance from_matrix(const Eigen::MatrixXcd& q);
    /// modes: n x k orthonormal columns, powers: k nonnegative mode powers.
    static Covariance from_eigensystem(const Eigen::MatrixXcd& modes,
                                       const Eigen::VectorXd& powers);

    const Eigen::MatrixXcd& matrix() const { return q_; }
    double trace() const { return q_.trace().real(); }
    int dim() const { return static_cast<int>(q_.rows()); }

private:
    explicit Covariance(Eigen::MatrixXcd q) : q_(std::move(q)) {}
    Eigen::MatrixXcd q_;
};

struct WaterfillResult {
    Covariance covariance;
    double capacity = 0.0;  ///< bits, at compression ratio 1
};

/// Capacity-optimal covariance under a trace budget: power is poured over the
/// channel's singular-value modes until the budget is spent.
WaterfillResult waterfill(const ChannelMatrix& g, double trace_budget, double noise_power);

/// (1/ratio) * log2 det(I + g q g^H / noise_power); nonnegative.
double achievable_rate(const ChannelMatrix& g, const Covariance& q, double noise_power,
                       double ratio);

/// Trace of the fractional-programming parameter across iterations, for tests
/// and convergence reporting. deltas is nondecreasing; objective_gap is the
/// final transformed-objective value.
struct DinkelbachDiagnostics {
    std::vector<double> deltas;
    double objective_gap = 0.0;
    int iterations() const { return static_cast<int>(deltas.size()); }
};

/// Best covariance and compression ratio restricted to one load-model segment.
struct CovarianceSolution {
    Covariance covariance;
    double ratio = 1.0;
    int segment = 1;
    double rate = 0.0;  ///< bits per slot per unit ratio
};

/// Full per-user, per-position solution.
struct RateSolution {
    Covariance covariance;
    double ratio = 1.0;
    PortSelection ports;
    int segment = 1;
    double rate = 0.0;
};

struct RateOptions {
    double p_max = 1.0;           ///< total transmit + compute power budget, watts
    double noise_power = 1.0;     ///< watts
    double eps_fractional = 1e-6; ///< fractional-programming convergence threshold
    double eps_outer = 1e-4;      ///< outer alternation stop threshold
    int max_outer = 20;
    int max_fractional_iters = 100;
};

/// Maximize capacity/ratio for a fixed channel on one load-model segment via
/// the iterative fractional transform; each parametric subproblem reduces to a
/// concave 1-D search over the trace budget, solved with golden section and an
/// exact waterfill per probe.
CovarianceSolution dinkelbach_segment(const ChannelMatrix& g, double noise_power,
                                      const PiecewiseLoadModel& model, int segment,
                                      double p_max, double eps_fractional,
                                      int max_iters = 100,
                                      DinkelbachDiagnostics* diag = nullptr);

/// Try every load-model segment, return the best solution; ties break toward
/// the smaller segment index.
CovarianceSolution optimize_covariance_ratio(const ChannelMatrix& g, double noise_power,
                                             const PiecewiseLoadModel& model, double p_max,
                                             double eps_fractional);

/// Coordinate-ascent port selection for a fixed covariance and ratio: each
/// active port in turn sweeps its legal index range (kept strictly increasing
/// against its neighbors) and moves greedily at the first strict rate
/// improvement; full sweeps repeat until none changes anything.
PortSelection select_ports(const LinkGeometry& link, const Covariance& q, double ratio,
                           double noise_power, const PortSelection& start);

/// Alternating optimization of (covariance, ratio) and port selection from a
/// uniformly spread initial selection; the rate sequence is nondecreasing.
RateSolution optimize_user_rate(const LinkGeometry& link, const PiecewiseLoadModel& model,
                                const RateOptions& opts);

}  // namespace uavsem
