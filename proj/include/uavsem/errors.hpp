#pragma once

#include <stdexcept>
#include <string>

namespace uavsem {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Invalid or inconsistent input values (bad counts, spacings, budgets, selections).
struct InvalidInputError : Error {
    using Error::Error;
};

/// Geometric degeneracy, e.g. a zero propagation distance.
struct GeometryError : Error {
    using Error::Error;
};

/// Value outside the domain of the compression-load model.
struct DomainError : Error {
    using Error::Error;
};

/// Compute power does not map into the requested load-model segment.
struct SegmentMismatchError : Error {
    using Error::Error;
};

/// The requested segment admits no transmit-power budget.
struct SegmentInfeasibleError : Error {
    using Error::Error;
};

/// Every load-model segment is infeasible at the given power budget.
struct NoFeasibleSolutionError : Error {
    using Error::Error;
};

/// Covariance matrix fails Hermitian / positive-semidefinite validation.
struct InvalidCovarianceError : Error {
    using Error::Error;
};

/// Matrix dimensions do not agree.
struct ShapeError : Error {
    using Error::Error;
};

/// An ant cannot reach the start cell in the remaining slots.
struct InfeasibleReturnError : Error {
    using Error::Error;
};

/// Configuration parsing or validation failure; message lists every violation.
struct ConfigError : Error {
    using Error::Error;
};

/// Filesystem failure during export or import; message carries the path.
struct IoError : Error {
    using Error::Error;
};

}  // namespace uavsem
