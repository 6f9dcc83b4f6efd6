#pragma once

#include <stdexcept>
#include <string>

namespace mandel {

// Base class for all numeric/domain failures raised by the engine.
// The CLI maps these onto its exit-code contract (config errors are
// detected before computation and are not Errors).
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct ModulusOutOfDomain : Error {
    using Error::Error;
};
struct NonFinite : Error {
    using Error::Error;
};
struct LatticePoint : Error {
    using Error::Error;
};
struct DegenerateSurface : Error {
    using Error::Error;
};
struct QuadratureFailure : Error {
    using Error::Error;
};
struct NonSimpleZero : Error {
    using Error::Error;
};
struct CountMismatch : Error {
    using Error::Error;
};
struct ClearanceViolation : Error {
    using Error::Error;
};
struct JetUnstable : Error {
    using Error::Error;
};
struct DimensionMismatch : Error {
    using Error::Error;
};
struct CoincidentPoints : Error {
    using Error::Error;
};
struct ConstancyViolation : Error {
    using Error::Error;
};
struct IllConditioned : Error {
    using Error::Error;
};
struct VariationalMismatch : Error {
    using Error::Error;
};
struct MeshQualityFailure : Error {
    using Error::Error;
};
struct SolverNonConvergence : Error {
    using Error::Error;
};
struct MatchingFailure : Error {
    using Error::Error;
};

} // namespace mandel
