#pragma once

#include <stdexcept>
#include <string>

namespace liefloq {

/// Base class for all library errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Elements from different group contexts were mixed in one operation.
struct ContextError : Error {
    using Error::Error;
};

/// A matrix handed in as a group element violates the manifold invariants.
struct InvalidGroupElement : Error {
    using Error::Error;
};

/// Manifold drift of an integrated solution exceeded the configured tolerance.
struct DriftError : Error {
    using Error::Error;
};

/// A finite-difference stencil was requested at a boundary node of a
/// non-periodic grid.
struct BoundaryError : Error {
    using Error::Error;
};

/// A grid is too coarse for the requested stencil or quadrature.
struct ResolutionError : Error {
    using Error::Error;
};

/// Some monodromy element along the family left the image of exp.
struct UniformReducibilityViolated : Error {
    UniformReducibilityViolated(const std::string& what, double s_value)
        : Error(what), s(s_value) {}
    double s;
};

/// Branch continuation could not pick a unique log branch at a node.
struct BranchAmbiguity : Error {
    BranchAmbiguity(const std::string& what, double s_value)
        : Error(what), s(s_value) {}
    double s;
};

/// The periodic factor failed its periodicity check (wrong branch or
/// insufficient resolution).
struct FactorizationError : Error {
    using Error::Error;
};

/// A continuous log of the factor loop does not exist; the geodesic
/// homotopy cannot be built.
struct HomotopyUnavailable : Error {
    using Error::Error;
};

/// A periodic orbit failed to close within the allotted integration time.
struct OrbitDetectionError : Error {
    using Error::Error;
};

/// The independent area oracle cannot handle the given boundary loop.
struct OracleUnavailable : Error {
    using Error::Error;
};

/// Configuration file failed validation; `field` names the offending entry.
struct ConfigError : Error {
    ConfigError(const std::string& what, std::string field_path)
        : Error(what), field(std::move(field_path)) {}
    std::string field;
};

}  // namespace liefloq
