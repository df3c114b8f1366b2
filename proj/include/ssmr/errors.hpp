#ifndef SSMR_ERRORS_HPP
#define SSMR_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace ssmr {

/// Base for every recoverable error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Schema bindings are incomplete or contradictory.
class SchemaError : public Error {
public:
    using Error::Error;
};

/// Ingestion finished with no usable rows.
class EmptyTableError : public Error {
public:
    using Error::Error;
};

/// Invalid user-supplied configuration (CLI flags, recipe files, option values).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A synthetic fixture recipe describes an impossible scene.
class RecipeError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

/// Time headway with a stopped follower.
class UndefinedHeadway : public Error {
public:
    using Error::Error;
};

/// Angle or ratio requested at the origin of the plane.
class UndefinedRatio : public Error {
public:
    using Error::Error;
};

class InvalidInput : public Error {
public:
    using Error::Error;
};

/// Wilcoxon sample with no non-zero observations.
class DegenerateSample : public InvalidInput {
public:
    using InvalidInput::InvalidInput;
};

class InvalidGroups : public InvalidInput {
public:
    using InvalidInput::InvalidInput;
};

/// Spearman correlation with a constant input vector.
class UndefinedCorrelation : public InvalidInput {
public:
    using InvalidInput::InvalidInput;
};

class DomainError : public InvalidInput {
public:
    using InvalidInput::InvalidInput;
};

/// Every event was removed by the filters; `stage` names the filter that emptied the set.
class NoEventsError : public Error {
public:
    NoEventsError(const std::string& stage)
        : Error("no lane-change events left after filter '" + stage + "'"), stage_(stage) {}

    const std::string& stage() const { return stage_; }

private:
    std::string stage_;
};

/// Upstream bug detected by an internal invariant check.
class InvariantViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}

#endif
