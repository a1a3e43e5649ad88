#pragma once

#include <stdexcept>
#include <string>

namespace truncexp {

// Base class for every error thrown by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A parameter value is outside the mathematical domain of the operation
// (non-positive window length or rate, epsilon outside (0,1), ...).
class DomainError : public Error {
public:
    using Error::Error;
};

// Errors caused by the data handed to an estimator, as opposed to the
// parameters of the model. These map to a distinct exit code in the CLI.
class DataError : public Error {
public:
    using Error::Error;
};

// Estimation was requested on an empty sample (zero observed durations).
class NoDataError : public DataError {
public:
    using DataError::DataError;
};

// The data collapse in a way that leaves an estimator undefined,
// e.g. every observed duration is zero.
class DegenerateDataError : public DataError {
public:
    using DataError::DataError;
};

// Supplied sufficient statistics are mutually impossible (the pooled squared
// residual comes out negative). Typically caused by rounded inputs.
class InconsistentStatsError : public DataError {
public:
    using DataError::DataError;
};

// A scenario/config text file could not be parsed.
class ConfigParseError : public DataError {
public:
    using DataError::DataError;
};

// Every replication of a simulation scenario produced zero observations.
class ScenarioFailedError : public DataError {
public:
    using DataError::DataError;
};

// A numerical routine failed to converge or produced a non-finite value.
class NumericalError : public Error {
public:
    using Error::Error;
};

} // namespace truncexp
