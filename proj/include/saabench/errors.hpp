#pragma once

#include <stdexcept>
#include <string>

namespace saabench {

/// Base of every error the library throws.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An operation that needs at least one observation received none.
class EmptySampleError : public Error {
public:
    EmptySampleError() : Error("sample is empty") {}
    explicit EmptySampleError(const std::string& what) : Error(what) {}
};

/// Scott's rule produced a zero bandwidth (sample has no spread).
class DegenerateBandwidthError : public Error {
public:
    using Error::Error;
};

/// A fit (MLE, EM) did not converge. The harness records and excludes it.
class EstimationFailedError : public Error {
public:
    using Error::Error;
};

/// Operation requested on a distribution family that does not support it.
class UnsupportedDistributionError : public Error {
public:
    using Error::Error;
};

/// Covariance still singular after ridge regularization.
class SingularMatrixError : public Error {
public:
    using Error::Error;
};

/// Invalid parameters or configuration values.
class InvalidArgumentError : public Error {
public:
    using Error::Error;
};

}  // namespace saabench
