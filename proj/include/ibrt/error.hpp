#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace ibrt {

// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input (shapes, normalization, parse failures).
class InputError : public Error {
public:
    using Error::Error;
};

class ShapeError : public InputError {
public:
    using InputError::InputError;
};

// Numerical failures. The CLI maps these to a dedicated exit code.
class NumericalError : public Error {
public:
    using Error::Error;
};

class DivergenceInfinite : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class ZeroMassCluster : public NumericalError {
public:
    ZeroMassCluster(std::size_t cluster, const std::string& what)
        : NumericalError(what), cluster_(cluster) {}
    std::size_t cluster() const noexcept { return cluster_; }

private:
    std::size_t cluster_;
};

class SingularMatrix : public NumericalError {
public:
    SingularMatrix(std::size_t column, const std::string& what)
        : NumericalError(what), column_(column) {}
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t column_;
};

class EigenNonConvergence : public NumericalError {
public:
    EigenNonConvergence(std::size_t converged, const std::string& what)
        : NumericalError(what), converged_(converged) {}
    // Number of trailing eigenvalues that did converge before the cap.
    std::size_t converged() const noexcept { return converged_; }

private:
    std::size_t converged_;
};

class NearBifurcation : public NumericalError {
public:
    NearBifurcation(double singular_metric, const std::string& what)
        : NumericalError(what), singular_metric_(singular_metric) {}
    double singular_metric() const noexcept { return singular_metric_; }

private:
    double singular_metric_;
};

class EmptyRoot : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class StepTooLarge : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class CannotReduce : public NumericalError {
public:
    using NumericalError::NumericalError;
};

// A log coordinate is requested where a probability vanishes.
class SupportError : public InputError {
public:
    using InputError::InputError;
};

class RangeError : public InputError {
public:
    using InputError::InputError;
};

class BranchError : public InputError {
public:
    using InputError::InputError;
};

class TooLarge : public InputError {
public:
    using InputError::InputError;
};

}  // namespace ibrt
