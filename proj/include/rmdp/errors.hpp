#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rmdp {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// KL(q || p) is infinite because q puts mass where p does not.
class InfiniteDivergence : public Error {
public:
    explicit InfiniteDivergence(std::size_t atom)
        : Error("kl divergence is infinite: q has mass on atom " + std::to_string(atom) +
                " where p is zero"),
          atom_(atom) {}
    std::size_t atom() const noexcept { return atom_; }

private:
    std::size_t atom_;
};

/// A simplex grid request has no strictly interior point.
class EmptyGrid : public Error {
public:
    using Error::Error;
};

/// An ambiguity set over a single atom admits no ambiguity.
class DegenerateSet : public Error {
public:
    using Error::Error;
};

/// Fixed-point iteration stopped at max_iter above the threshold.
class NonConvergence : public Error {
public:
    NonConvergence(const std::string& what, double residual, std::size_t iterations)
        : Error(what + " (residual " + std::to_string(residual) + " after " +
                std::to_string(iterations) + " iterations)"),
          residual_(residual), iterations_(iterations) {}
    double residual() const noexcept { return residual_; }
    std::size_t iterations() const noexcept { return iterations_; }

private:
    double residual_;
    std::size_t iterations_;
};

/// Input data (CSV rows, config files) is malformed. `line` is 1-based, 0 if unknown.
class DataError : public Error {
public:
    DataError(const std::string& what, std::size_t line = 0)
        : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

} // namespace rmdp
