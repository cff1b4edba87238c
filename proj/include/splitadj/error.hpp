#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace splitadj {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed model text, tableau file or configuration.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// A value or object violates a documented precondition.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// A pivot fell below the singularity threshold during LU factorization.
class SingularMatrix : public Error {
public:
    SingularMatrix(std::size_t column, double pivot)
        : Error("singular matrix: pivot " + std::to_string(pivot) + " in column " +
                std::to_string(column)),
          column_(column) {}

    std::size_t column() const noexcept { return column_; }

private:
    std::size_t column_;
};

/// Newton iteration exhausted its iteration budget.
class NewtonFailure : public Error {
public:
    NewtonFailure(std::size_t stage, std::size_t iterations, double residual)
        : Error("Newton failed to converge in stage " + std::to_string(stage) + " after " +
                std::to_string(iterations) + " iterations (residual " +
                std::to_string(residual) + ")"),
          stage_(stage), iterations_(iterations), residual_(residual) {}

    std::size_t stage() const noexcept { return stage_; }
    std::size_t iterations() const noexcept { return iterations_; }
    double residual() const noexcept { return residual_; }

private:
    std::size_t stage_;
    std::size_t iterations_;
    double residual_;
};

/// A per-point solve failed inside a collection step; carries the point index.
class PointFailure : public Error {
public:
    PointFailure(std::size_t point, const std::string& cause)
        : Error("point " + std::to_string(point) + ": " + cause), point_(point) {}

    std::size_t point() const noexcept { return point_; }

private:
    std::size_t point_;
};

/// A Krylov solve did not reach its tolerance.
class LinearSolveFailure : public Error {
public:
    using Error::Error;
};

} // namespace splitadj
