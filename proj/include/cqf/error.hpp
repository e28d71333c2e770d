// error.hpp: exception hierarchy shared by every cqf module

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cqf {

enum class ErrorKind {
    Domain,
    Evaluation,
    Capacity,
    Integration,
    Closure,
    NonStationary,
    Parse,
    Io,
    Internal,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind)
    {
    }

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Operation applied outside its domain (mismatched spaces, sums where a
/// monomial is required, ...).
class DomainError : public Error {
public:
    explicit DomainError(const std::string& m) : Error(ErrorKind::Domain, m) {}
};

class EvaluationError : public Error {
public:
    explicit EvaluationError(const std::string& m) : Error(ErrorKind::Evaluation, m) {}
};

class CapacityError : public Error {
public:
    explicit CapacityError(const std::string& m) : Error(ErrorKind::Capacity, m) {}
};

class ClosureError : public Error {
public:
    explicit ClosureError(const std::string& m) : Error(ErrorKind::Closure, m) {}
};

class InternalError : public Error {
public:
    explicit InternalError(const std::string& m) : Error(ErrorKind::Internal, m) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& m) : Error(ErrorKind::Io, m) {}
};

class IntegrationError : public Error {
public:
    IntegrationError(const std::string& m, double last_good_time)
        : Error(ErrorKind::Integration, m), last_good_time_(last_good_time)
    {
    }

    double last_good_time() const noexcept { return last_good_time_; }

private:
    double last_good_time_;
};

class NonStationaryError : public Error {
public:
    NonStationaryError(const std::string& m, double residual)
        : Error(ErrorKind::NonStationary, m), residual_(residual)
    {
    }

    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

/// Syntax or semantic error in a model file, located at line:column (1-based).
class ParseError : public Error {
public:
    ParseError(const std::string& m, std::size_t line, std::size_t column)
        : Error(ErrorKind::Parse,
                std::to_string(line) + ":" + std::to_string(column) + ": " + m),
          line_(line), column_(column)
    {
    }

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

} // namespace cqf
