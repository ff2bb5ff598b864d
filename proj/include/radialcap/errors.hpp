#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace radialcap {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed expression text. `position` is a byte offset into the input.
class SyntaxError : public Error {
public:
    SyntaxError(std::size_t position, std::string expected, const std::string& found);

    std::size_t position() const noexcept { return position_; }
    const std::string& expected() const noexcept { return expected_; }

private:
    std::size_t position_;
    std::string expected_;
};

class UnknownIdentifier : public Error {
public:
    UnknownIdentifier(std::string name, std::size_t position);

    const std::string& name() const noexcept { return name_; }
    std::size_t position() const noexcept { return position_; }

private:
    std::string name_;
    std::size_t position_;
};

/// Evaluation outside the domain of a subexpression (log of a non-positive
/// value, division by zero, a pole of coth, ...), or a value the caller
/// requires to be in range (g vanishing, w(r) = 0).
class DomainError : public Error {
public:
    DomainError(double r, std::string subexpression, const std::string& detail);

    double r() const noexcept { return r_; }
    const std::string& subexpression() const noexcept { return subexpression_; }

private:
    double r_;
    std::string subexpression_;
};

class QuadratureError : public Error {
public:
    QuadratureError(const std::string& what, double worst_a, double worst_b);

    double worst_a() const noexcept { return worst_a_; }
    double worst_b() const noexcept { return worst_b_; }

private:
    double worst_a_;
    double worst_b_;
};

class OverflowError : public Error {
public:
    using Error::Error;
};

/// Bad constellation / configuration data.
class ConfigError : public Error {
public:
    using Error::Error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// An internal consistency check on computed quantities failed.
class NumericalError : public Error {
public:
    using Error::Error;
};

} // namespace radialcap
