#include "radialcap/errors.hpp"

#include <sstream>

namespace radialcap {

namespace {

std::string syntax_message(std::size_t position, const std::string& expected,
                           const std::string& found) {
    std::ostringstream os;
    os << "syntax error at position " << position << ": expected " << expected << ", found '"
       << found << "'";
    return os.str();
}

std::string domain_message(double r, const std::string& sub, const std::string& detail) {
    std::ostringstream os;
    os.precision(17);
    os << "domain error at r=" << r << " in " << sub << ": " << detail;
    return os.str();
}

std::string quadrature_message(const std::string& what, double a, double b) {
    std::ostringstream os;
    os.precision(17);
    os << what << " (worst subinterval [" << a << ", " << b << "])";
    return os.str();
}

} // namespace

SyntaxError::SyntaxError(std::size_t position, std::string expected, const std::string& found)
    : Error(syntax_message(position, expected, found)), position_(position),
      expected_(std::move(expected)) {}

UnknownIdentifier::UnknownIdentifier(std::string name, std::size_t position)
    : Error("unknown identifier '" + name + "' at position " + std::to_string(position)),
      name_(std::move(name)), position_(position) {}

DomainError::DomainError(double r, std::string subexpression, const std::string& detail)
    : Error(domain_message(r, subexpression, detail)), r_(r),
      subexpression_(std::move(subexpression)) {}

QuadratureError::QuadratureError(const std::string& what, double worst_a, double worst_b)
    : Error(quadrature_message(what, worst_a, worst_b)), worst_a_(worst_a), worst_b_(worst_b) {}

} // namespace radialcap
