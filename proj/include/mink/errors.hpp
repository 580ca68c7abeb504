#pragma once

#include <stdexcept>
#include <string>

namespace mink {

// Base type for everything this library throws on purpose.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what_arg) : std::runtime_error(what_arg) {}
};

// |z|^2 = 0: z is a zero divisor (or zero) and has no multiplicative inverse.
class ZeroDivisorError : public Error {
public:
    using Error::Error;
};

// Plane inversion x -> x/|x|^2 requested on the lightlike cone.
class LightlikePointError : public Error {
public:
    using Error::Error;
};

// Penrose chart operation on or outside the diamond boundary.
class BoundaryPointError : public Error {
public:
    using Error::Error;
};

// Infinity classification requested for a point whose null coordinates both stay finite.
class NotAtInfinityError : public Error {
public:
    using Error::Error;
};

class InvalidParamsError : public Error {
public:
    using Error::Error;
};

// Generic-mode Riccati right-hand side needs both null velocity components nonzero.
class LightlikeBaseCurveError : public Error {
public:
    using Error::Error;
};

class StepSizeUnderflowError : public Error {
public:
    using Error::Error;
};

class DomainExceededError : public Error {
public:
    using Error::Error;
};

class NoSignChangeError : public Error {
public:
    using Error::Error;
};

class CoincidentPointsError : public Error {
public:
    using Error::Error;
};

class ZeroVelocityError : public Error {
public:
    using Error::Error;
};

class InsufficientSamplesError : public Error {
public:
    using Error::Error;
};

class LightlikeObstructionError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(const std::string& what_arg, int line_no)
        : Error(what_arg + " (line " + std::to_string(line_no) + ")"), line(line_no) {}
    int line;
};

class ValidationError : public Error {
public:
    ValidationError(const std::string& what_arg, std::string field_name)
        : Error(what_arg), field(std::move(field_name)) {}
    std::string field;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace mink
