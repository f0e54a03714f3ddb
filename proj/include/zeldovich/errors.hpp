#pragma once

#include <stdexcept>
#include <string>

namespace zeldovich {

/// Base of every error raised by the library. The CLI maps these to exit code 1.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the supported domain (range, finiteness, tabulated span).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Bessel ratio evaluated too close to a zero of the denominator.
class PoleError : public Error {
public:
    using Error::Error;
};

/// Overflow or a non-finite intermediate inside a numerical kernel.
class NumericError : public Error {
public:
    using Error::Error;
};

/// Total series impedance vanished; the circuit sits on the instability boundary.
class SingularityError : public Error {
public:
    using Error::Error;
};

/// Impedance extraction with V_o indistinguishable from V_i.
class DegenerateInputError : public Error {
public:
    using Error::Error;
};

/// Iterative solver or optimizer ran out of budget, or a bracket did not straddle a root.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

/// Integrator could not meet its local error target even after repeated step halving.
class IntegratorError : public Error {
public:
    using Error::Error;
};

/// Reading or writing a file failed.
class IoError : public Error {
public:
    using Error::Error;
};

/// Invalid configuration document or override. The CLI maps these to exit code 2.
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace zeldovich
