#pragma once

#include <stdexcept>
#include <string>

namespace afrelay {

/// Thrown by the closed-form routines when the configuration violates the
/// balance condition p_s1/delta1 == p_s2/delta2 they are derived under.
class UnbalancedParamsError : public std::domain_error {
public:
    explicit UnbalancedParamsError(const std::string& what) : std::domain_error(what) {}
};

/// Thrown when an iterative kernel (quadrature, bisection) exhausts its
/// budget without meeting its tolerance. The message carries diagnostics.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// Thrown when a requested outage target lies at or below the attainable
/// floor for the given parameters; the message quotes the floor value.
class InfeasibleTargetError : public std::domain_error {
public:
    explicit InfeasibleTargetError(const std::string& what) : std::domain_error(what) {}
};

} // namespace afrelay
