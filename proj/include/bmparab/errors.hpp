#pragma once

#include <stdexcept>
#include <string>

namespace bmparab {

// Invalid input: out-of-domain arguments, bad parameters, broken invariants
// on user-supplied configuration.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// A computation that could not reach its accuracy contract (quadrature
// budget exhausted, NaN from an integrand, resource caps).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace bmparab
