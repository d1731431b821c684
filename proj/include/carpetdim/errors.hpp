#pragma once

#include <stdexcept>
#include <string>

namespace carpetdim {

// Invalid carpet description (bases, columns, fibers).
struct MalformedCarpet : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation.
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

// An iterative solver could not certify its result.
struct ConvergenceFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Work or memory would exceed a configured cap.
struct ResourceLimit : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// An empirical certification scan found a violation.
struct CertificationFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct WordTooShort : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ScheduleTooShort : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct TargetTooShort : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct LengthMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace carpetdim
