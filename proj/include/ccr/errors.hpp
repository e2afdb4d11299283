#pragma once

#include <stdexcept>
#include <string>

namespace ccr {

// Base class for all library errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct NotHermitian : Error {
    double asymmetry;
    explicit NotHermitian(double asym)
        : Error("matrix is not Hermitian (asymmetry " + std::to_string(asym) + ")"),
          asymmetry(asym) {}
};

struct DomainError : Error {
    using Error::Error;
};

struct SingularBlock : Error {
    double smallest_singular_value;
    explicit SingularBlock(double sv)
        : Error("block is singular or ill-conditioned (smallest singular value " +
                std::to_string(sv) + ")"),
          smallest_singular_value(sv) {}
};

struct SingularMatrix : Error {
    using Error::Error;
};

struct NotPositive : Error {
    double lambda_min;
    explicit NotPositive(double lmin)
        : Error("matrix is not positive semidefinite (lambda_min " + std::to_string(lmin) + ")"),
          lambda_min(lmin) {}
};

struct NotStrictlyPositive : Error {
    double lambda_min;
    explicit NotStrictlyPositive(double lmin)
        : Error("matrix is not strictly positive definite (lambda_min " +
                std::to_string(lmin) + ")"),
          lambda_min(lmin) {}
};

struct DimensionMismatch : Error {
    using Error::Error;
};

struct DegreeTooLarge : Error {
    using Error::Error;
};

struct BasisTooLarge : Error {
    using Error::Error;
};

struct PolicyMismatch : Error {
    using Error::Error;
};

struct NotAState : Error {
    using Error::Error;
};

struct EmptySelection : Error {
    using Error::Error;
};

struct PartitionMismatch : Error {
    using Error::Error;
};

struct DimsTooSmall : Error {
    using Error::Error;
};

struct ParseError : Error {
    using Error::Error;
};

struct DimensionError : Error {
    using Error::Error;
};

}  // namespace ccr
