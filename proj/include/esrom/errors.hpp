#pragma once

#include <stdexcept>
#include <string>

namespace esrom {

/// Base class of every error thrown by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Broken call contract (dimension mismatch, invalid argument, ...).
class ContractError : public Error {
public:
    using Error::Error;
};

/// A conserved-variable state violated the model's admissibility predicate
/// (negative water height, non-positive density or pressure, ...).
class AdmissibilityError : public Error {
public:
    AdmissibilityError(const std::string& what, long cell = -1)
        : Error(what), cell_(cell) {}
    long cell() const { return cell_; }

private:
    long cell_;
};

/// Entropy variables outside the invertible range of u(eta).
class InadmissibleEntropyError : public Error {
public:
    InadmissibleEntropyError(const std::string& what, long cell = -1)
        : Error(what), cell_(cell) {}
    long cell() const { return cell_; }

private:
    long cell_;
};

/// The projected entropy variables could not be mapped back to a conserved
/// state. This is the failure mode of an entropy-projected ROM whose tangent
/// space resolves the entropy variables poorly.
class InadmissibleProjectionError : public InadmissibleEntropyError {
public:
    using InadmissibleEntropyError::InadmissibleEntropyError;
};

/// Manifold tangent space lost full column rank.
class SingularTangentError : public Error {
public:
    SingularTangentError(const std::string& what, double condition_estimate)
        : Error(what), cond_(condition_estimate) {}
    double condition_estimate() const { return cond_; }

private:
    double cond_;
};

/// File could not be read/written or has a malformed format.
class IoError : public Error {
public:
    using Error::Error;
};

/// Invalid or inconsistent experiment configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace esrom
