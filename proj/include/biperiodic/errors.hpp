#pragma once

#include <stdexcept>
#include <string>

namespace biperiodic {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Square-root argument on (or numerically next to) the branch cut iR_{<0}.
class CutProximity : public Error {
public:
    using Error::Error;
};

/// Some order satisfies |n + alpha| = k (grazing order, beta_n = 0).
class CutoffViolation : public Error {
public:
    using Error::Error;
};

class WrongSide : public Error {
public:
    using Error::Error;
};

class OutOfLayer : public Error {
public:
    using Error::Error;
};

/// Sampled medium too coarse for the requested Fourier truncation.
class AliasError : public Error {
public:
    using Error::Error;
};

/// The assembled operator has a (numerical) kernel.
class NearSingular : public Error {
public:
    NearSingular(const std::string& what, double relative_sigma)
        : Error(what), relative_sigma_(relative_sigma) {}
    double relative_sigma() const noexcept { return relative_sigma_; }

private:
    double relative_sigma_;
};

class ThresholdAmbiguity : public Error {
public:
    using Error::Error;
};

class ConstraintSingular : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class NonEvanescentMode : public Error {
public:
    using Error::Error;
};

class UnsupportedMedium : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace biperiodic
