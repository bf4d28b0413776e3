#pragma once

#include <stdexcept>
#include <string>

namespace peelab {

/// Invalid argument or out-of-range domain input (bad (n,p), bad model, ...).
class DomainError : public std::invalid_argument {
public:
    explicit DomainError(const std::string& what) : std::invalid_argument(what) {}
};

/// An exact identity that must hold by construction failed; indicates a
/// wrong formula transcription rather than a user error.
class IntegrityError : public std::logic_error {
public:
    explicit IntegrityError(const std::string& what) : std::logic_error(what) {}
};

/// A configured resource guard tripped (volume cap, truncation cap, ...).
class ResourceError : public std::runtime_error {
public:
    explicit ResourceError(const std::string& what) : std::runtime_error(what) {}
};

/// Requested tolerance unreachable with the requested truncation point.
class TailError : public std::runtime_error {
public:
    TailError(const std::string& identity, double residual)
        : std::runtime_error("tail too large for identity '" + identity +
                             "', residual bound " + std::to_string(residual)),
          identity_name(identity), residual_bound(residual) {}
    std::string identity_name;
    double residual_bound;
};

} // namespace peelab
