#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace nildyn {

/// Shape or arity disagreement between inputs.
class DimensionMismatch : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Values reference symbols that are not declared in one shared basis.
class MixedBasis : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A product of basis symbols is not expressible in the declared basis.
/// `missing()` lists the offending products, e.g. "√2·√3".
class UnsupportedBasis : public std::runtime_error {
public:
    explicit UnsupportedBasis(std::vector<std::string> missing)
        : std::runtime_error(make_message(missing)), missing_(std::move(missing)) {}

    const std::vector<std::string>& missing() const noexcept { return missing_; }

private:
    static std::string make_message(const std::vector<std::string>& missing) {
        std::string msg = "UNSUPPORTED-BASIS: product not expressible in declared basis:";
        for (const auto& m : missing) msg += " " + m;
        return msg;
    }

    std::vector<std::string> missing_;
};

/// Polynomial family fails the real-independence requirement.
class IndependenceViolation : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Two actions that were declared commuting do not commute on samples.
class CommutationViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An internal consistency check failed (a library bug, not bad input).
class InvariantBreach : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

} // namespace nildyn
