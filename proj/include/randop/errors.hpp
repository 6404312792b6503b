#pragma once

#include <stdexcept>
#include <string>

namespace randop {

/// Rejected input: bad parameters, out-of-range windows, malformed configs.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A numerical routine could not deliver its contract (non-convergence,
/// non-finite statistics).
class NumericalFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw InvalidArgument(msg);
}

}  // namespace randop
