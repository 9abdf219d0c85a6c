#pragma once

#include <stdexcept>
#include <string>

namespace bundlex {

/// Malformed or inconsistent input (instance files, preferences, matchings).
class input_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// An exhaustive routine was asked to enumerate more than its configured bound.
class too_large_error : public std::length_error {
public:
    using std::length_error::length_error;
};

/// A guaranteed algorithmic property failed to hold. Always a bug.
class invariant_error : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace bundlex
