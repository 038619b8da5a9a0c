#pragma once

#include <stdexcept>
#include <string>

namespace adelic {

/// Digit cancellation exhausted the stored precision of some component, so
/// the valuation of the result is not determined.
class IndeterminateCancellation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A requested tolerance could not be certified within the iteration cap.
class ToleranceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace adelic
