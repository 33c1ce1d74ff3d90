#pragma once

#include <stdexcept>
#include <string>

namespace potus {

/// Root of every error thrown by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace potus
