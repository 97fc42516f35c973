#pragma once

#include <stdexcept>

namespace trapsim {

/// Raised for any violated precondition on user-supplied parameters.
class InvalidParameter : public std::invalid_argument
{
  public:
    using std::invalid_argument::invalid_argument;
};

} // namespace trapsim
