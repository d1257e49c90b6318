#pragma once

#include <stdexcept>
#include <string>

namespace docclass {

// Data, model, or numeric failure. The CLI maps this to exit code 1.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Unusable invocation: bad flag values or paths that cannot be opened.
// The CLI maps this to exit code 2.
struct UsageError : Error {
  using Error::Error;
};

}  // namespace docclass
