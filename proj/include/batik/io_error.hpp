#pragma once

#include <stdexcept>

namespace batik {

/// A file could not be written or read.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace batik
