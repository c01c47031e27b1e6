#pragma once

#include <stdexcept>
#include <string>

namespace iec {

// Error hierarchy mirrored by CLI exit codes: data 2, config 3, io 4.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DataError : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

}  // namespace iec
