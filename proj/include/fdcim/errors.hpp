#pragma once

#include <stdexcept>
#include <string>

namespace fdcim {

// Requested object exceeds the size budget (e.g. transform order too large).
class CapacityError : public std::length_error {
 public:
  using std::length_error::length_error;
};

// Vector/matrix dimensions do not agree.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A numeric parameter is outside its domain (negative threshold, bad bit width...).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Crossbar programmed with an entry outside {-1, +1}.
class ProgrammingError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Hardware configuration is inconsistent (wrong DAC count, empty DAC...).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace fdcim
