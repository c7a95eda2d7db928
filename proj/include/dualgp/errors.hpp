#pragma once

#include <stdexcept>
#include <string>

namespace dualgp {

// A linear-algebra step failed and could not be stabilized. Carries the last
// jitter magnitude that was tried so callers can report it.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what, double attempted_jitter = 0.0)
      : std::runtime_error(what), attempted_jitter_(attempted_jitter) {}

  double attempted_jitter() const { return attempted_jitter_; }

 private:
  double attempted_jitter_;
};

}  // namespace dualgp
