#include "fransonlab/units.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace fransonlab {

Wavelength Wavelength::from_m(double meters) {
  if (!(meters > 0.0) || !std::isfinite(meters)) {
    throw std::domain_error("wavelength must be positive and finite, got " +
                            std::to_string(meters));
  }
  return Wavelength(meters);
}

std::int64_t Duration::round_ps() const { return std::llround(seconds_ * 1e12); }

}  // namespace fransonlab
