#include "cvmdi/source.hpp"

#include <string>

#include "cvmdi/errors.hpp"

namespace cvmdi {

void SqueezedSourceParams::validate() const {
  if (!std::isfinite(r) || !std::isfinite(d) || !std::isfinite(tau)) {
    throw Error(ErrorKind::Domain, "source parameters must be finite");
  }
  if (r < 0.0) throw Error(ErrorKind::Domain, "squeezing r must be >= 0, got " + std::to_string(r));
  if (d < 0.0) throw Error(ErrorKind::Domain, "displacement d must be >= 0, got " + std::to_string(d));
  if (tau < 0.0 || tau > 1.0) {
    throw Error(ErrorKind::Domain, "transmittance tau must lie in [0,1], got " + std::to_string(tau));
  }
  if (k < 0) throw Error(ErrorKind::Domain, "subtraction order k must be >= 0");
}

double SqueezedSourceParams::squeezing_for_variance(double variance) {
  if (!(variance >= 1.0)) {
    throw Error(ErrorKind::Domain, "source variance must be >= 1, got " + std::to_string(variance));
  }
  return 0.5 * std::acosh(variance);
}

}  // namespace cvmdi
