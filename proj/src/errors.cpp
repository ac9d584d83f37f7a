#include "cvmdi/errors.hpp"

namespace cvmdi {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Domain: return "domain error";
    case ErrorKind::ZeroProbability: return "zero-probability event";
    case ErrorKind::Unphysical: return "unphysical CM";
    case ErrorKind::NumericalDegeneracy: return "numerical degeneracy";
    case ErrorKind::UnsupportedOrder: return "unsupported order";
    case ErrorKind::TruncationInsufficient: return "truncation insufficient";
    case ErrorKind::TargetUnreachable: return "target unreachable";
    case ErrorKind::NoSecureRegion: return "no secure region";
  }
  return "error";
}

}  // namespace cvmdi
