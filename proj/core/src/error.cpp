#include "rsk/error.hpp"

namespace rsk {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Input: return "input";
    case ErrorKind::Config: return "config";
    case ErrorKind::Model: return "model";
    case ErrorKind::Numeric: return "numeric";
    case ErrorKind::Statistics: return "statistics";
    case ErrorKind::Range: return "range";
  }
  return "unknown";
}

}  // namespace rsk
