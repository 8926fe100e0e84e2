#include "analogcast/error.hpp"

namespace analogcast {

int exit_code(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::kConfig:
      return 2;
    case ErrorKind::kData:
      return 3;
    case ErrorKind::kNumeric:
      return 4;
  }
  return 1;
}

}  // namespace analogcast
