#include "vark/learners/common.hpp"

#include <string>

#include "vark/error.hpp"

namespace vark {

void check_width(std::span<const double> row, std::size_t expected) {
  if (row.size() != expected) {
    throw Error(ErrorKind::WidthMismatch,
                "feature row has width " + std::to_string(row.size()) + ", model expects " + std::to_string(expected));
  }
}

}  // namespace vark
