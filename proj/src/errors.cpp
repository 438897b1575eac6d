#include "advparam/errors.hpp"

#include <utility>

namespace advparam {

FormatError::FormatError(const std::string& what, std::uint64_t offset)
    : Error(what + " (at byte offset " + std::to_string(offset) + ")"), offset_(offset) {}

ConditionError::ConditionError(std::string condition, const std::string& detail)
    : Error("condition " + condition + " not satisfied: " + detail),
      condition_(std::move(condition)) {}

}  // namespace advparam
