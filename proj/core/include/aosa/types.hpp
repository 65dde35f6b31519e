#pragma once

#include <cstdint>

namespace aosa {

using SampleId = std::uint64_t;
using ClassLabel = std::int32_t;

/// Label carried by queried samples the oracle rejected as unknown-class.
inline constexpr ClassLabel kInvalidLabel = -1;

}  // namespace aosa
