#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace sld::text {

/// Number of Unicode scalar values in UTF-8 `s`. Stray continuation bytes are not counted.
std::size_t count_scalars(std::string_view s) noexcept;

/// Lowercases ASCII plus the Latin-1 and Latin Extended-A letters used by Spanish and French.
std::string fold_case(std::string_view s);

std::string_view trim(std::string_view s) noexcept;

}  // namespace sld::text
