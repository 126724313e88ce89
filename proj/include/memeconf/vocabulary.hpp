#pragma once

#include <array>
#include <span>
#include <string_view>

namespace memeconf {

inline constexpr std::size_t kVocabularySize = 200;

/// Fixed lowercase word list used by the synthetic text generator.
std::span<const std::string_view> vocabulary() noexcept;

} // namespace memeconf
