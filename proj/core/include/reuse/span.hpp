#pragma once

#include <compare>
#include <cstddef>

namespace reuse {

/// Half-open interval [start, end) of code point offsets.
struct Span {
  std::size_t start = 0;
  std::size_t end = 0;

  constexpr std::size_t length() const noexcept { return end - start; }
  constexpr bool empty() const noexcept { return start == end; }

  constexpr bool contains(const Span& other) const noexcept {
    return start <= other.start && other.end <= end;
  }
  constexpr bool overlaps(const Span& other) const noexcept {
    return start < other.end && other.start < end;
  }
  constexpr bool valid_for(std::size_t text_length) const noexcept {
    return start <= end && end <= text_length;
  }

  friend constexpr auto operator<=>(const Span&, const Span&) = default;
};

}  // namespace reuse
