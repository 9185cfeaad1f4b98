#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace lexatlas {

// Universal POS tagset. Open classes come first.
enum class Pos : std::uint8_t {
  Noun,
  Propn,
  Verb,
  Adj,
  Adv,
  Num,
  Det,
  Adp,
  Pron,
  Aux,
  Cconj,
  Sconj,
  Part,
  Intj,
  Punct,
  Sym,
  X,
};

inline constexpr int kPosCount = 17;

std::string_view to_string(Pos pos);
std::optional<Pos> parse_pos(std::string_view tag);

// A vertex identity: normalized key plus coarse POS. Homographs with
// different POS are distinct units.
struct LexicalUnit {
  std::string key;
  Pos pos = Pos::X;

  auto operator<=>(const LexicalUnit&) const = default;
  bool operator==(const LexicalUnit&) const = default;
};

// "key#POS", the textual form used on disk, in the CLI and over HTTP.
std::string to_string(const LexicalUnit& unit);

// Parses "key#POS". The last '#' separates the tag so keys may contain '#'.
LexicalUnit parse_unit(std::string_view text);

// Lower-cases ASCII, Latin-1, Latin Extended-A, Greek and Cyrillic letters.
// Anything else passes through unchanged.
std::string fold_case(std::string_view utf8);

using SentenceId = std::string;

}  // namespace lexatlas

template <>
struct std::hash<lexatlas::LexicalUnit> {
  std::size_t operator()(const lexatlas::LexicalUnit& u) const noexcept {
    return std::hash<std::string>{}(u.key) * 31u + static_cast<std::size_t>(u.pos);
  }
};
