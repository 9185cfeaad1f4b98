#include "lexatlas/unit.hpp"

#include <array>

#include "lexatlas/error.hpp"

namespace lexatlas {

namespace {

constexpr std::array<std::string_view, kPosCount> kPosNames = {
    "NOUN", "PROPN", "VERB", "ADJ",  "ADV",   "NUM", "DET",  "ADP", "PRON",
    "AUX",  "CCONJ", "SCONJ", "PART", "INTJ", "PUNCT", "SYM", "X",
};

char32_t lower(char32_t c) {
  if (c >= U'A' && c <= U'Z') return c + 32;
  if (c < 0x80) return c;
  if (c >= 0xC0 && c <= 0xDE && c != 0xD7) return c + 32;
  if (c >= 0x100 && c <= 0x137 && (c & 1) == 0) return c + 1;
  if (c >= 0x139 && c <= 0x148 && (c & 1) == 1) return c + 1;
  if (c >= 0x14A && c <= 0x177 && (c & 1) == 0) return c + 1;
  if (c == 0x178) return 0xFF;
  if (c >= 0x179 && c <= 0x17E && (c & 1) == 1) return c + 1;
  if (c >= 0x391 && c <= 0x3AB && c != 0x3A2) return c + 32;
  if (c >= 0x400 && c <= 0x40F) return c + 80;
  if (c >= 0x410 && c <= 0x42F) return c + 32;
  return c;
}

void append_utf8(std::string& out, char32_t c) {
  if (c < 0x80) {
    out += static_cast<char>(c);
  } else if (c < 0x800) {
    out += static_cast<char>(0xC0 | (c >> 6));
    out += static_cast<char>(0x80 | (c & 0x3F));
  } else if (c < 0x10000) {
    out += static_cast<char>(0xE0 | (c >> 12));
    out += static_cast<char>(0x80 | ((c >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (c & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (c >> 18));
    out += static_cast<char>(0x80 | ((c >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((c >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (c & 0x3F));
  }
}

}  // namespace

std::string_view to_string(Pos pos) { return kPosNames[static_cast<std::size_t>(pos)]; }

std::optional<Pos> parse_pos(std::string_view tag) {
  for (std::size_t i = 0; i < kPosNames.size(); ++i) {
    if (kPosNames[i] == tag) return static_cast<Pos>(i);
  }
  return std::nullopt;
}

std::string to_string(const LexicalUnit& unit) {
  std::string out = unit.key;
  out += '#';
  out += to_string(unit.pos);
  return out;
}

LexicalUnit parse_unit(std::string_view text) {
  auto hash = text.rfind('#');
  if (hash == std::string_view::npos || hash == 0) {
    throw ParseError("expected lexical unit as key#POS, got '" + std::string(text) + "'");
  }
  auto pos = parse_pos(text.substr(hash + 1));
  if (!pos) throw ParseError("unknown POS tag in '" + std::string(text) + "'");
  return LexicalUnit{std::string(text.substr(0, hash)), *pos};
}

std::string fold_case(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    auto b = static_cast<unsigned char>(s[i]);
    std::size_t len = b < 0x80 ? 1 : (b >> 5) == 0x6 ? 2 : (b >> 4) == 0xE ? 3 : (b >> 3) == 0x1E ? 4 : 0;
    if (len == 0 || i + len > s.size()) {
      // Invalid byte: copy through.
      out += s[i++];
      continue;
    }
    char32_t c = len == 1 ? b : len == 2 ? (b & 0x1F) : len == 3 ? (b & 0x0F) : (b & 0x07);
    bool ok = true;
    for (std::size_t k = 1; k < len; ++k) {
      auto cb = static_cast<unsigned char>(s[i + k]);
      if ((cb & 0xC0) != 0x80) ok = false;
      c = (c << 6) | (cb & 0x3F);
    }
    if (!ok) {
      out += s[i++];
      continue;
    }
    append_utf8(out, lower(c));
    i += len;
  }
  return out;
}

}  // namespace lexatlas
