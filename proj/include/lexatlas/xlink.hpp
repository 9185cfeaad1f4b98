#pragma once

// Cross-lingual sense alignment through a bilingual dictionary.

#include <cstddef>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lexatlas/atlas.hpp"

namespace lexatlas {

// Translation multimap keyed by case-folded source keys. POS is not used.
class BilingualDictionary {
 public:
  BilingualDictionary() = default;
  BilingualDictionary(std::string source_lang, std::string target_lang)
      : source_lang_(std::move(source_lang)), target_lang_(std::move(target_lang)) {}

  void add(std::string_view source, std::string_view target);
  const std::set<std::string>& translations(std::string_view source) const;

  // Swapped direction; entries that only exist one way stay one-way.
  BilingualDictionary inverted() const;

  const std::string& source_lang() const { return source_lang_; }
  const std::string& target_lang() const { return target_lang_; }
  std::size_t entry_count() const { return entries_.size(); }
  std::size_t translation_count() const;
  const std::map<std::string, std::set<std::string>>& entries() const { return entries_; }

 private:
  std::string source_lang_;
  std::string target_lang_;
  std::map<std::string, std::set<std::string>> entries_;
};

// Tab-separated "source<TAB>target" lines; '#' starts a comment line and
// blank lines are ignored. Throws ParseError with the line number otherwise.
BilingualDictionary load_dictionary(std::istream& in, std::string source_lang = {}, std::string target_lang = {});

struct MemberTranslations {
  LexicalUnit member;
  std::set<std::string> candidates;  // empty: untranslatable

  bool operator==(const MemberTranslations&) const = default;
};

std::vector<MemberTranslations> translate_clique(const Clique& clique, const BilingualDictionary& dict);

struct LinkParams {
  double theta = 0.5;
  std::size_t overlap_min = 3;

  // Throws InvalidArgument unless 0 < theta <= 1.
  void validate() const;
};

struct SenseLink {
  std::string source_clique;
  std::string target_clique;
  LexicalUnit target_word;  // target-language entry holding target_clique
  std::vector<std::pair<LexicalUnit, LexicalUnit>> matched;  // (source member, target member)
  std::size_t matched_sources = 0;  // distinct source members matched
  double score = 0.0;               // matched_sources / |source members|
  bool accepted = false;

  bool operator==(const SenseLink&) const = default;
};

// Target-language entries for every translation of the source word.
std::vector<const AtlasEntry*> candidate_entries(const LexicalUnit& source_word, const Atlas& target_atlas,
                                                 const BilingualDictionary& dict);

// Scores every (source clique, candidate target clique) pair sharing at least
// one translated context. A link is accepted when, within that single
// target clique, score >= theta and matched_sources >= overlap_min. Sorted
// by score descending, then accepted first, then ids.
std::vector<SenseLink> match_cliques(const AtlasEntry& source, const Atlas& target_atlas,
                                     const BilingualDictionary& dict, const LinkParams& params);

// Looks the source word up in the atlas first; NotFound when absent.
std::vector<SenseLink> match_word(const Atlas& source_atlas, const LexicalUnit& word, const Atlas& target_atlas,
                                  const BilingualDictionary& dict, const LinkParams& params);

struct LinkedSentences {
  SenseLink link;
  std::vector<Sentence> sentences;
};

// Accepted links of one source clique with the target sentences behind each.
std::vector<LinkedSentences> cross_navigate(const Atlas& source_atlas, const std::string& clique_id,
                                            const Atlas& target_atlas, const BilingualDictionary& dict,
                                            const LinkParams& params);

nlohmann::json to_json(const SenseLink& link);

}  // namespace lexatlas
