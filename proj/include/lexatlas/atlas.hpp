#pragma once

// Per-language atlas: cliques and semantic maps per target unit, the
// clique -> utterance index and its on-disk form.

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "lexatlas/ca.hpp"
#include "lexatlas/corpus.hpp"
#include "lexatlas/graph.hpp"

namespace lexatlas {

inline constexpr const char* kAtlasFormat = "lexatlas-atlas";
inline constexpr int kAtlasFormatVersion = 1;

struct AtlasConfig {
  // Defaults to the language of the first sentence when empty.
  std::string language;
  GraphConfig graph;
  double ca_tolerance = 1e-9;
  // Skip targets that take part in a single dependency record.
  bool skip_hapax = false;
};

struct AtlasEntry {
  LexicalUnit target;
  std::vector<Clique> cliques;  // sorted by members; rows of `map`
  SemanticMap map;

  bool operator==(const AtlasEntry&) const = default;
};

struct BuildFailure {
  LexicalUnit target;
  std::string reason;
  std::size_t partial_count = 0;

  bool operator==(const BuildFailure&) const = default;
};

struct BuildReport {
  std::size_t targets = 0;
  std::size_t entries = 0;
  std::size_t without_cliques = 0;
  std::size_t skipped_hapax = 0;
  std::vector<BuildFailure> failures;

  bool operator==(const BuildReport&) const = default;
};

struct CliqueRef {
  LexicalUnit target;
  std::size_t position = 0;  // index into the entry's cliques

  bool operator==(const CliqueRef&) const = default;
};

struct Atlas {
  std::string language;
  std::map<LexicalUnit, AtlasEntry> entries;
  SentenceStore sentences;
  std::map<LexicalUnit, std::vector<std::string>> unit_index;  // member unit -> clique ids
  std::map<std::string, CliqueRef> clique_index;
  BuildReport report;

  const Clique* find_clique(const std::string& id) const;
  std::size_t clique_count() const { return clique_index.size(); }

  bool operator==(const Atlas& o) const;
};

// Rebuilds unit_index and clique_index from the entries.
void rebuild_indexes(Atlas& atlas);

// Throws IntegrityError naming the first violated invariant.
void validate_atlas(const Atlas& atlas);

// Builds one entry; nullopt when the target yields no clique. Throws
// NotFound for unknown targets and BudgetExceeded from enumeration.
std::optional<AtlasEntry> build_entry(const LexicalUnit& target, const DependencyTable& table,
                                      const AtlasConfig& config);

// `targets` == nullopt builds every unit of the table. Per-target failures
// land in the report; the build continues.
Atlas build_atlas(const DependencyTable& table, const SentenceStore& sentences,
                  const std::optional<std::vector<LexicalUnit>>& targets, const AtlasConfig& config,
                  Execution exec = Execution::Parallel);

struct WordResult {
  const AtlasEntry* entry = nullptr;
};

// nullopt for an unknown unit. Throws IntegrityError when the entry's
// cliques are not resolvable through the clique index.
std::optional<WordResult> query_word(const Atlas& atlas, const LexicalUnit& unit);

// Entries whose target key equals `key`, in unit order.
std::vector<const AtlasEntry*> entries_for_key(const Atlas& atlas, const std::string& key);

// Support sentences in corpus order. NotFound for an unknown id.
std::vector<Sentence> sentences_for_clique(const Atlas& atlas, const std::string& clique_id);

void save_atlas(const Atlas& atlas, const std::filesystem::path& dir);
Atlas load_atlas(const std::filesystem::path& dir);

// Structured-text forms shared by disk records and HTTP responses.
nlohmann::json to_json(const Clique& clique);
nlohmann::json to_json(const SemanticMap& map);
nlohmann::json to_json(const AtlasEntry& entry);
nlohmann::json to_json(const Sentence& sentence);
nlohmann::json to_json(const BuildReport& report);

}  // namespace lexatlas
