#pragma once

// Dependency-annotated corpus ingestion: CoNLL-U reading, function-word
// filtering, lemma normalization and the dependency table the graph builder
// queries.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "lexatlas/unit.hpp"

namespace lexatlas {

struct Sentence {
  SentenceId id;
  std::string text;
  std::string language;

  bool operator==(const Sentence&) const = default;
};

struct RawToken {
  int index = 0;  // 1-based position within the sentence
  std::string form;
  std::string lemma;  // empty when the input column is "_"
  Pos pos = Pos::X;
};

// Arc between two token indexes of the same sentence; root arcs are not kept.
struct RawArc {
  int head = 0;
  int dependent = 0;
  std::string relation;
};

struct ParsedSentence {
  Sentence sentence;
  std::vector<RawToken> tokens;
  std::vector<RawArc> arcs;

  const RawToken& token(int index) const { return tokens.at(static_cast<std::size_t>(index - 1)); }
};

struct ParseDiagnostics {
  std::size_t multiword_ranges = 0;
  std::size_t empty_nodes = 0;
};

// Reads blank-line separated CoNLL-U style blocks. Sentence ids are
// "<doc_id>:<ordinal>" with 1-based ordinals. The text comes from a
// "# text = ..." comment when present, else from the space-joined forms.
std::vector<ParsedSentence> parse_corpus(std::istream& in, std::string_view language,
                                         std::string_view doc_id = "doc",
                                         ParseDiagnostics* diagnostics = nullptr);

struct IngestConfig {
  bool lemmatize_nouns = true;
  bool lemmatize_verbs = true;
  std::set<Pos> function_word_pos = default_function_words();
  bool case_fold = true;

  static std::set<Pos> default_function_words();

  // Keys absent from the JSON object keep their defaults.
  static IngestConfig from_json_text(std::string_view text);
};

struct DependencyRecord {
  LexicalUnit head;
  LexicalUnit dependent;
  std::string relation;
  SentenceId sentence;

  bool reflexive() const { return head == dependent; }
  bool operator==(const DependencyRecord&) const = default;
};

struct FilterDiagnostics {
  std::size_t function_word_arcs = 0;
  std::size_t missing_lemma = 0;

  FilterDiagnostics& operator+=(const FilterDiagnostics& o) {
    function_word_arcs += o.function_word_arcs;
    missing_lemma += o.missing_lemma;
    return *this;
  }
};

// Normalizes one token to its lexical unit. Returns nullopt when a lemma is
// required by the configuration but missing.
std::optional<LexicalUnit> normalize_token(const RawToken& token, const IngestConfig& config);

std::vector<DependencyRecord> filter_and_normalize(const ParsedSentence& sentence,
                                                   const IngestConfig& config,
                                                   FilterDiagnostics* diagnostics = nullptr);

std::vector<DependencyRecord> filter_and_normalize(std::span<const ParsedSentence> sentences,
                                                   const IngestConfig& config,
                                                   FilterDiagnostics* diagnostics = nullptr);

// Multiset of dependency records with the indexes needed for graph
// construction: interned units and sentences, undirected pair statistics and
// per-sentence pair lists. Append-only.
class DependencyTable {
 public:
  using UnitId = std::uint32_t;
  using SentenceIndex = std::uint32_t;

  struct PairStats {
    std::size_t count = 0;                    // records linking the pair, either direction
    std::vector<SentenceIndex> sentences;     // sorted, unique
  };

  void add(const DependencyRecord& record);
  void merge(const DependencyTable& other);

  const std::vector<DependencyRecord>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }

  std::size_t unit_count() const { return units_.size(); }
  const LexicalUnit& unit(UnitId id) const { return units_[id]; }
  std::optional<UnitId> find(const LexicalUnit& unit) const;

  std::size_t sentence_count() const { return sentence_ids_.size(); }
  const SentenceId& sentence_id(SentenceIndex s) const { return sentence_ids_[s]; }

  // Distinct units directly related to `id`, sorted by id. Includes `id`
  // itself when a reflexive record exists.
  const std::vector<UnitId>& neighbors(UnitId id) const { return adjacency_[id]; }

  // Sentences in which `id` takes part in at least one record, sorted.
  const std::vector<SentenceIndex>& unit_sentences(UnitId id) const { return unit_sentences_[id]; }

  const PairStats* pair(UnitId a, UnitId b) const;
  std::size_t pair_frequency(const LexicalUnit& a, const LexicalUnit& b) const;
  std::size_t distinct_pairs() const { return pairs_.size(); }

  // Distinct undirected unit pairs (a <= b) related in sentence s.
  const std::vector<std::pair<UnitId, UnitId>>& sentence_pairs(SentenceIndex s) const {
    return sentence_pairs_[s];
  }

  // All units that occur in at least one record, sorted.
  std::vector<LexicalUnit> sorted_units() const;

  // Undirected pair -> frequency, keyed by the sorted unit pair.
  std::vector<std::tuple<LexicalUnit, LexicalUnit, std::size_t>> pair_frequencies() const;

 private:
  UnitId intern_unit(const LexicalUnit& unit);
  SentenceIndex intern_sentence(const SentenceId& id);
  static std::uint64_t pair_key(UnitId a, UnitId b);

  std::vector<DependencyRecord> records_;
  std::vector<LexicalUnit> units_;
  std::unordered_map<LexicalUnit, UnitId> unit_ids_;
  std::vector<std::vector<UnitId>> adjacency_;
  std::vector<std::vector<SentenceIndex>> unit_sentences_;
  std::vector<SentenceId> sentence_ids_;
  std::unordered_map<SentenceId, SentenceIndex> sentence_index_;
  std::unordered_map<std::uint64_t, PairStats> pairs_;
  std::vector<std::vector<std::pair<UnitId, UnitId>>> sentence_pairs_;
};

// Sentence id -> sentence, in insertion order.
class SentenceStore {
 public:
  void add(Sentence sentence);
  const Sentence* find(const SentenceId& id) const;
  const std::vector<Sentence>& all() const { return sentences_; }
  std::size_t size() const { return sentences_.size(); }
  bool operator==(const SentenceStore& o) const { return sentences_ == o.sentences_; }

 private:
  std::vector<Sentence> sentences_;
  std::unordered_map<SentenceId, std::size_t> index_;
};

struct LexiconStats {
  std::string language;
  std::size_t sentences = 0;
  std::size_t dependencies = 0;
  std::size_t distinct_units = 0;
  std::size_t distinct_pairs = 0;
  std::size_t reflexive_dependencies = 0;
  std::size_t dropped_function_word_arcs = 0;
  std::size_t skipped_missing_lemma = 0;
  std::size_t skipped_multiword_ranges = 0;
  std::size_t skipped_empty_nodes = 0;

  bool operator==(const LexiconStats&) const = default;
};

struct IngestResult {
  DependencyTable table;
  SentenceStore sentences;
  LexiconStats stats;
};

struct CorpusSource {
  std::string doc_id;
  std::string content;
};

// Parses and filters every source; sources are processed in parallel when
// OpenMP is available and merged in input order.
IngestResult ingest(std::span<const CorpusSource> sources, std::string_view language,
                    const IngestConfig& config);

// Reads files; document ids are the file stems, de-duplicated with ".<n>".
IngestResult ingest_files(std::span<const std::filesystem::path> files, std::string_view language,
                          const IngestConfig& config);

// On-disk ingest directory: dependencies.jsonl, sentences.jsonl, stats.json.
void save_ingest(const IngestResult& result, const std::filesystem::path& dir);
IngestResult load_ingest(const std::filesystem::path& dir);

std::string dependencies_jsonl(const DependencyTable& table);
std::string stats_json(const LexiconStats& stats);

}  // namespace lexatlas
