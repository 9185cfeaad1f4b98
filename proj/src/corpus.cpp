#include "lexatlas/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <exception>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <tuple>

#include "json.hpp"
#include "lexatlas/error.hpp"
#include "lexatlas/fsutil.hpp"

namespace lexatlas {

using json = nlohmann::json;

namespace {

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    auto tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  return fields;
}

std::optional<int> parse_int(std::string_view s) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

std::string field_or_empty(std::string_view f) { return f == "_" ? std::string() : std::string(f); }

struct BlockBuilder {
  std::vector<RawToken> tokens;
  std::vector<std::pair<int, std::string>> heads;  // per token: head index, relation
  std::string text;
  std::size_t first_line = 0;

  bool empty() const { return tokens.empty(); }
  void clear() {
    tokens.clear();
    heads.clear();
    text.clear();
    first_line = 0;
  }
};

}  // namespace

std::vector<ParsedSentence> parse_corpus(std::istream& in, std::string_view language,
                                         std::string_view doc_id, ParseDiagnostics* diagnostics) {
  std::vector<ParsedSentence> out;
  BlockBuilder block;
  std::size_t line_no = 0;
  std::string line;

  auto flush = [&]() {
    if (block.empty()) {
      block.clear();
      return;
    }
    ParsedSentence ps;
    ps.sentence.id = std::string(doc_id) + ":" + std::to_string(out.size() + 1);
    ps.sentence.language = std::string(language);
    if (!block.text.empty()) {
      ps.sentence.text = block.text;
    } else {
      for (const auto& t : block.tokens) {
        if (!ps.sentence.text.empty()) ps.sentence.text += ' ';
        ps.sentence.text += t.form;
      }
    }
    const int n = static_cast<int>(block.tokens.size());
    for (int i = 0; i < n; ++i) {
      const auto& [head, rel] = block.heads[static_cast<std::size_t>(i)];
      if (head < 0 || head > n) {
        throw ParseError("dangling HEAD reference " + std::to_string(head) + " in sentence " +
                             ps.sentence.id,
                         block.first_line);
      }
      if (head == 0) continue;
      ps.arcs.push_back(RawArc{head, i + 1, rel});
    }
    ps.tokens = std::move(block.tokens);
    out.push_back(std::move(ps));
    block.clear();
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string_view view(line);
    if (view.find_first_not_of(" \t") == std::string_view::npos) {
      flush();
      continue;
    }
    if (view.front() == '#') {
      constexpr std::string_view kText = "# text = ";
      if (view.substr(0, kText.size()) == kText) block.text = std::string(view.substr(kText.size()));
      continue;
    }
    auto fields = split_tabs(view);
    if (fields.size() < 8) throw ParseError("malformed token line: expected at least 8 tab-separated columns", line_no);
    if (fields[0].find('-') != std::string_view::npos) {
      if (diagnostics) ++diagnostics->multiword_ranges;
      continue;
    }
    if (fields[0].find('.') != std::string_view::npos) {
      if (diagnostics) ++diagnostics->empty_nodes;
      continue;
    }
    auto id = parse_int(fields[0]);
    if (!id) throw ParseError("malformed token line: non-numeric ID", line_no);
    if (*id != static_cast<int>(block.tokens.size()) + 1) {
      throw ParseError("malformed token line: token ID out of sequence", line_no);
    }
    auto head = parse_int(fields[6]);
    if (!head) throw ParseError("malformed token line: non-numeric HEAD", line_no);
    auto pos = parse_pos(fields[3]);
    if (!pos) throw ParseError("malformed token line: unknown UPOS '" + std::string(fields[3]) + "'", line_no);
    if (block.empty()) block.first_line = line_no;
    block.tokens.push_back(RawToken{*id, std::string(fields[1]), field_or_empty(fields[2]), *pos});
    block.heads.emplace_back(*head, field_or_empty(fields[7]));
  }
  flush();
  return out;
}

std::set<Pos> IngestConfig::default_function_words() {
  return {Pos::Det, Pos::Adp, Pos::Pron, Pos::Aux, Pos::Cconj, Pos::Sconj, Pos::Part, Pos::Intj, Pos::Punct};
}

IngestConfig IngestConfig::from_json_text(std::string_view text) {
  IngestConfig cfg;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("invalid ingest config: ") + e.what());
  }
  if (!j.is_object()) throw ParseError("invalid ingest config: expected an object");
  try {
    if (j.contains("lemmatize_nouns")) cfg.lemmatize_nouns = j.at("lemmatize_nouns").get<bool>();
    if (j.contains("lemmatize_verbs")) cfg.lemmatize_verbs = j.at("lemmatize_verbs").get<bool>();
    if (j.contains("case_fold")) cfg.case_fold = j.at("case_fold").get<bool>();
    if (j.contains("function_word_pos")) {
      cfg.function_word_pos.clear();
      for (const auto& tag : j.at("function_word_pos")) {
        auto pos = parse_pos(tag.get<std::string>());
        if (!pos) throw ParseError("invalid ingest config: unknown POS " + tag.dump());
        cfg.function_word_pos.insert(*pos);
      }
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("invalid ingest config: ") + e.what());
  }
  return cfg;
}

std::optional<LexicalUnit> normalize_token(const RawToken& token, const IngestConfig& config) {
  bool use_lemma = true;
  if (token.pos == Pos::Noun) use_lemma = config.lemmatize_nouns;
  if (token.pos == Pos::Verb) use_lemma = config.lemmatize_verbs;
  const std::string& raw = use_lemma ? token.lemma : token.form;
  if (raw.empty() || raw == "_") return std::nullopt;
  LexicalUnit unit;
  unit.pos = token.pos;
  unit.key = (config.case_fold && token.pos != Pos::Propn) ? fold_case(raw) : raw;
  return unit;
}

std::vector<DependencyRecord> filter_and_normalize(const ParsedSentence& sentence,
                                                   const IngestConfig& config,
                                                   FilterDiagnostics* diagnostics) {
  std::vector<DependencyRecord> out;
  for (const auto& arc : sentence.arcs) {
    const auto& head = sentence.token(arc.head);
    const auto& dep = sentence.token(arc.dependent);
    if (config.function_word_pos.count(head.pos) || config.function_word_pos.count(dep.pos)) {
      if (diagnostics) ++diagnostics->function_word_arcs;
      continue;
    }
    auto h = normalize_token(head, config);
    auto d = normalize_token(dep, config);
    if (!h || !d) {
      if (diagnostics) ++diagnostics->missing_lemma;
      continue;
    }
    out.push_back(DependencyRecord{std::move(*h), std::move(*d), arc.relation, sentence.sentence.id});
  }
  return out;
}

std::vector<DependencyRecord> filter_and_normalize(std::span<const ParsedSentence> sentences,
                                                   const IngestConfig& config,
                                                   FilterDiagnostics* diagnostics) {
  std::vector<DependencyRecord> out;
  for (const auto& s : sentences) {
    auto part = filter_and_normalize(s, config, diagnostics);
    out.insert(out.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
  }
  return out;
}

// --- DependencyTable ---------------------------------------------------------

std::uint64_t DependencyTable::pair_key(UnitId a, UnitId b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

DependencyTable::UnitId DependencyTable::intern_unit(const LexicalUnit& unit) {
  auto [it, inserted] = unit_ids_.try_emplace(unit, static_cast<UnitId>(units_.size()));
  if (inserted) {
    units_.push_back(unit);
    adjacency_.emplace_back();
    unit_sentences_.emplace_back();
  }
  return it->second;
}

DependencyTable::SentenceIndex DependencyTable::intern_sentence(const SentenceId& id) {
  auto [it, inserted] = sentence_index_.try_emplace(id, static_cast<SentenceIndex>(sentence_ids_.size()));
  if (inserted) {
    sentence_ids_.push_back(id);
    sentence_pairs_.emplace_back();
  }
  return it->second;
}

template <typename T>
static void insert_sorted_unique(std::vector<T>& v, const T& value) {
  auto it = std::lower_bound(v.begin(), v.end(), value);
  if (it == v.end() || *it != value) v.insert(it, value);
}

void DependencyTable::add(const DependencyRecord& record) {
  UnitId h = intern_unit(record.head);
  UnitId d = intern_unit(record.dependent);
  SentenceIndex s = intern_sentence(record.sentence);
  records_.push_back(record);

  insert_sorted_unique(adjacency_[h], d);
  insert_sorted_unique(adjacency_[d], h);
  insert_sorted_unique(unit_sentences_[h], s);
  insert_sorted_unique(unit_sentences_[d], s);

  auto& stats = pairs_[pair_key(h, d)];
  ++stats.count;
  insert_sorted_unique(stats.sentences, s);

  insert_sorted_unique(sentence_pairs_[s], std::make_pair(std::min(h, d), std::max(h, d)));
}

void DependencyTable::merge(const DependencyTable& other) {
  records_.reserve(records_.size() + other.records_.size());
  for (const auto& r : other.records_) add(r);
}

std::optional<DependencyTable::UnitId> DependencyTable::find(const LexicalUnit& unit) const {
  auto it = unit_ids_.find(unit);
  if (it == unit_ids_.end()) return std::nullopt;
  return it->second;
}

const DependencyTable::PairStats* DependencyTable::pair(UnitId a, UnitId b) const {
  auto it = pairs_.find(pair_key(a, b));
  return it == pairs_.end() ? nullptr : &it->second;
}

std::size_t DependencyTable::pair_frequency(const LexicalUnit& a, const LexicalUnit& b) const {
  auto ia = find(a);
  auto ib = find(b);
  if (!ia || !ib) return 0;
  const auto* p = pair(*ia, *ib);
  return p ? p->count : 0;
}

std::vector<LexicalUnit> DependencyTable::sorted_units() const {
  std::vector<LexicalUnit> out = units_;
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::tuple<LexicalUnit, LexicalUnit, std::size_t>> DependencyTable::pair_frequencies() const {
  std::vector<std::tuple<LexicalUnit, LexicalUnit, std::size_t>> out;
  out.reserve(pairs_.size());
  for (const auto& [key, stats] : pairs_) {
    const auto& a = units_[static_cast<UnitId>(key >> 32)];
    const auto& b = units_[static_cast<UnitId>(key & 0xffffffffu)];
    if (b < a) {
      out.emplace_back(b, a, stats.count);
    } else {
      out.emplace_back(a, b, stats.count);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

// --- SentenceStore -------------------------------------------------------------

void SentenceStore::add(Sentence sentence) {
  auto [it, inserted] = index_.try_emplace(sentence.id, sentences_.size());
  if (!inserted) throw IntegrityError("duplicate sentence id " + sentence.id);
  sentences_.push_back(std::move(sentence));
}

const Sentence* SentenceStore::find(const SentenceId& id) const {
  auto it = index_.find(id);
  return it == index_.end() ? nullptr : &sentences_[it->second];
}

// --- ingest --------------------------------------------------------------------

namespace {

struct SourceResult {
  std::vector<ParsedSentence> sentences;
  std::vector<DependencyRecord> records;
  ParseDiagnostics parse;
  FilterDiagnostics filter;
  std::exception_ptr error;
};

SourceResult process_source(const CorpusSource& source, std::string_view language, const IngestConfig& config) {
  SourceResult r;
  try {
    std::istringstream in(source.content);
    r.sentences = parse_corpus(in, language, source.doc_id, &r.parse);
    r.records = filter_and_normalize(r.sentences, config, &r.filter);
  } catch (const ParseError& e) {
    r.error = std::make_exception_ptr(ParseError(source.doc_id + ": " + e.what()));
  } catch (...) {
    r.error = std::current_exception();
  }
  return r;
}

}  // namespace

IngestResult ingest(std::span<const CorpusSource> sources, std::string_view language,
                    const IngestConfig& config) {
  std::vector<SourceResult> parts(sources.size());
  const auto n = static_cast<long>(sources.size());
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < n; ++i) {
    parts[static_cast<std::size_t>(i)] = process_source(sources[static_cast<std::size_t>(i)], language, config);
  }

  IngestResult result;
  result.stats.language = std::string(language);
  for (auto& part : parts) {
    if (part.error) std::rethrow_exception(part.error);
    for (auto& s : part.sentences) result.sentences.add(std::move(s.sentence));
    for (const auto& rec : part.records) {
      result.table.add(rec);
      if (rec.reflexive()) ++result.stats.reflexive_dependencies;
    }
    result.stats.dropped_function_word_arcs += part.filter.function_word_arcs;
    result.stats.skipped_missing_lemma += part.filter.missing_lemma;
    result.stats.skipped_multiword_ranges += part.parse.multiword_ranges;
    result.stats.skipped_empty_nodes += part.parse.empty_nodes;
  }
  result.stats.sentences = result.sentences.size();
  result.stats.dependencies = result.table.size();
  result.stats.distinct_units = result.table.unit_count();
  result.stats.distinct_pairs = result.table.distinct_pairs();
  return result;
}

IngestResult ingest_files(std::span<const std::filesystem::path> files, std::string_view language,
                          const IngestConfig& config) {
  std::vector<CorpusSource> sources;
  std::map<std::string, int> seen;
  for (const auto& path : files) {
    std::string doc = path.stem().string();
    int n = ++seen[doc];
    if (n > 1) doc += "." + std::to_string(n);
    sources.push_back(CorpusSource{doc, read_file(path)});
  }
  return ingest(sources, language, config);
}

// --- persistence -----------------------------------------------------------------

std::string dependencies_jsonl(const DependencyTable& table) {
  std::string out;
  for (const auto& r : table.records()) {
    json j = {{"head", to_string(r.head)},
              {"dependent", to_string(r.dependent)},
              {"relation", r.relation},
              {"sentence", r.sentence}};
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::string stats_json(const LexiconStats& s) {
  json j = {{"language", s.language},
            {"sentences", s.sentences},
            {"dependencies", s.dependencies},
            {"distinct_units", s.distinct_units},
            {"distinct_pairs", s.distinct_pairs},
            {"reflexive_dependencies", s.reflexive_dependencies},
            {"dropped_function_word_arcs", s.dropped_function_word_arcs},
            {"skipped_missing_lemma", s.skipped_missing_lemma},
            {"skipped_multiword_ranges", s.skipped_multiword_ranges},
            {"skipped_empty_nodes", s.skipped_empty_nodes}};
  return j.dump(2) + "\n";
}

void save_ingest(const IngestResult& result, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_file(dir / "dependencies.jsonl", dependencies_jsonl(result.table));
  std::string sentences;
  for (const auto& s : result.sentences.all()) {
    sentences += json{{"id", s.id}, {"lang", s.language}, {"text", s.text}}.dump();
    sentences += '\n';
  }
  write_file(dir / "sentences.jsonl", sentences);
  write_file(dir / "stats.json", stats_json(result.stats));
}

IngestResult load_ingest(const std::filesystem::path& dir) {
  IngestResult result;
  try {
    auto stats = json::parse(read_file(dir / "stats.json"));
    auto& s = result.stats;
    s.language = stats.at("language").get<std::string>();
    s.sentences = stats.at("sentences").get<std::size_t>();
    s.dependencies = stats.at("dependencies").get<std::size_t>();
    s.distinct_units = stats.at("distinct_units").get<std::size_t>();
    s.distinct_pairs = stats.at("distinct_pairs").get<std::size_t>();
    s.reflexive_dependencies = stats.value("reflexive_dependencies", std::size_t{0});
    s.dropped_function_word_arcs = stats.value("dropped_function_word_arcs", std::size_t{0});
    s.skipped_missing_lemma = stats.value("skipped_missing_lemma", std::size_t{0});
    s.skipped_multiword_ranges = stats.value("skipped_multiword_ranges", std::size_t{0});
    s.skipped_empty_nodes = stats.value("skipped_empty_nodes", std::size_t{0});
  } catch (const json::exception& e) {
    throw ParseError(std::string("stats.json: ") + e.what());
  }

  for_each_line(dir / "sentences.jsonl", [&](std::string_view line, std::size_t n) {
    try {
      auto j = json::parse(line);
      result.sentences.add(Sentence{j.at("id").get<std::string>(), j.at("text").get<std::string>(),
                                    j.at("lang").get<std::string>()});
    } catch (const json::exception& e) {
      throw ParseError(std::string("sentences.jsonl: ") + e.what(), n);
    }
  });
  for_each_line(dir / "dependencies.jsonl", [&](std::string_view line, std::size_t n) {
    try {
      auto j = json::parse(line);
      result.table.add(DependencyRecord{parse_unit(j.at("head").get<std::string>()),
                                        parse_unit(j.at("dependent").get<std::string>()),
                                        j.at("relation").get<std::string>(),
                                        j.at("sentence").get<std::string>()});
    } catch (const json::exception& e) {
      throw ParseError(std::string("dependencies.jsonl: ") + e.what(), n);
    }
  });
  if (result.table.size() != result.stats.dependencies) {
    throw IntegrityError("dependencies.jsonl holds " + std::to_string(result.table.size()) +
                         " records, stats.json declares " + std::to_string(result.stats.dependencies));
  }
  return result;
}

}  // namespace lexatlas
