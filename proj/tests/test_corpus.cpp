#include <algorithm>
#include <filesystem>
#include <random>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "lexatlas/corpus.hpp"
#include "lexatlas/error.hpp"
#include "lexatlas/fsutil.hpp"
#include "oracles.hpp"

using namespace lexatlas;
namespace fs = std::filesystem;

namespace {

const char* kChat =
    "1\tle\tle\tDET\t_\t_\t2\tdet\t_\t_\n"
    "2\tchat\tchat\tNOUN\t_\t_\t0\troot\t_\t_\n";

const char* kCercle =
    "# text = Il décrit un cercle.\n"
    "1\tIl\til\tPRON\t_\t_\t2\tnsubj\t_\t_\n"
    "2\tdécrit\tdécrire\tVERB\t_\t_\t0\troot\t_\t_\n"
    "3\tun\tun\tDET\t_\t_\t4\tdet\t_\t_\n"
    "4\tcercle\tcercle\tNOUN\t_\t_\t2\tobj\t_\t_\n"
    "5\t.\t.\tPUNCT\t_\t_\t2\tpunct\t_\t_\n";

std::vector<ParsedSentence> parse(const std::string& text, ParseDiagnostics* diag = nullptr) {
  std::istringstream in(text);
  return parse_corpus(in, "fr", "doc", diag);
}

std::size_t freq_sum(const DependencyTable& t) {
  std::size_t n = 0;
  for (const auto& [a, b, f] : t.pair_frequencies()) n += f;
  return n;
}

}  // namespace

TEST_CASE("empty stream parses to nothing") { CHECK(parse("").empty()); }

TEST_CASE("determiner block gives one sentence and one arc") {
  auto s = parse(kChat);
  REQUIRE(s.size() == 1);
  REQUIRE(s[0].arcs.size() == 1);
  CHECK(s[0].arcs[0].head == 2);
  CHECK(s[0].arcs[0].dependent == 1);
  CHECK(s[0].sentence.id == "doc:1");
  CHECK(s[0].sentence.text == "le chat");
  CHECK(s[0].sentence.language == "fr");
}

TEST_CASE("text comment wins over joined forms") {
  auto s = parse(kCercle);
  REQUIRE(s.size() == 1);
  CHECK(s[0].sentence.text == "Il décrit un cercle.");
}

TEST_CASE("sentence ids follow block order") {
  auto s = parse(std::string(kChat) + "\n\n" + kCercle + "\n" + kChat);
  REQUIRE(s.size() == 3);
  CHECK(s[0].sentence.id == "doc:1");
  CHECK(s[1].sentence.id == "doc:2");
  CHECK(s[2].sentence.id == "doc:3");
}

TEST_CASE("short token line is rejected with its line number") {
  try {
    parse("# text = x\n1\tle\tle\tDET\t_\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
    CHECK(std::string(e.what()).find("malformed token line") != std::string::npos);
  }
}

TEST_CASE("malformed head and dangling head") {
  CHECK_THROWS_AS(parse("1\tle\tle\tDET\t_\t_\tx\tdet\t_\t_\n"), ParseError);
  try {
    parse("1\tle\tle\tDET\t_\t_\t7\tdet\t_\t_\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("doc:1") != std::string::npos);
  }
  CHECK_THROWS_AS(parse("1\tle\tle\tFOO\t_\t_\t0\tdet\t_\t_\n"), ParseError);
  CHECK_THROWS_AS(parse("2\tle\tle\tDET\t_\t_\t0\tdet\t_\t_\n"), ParseError);
}

TEST_CASE("multiword ranges and empty nodes are skipped and counted") {
  const std::string text =
      "1-2\tdu\t_\t_\t_\t_\t_\t_\t_\t_\n"
      "1\tde\tde\tADP\t_\t_\t3\tcase\t_\t_\n"
      "2\tle\tle\tDET\t_\t_\t3\tdet\t_\t_\n"
      "3\tpain\tpain\tNOUN\t_\t_\t0\troot\t_\t_\n"
      "3.1\tx\tx\tNOUN\t_\t_\t_\t_\t_\t_\n";
  ParseDiagnostics diag;
  auto s = parse(text, &diag);
  REQUIRE(s.size() == 1);
  CHECK(s[0].tokens.size() == 3);
  CHECK(diag.multiword_ranges == 1);
  CHECK(diag.empty_nodes == 1);
}

TEST_CASE("function word arcs are dropped") {
  auto s = parse(kChat);
  FilterDiagnostics diag;
  CHECK(filter_and_normalize(s[0], IngestConfig{}, &diag).empty());
  CHECK(diag.function_word_arcs == 1);
}

TEST_CASE("decrire un cercle keeps the verb-object record") {
  auto s = parse(kCercle);
  auto records = filter_and_normalize(s[0], IngestConfig{});
  REQUIRE(records.size() == 1);
  CHECK(records[0].head == LexicalUnit{"décrire", Pos::Verb});
  CHECK(records[0].dependent == LexicalUnit{"cercle", Pos::Noun});
  CHECK(records[0].relation == "obj");
  CHECK(records[0].sentence == "doc:1");
}

TEST_CASE("verb lemmatization unifies fait and fera") {
  const std::string text =
      "1\til\til\tPRON\t_\t_\t2\tnsubj\t_\t_\n"
      "2\tfera\tfaire\tVERB\t_\t_\t0\troot\t_\t_\n"
      "3\tdes\tun\tDET\t_\t_\t4\tdet\t_\t_\n"
      "4\tcourses\tcourse\tNOUN\t_\t_\t2\tobj\t_\t_\n"
      "\n"
      "1\til\til\tPRON\t_\t_\t3\tnsubj\t_\t_\n"
      "2\ta\tavoir\tAUX\t_\t_\t3\taux\t_\t_\n"
      "3\tfait\tfaire\tVERB\t_\t_\t0\troot\t_\t_\n"
      "4\tdes\tun\tDET\t_\t_\t5\tdet\t_\t_\n"
      "5\tcourses\tcourse\tNOUN\t_\t_\t3\tobj\t_\t_\n";
  auto s = parse(text);
  auto records = filter_and_normalize(std::span<const ParsedSentence>(s), IngestConfig{});
  REQUIRE(records.size() == 2);
  CHECK(records[0].head.key == "faire");
  CHECK(records[1].head.key == "faire");

  IngestConfig surface;
  surface.lemmatize_verbs = false;
  records = filter_and_normalize(std::span<const ParsedSentence>(s), surface);
  REQUIRE(records.size() == 2);
  CHECK(records[0].head.key == "fera");
  CHECK(records[1].head.key == "fait");
}

TEST_CASE("trottoir and trottoirs merge only under noun lemmatization") {
  const std::string text =
      "1\tElle\telle\tPRON\t_\t_\t2\tnsubj\t_\t_\n"
      "2\tfait\tfaire\tVERB\t_\t_\t0\troot\t_\t_\n"
      "3\tle\tle\tDET\t_\t_\t4\tdet\t_\t_\n"
      "4\ttrottoir\ttrottoir\tNOUN\t_\t_\t2\tobj\t_\t_\n"
      "\n"
      "1\tIls\til\tPRON\t_\t_\t2\tnsubj\t_\t_\n"
      "2\tfont\tfaire\tVERB\t_\t_\t0\troot\t_\t_\n"
      "3\tles\tle\tDET\t_\t_\t4\tdet\t_\t_\n"
      "4\ttrottoirs\ttrottoir\tNOUN\t_\t_\t2\tobj\t_\t_\n";
  const LexicalUnit faire{"faire", Pos::Verb};

  auto merged = oracle::ingest_text(text, "fr");
  CHECK(merged.stats.distinct_units == 2);
  CHECK(merged.table.pair_frequency(faire, {"trottoir", Pos::Noun}) == 2);

  IngestConfig forms;
  forms.lemmatize_nouns = false;
  auto split = oracle::ingest_text(text, "fr", "doc", forms);
  CHECK(split.stats.distinct_units == 3);
  CHECK(split.table.pair_frequency(faire, {"trottoir", Pos::Noun}) == 1);
  CHECK(split.table.pair_frequency(faire, {"trottoirs", Pos::Noun}) == 1);
}

TEST_CASE("case folding spares proper nouns") {
  const std::string text =
      "1\tParis\tParis\tPROPN\t_\t_\t2\tnsubj\t_\t_\n"
      "2\tBrille\tBriller\tVERB\t_\t_\t0\troot\t_\t_\n"
      "3\tÉTÉ\tÉTÉ\tNOUN\t_\t_\t2\tobl\t_\t_\n";
  auto r = oracle::ingest_text(text, "fr");
  CHECK(r.table.find({"Paris", Pos::Propn}));
  CHECK(r.table.find({"briller", Pos::Verb}));
  CHECK(r.table.find({"été", Pos::Noun}));
  IngestConfig keep;
  keep.case_fold = false;
  r = oracle::ingest_text(text, "fr", "doc", keep);
  CHECK(r.table.find({"Briller", Pos::Verb}));
}

TEST_CASE("missing lemma skips the record and is tallied") {
  const std::string text =
      "1\tchats\t_\tNOUN\t_\t_\t2\tnsubj\t_\t_\n"
      "2\tdorment\tdormir\tVERB\t_\t_\t0\troot\t_\t_\n"
      "3\tbien\tbien\tADV\t_\t_\t2\tadvmod\t_\t_\n";
  auto r = oracle::ingest_text(text, "fr");
  CHECK(r.stats.dependencies == 1);
  CHECK(r.stats.skipped_missing_lemma == 1);
  IngestConfig forms;
  forms.lemmatize_nouns = false;
  r = oracle::ingest_text(text, "fr", "doc", forms);
  CHECK(r.stats.dependencies == 2);
  CHECK(r.table.find({"chats", Pos::Noun}));
}

TEST_CASE("ingest config json") {
  auto cfg = IngestConfig::from_json_text(R"({"lemmatize_nouns": false, "function_word_pos": ["DET", "PUNCT"]})");
  CHECK_FALSE(cfg.lemmatize_nouns);
  CHECK(cfg.lemmatize_verbs);
  CHECK(cfg.function_word_pos == std::set<Pos>{Pos::Det, Pos::Punct});
  CHECK_FALSE(IngestConfig{}.function_word_pos.empty());
  CHECK_THROWS_AS(IngestConfig::from_json_text(R"({"function_word_pos": ["XYZ"]})"), ParseError);
  CHECK_THROWS_AS(IngestConfig::from_json_text("[1]"), ParseError);
}

TEST_CASE("bundled fixture matches its recorded counts") {
  auto expected = nlohmann::json::parse(read_file(oracle::fixture("fr_regle.expected.json")));
  auto r = oracle::ingest_fixtures({"fr_regle.conllu"}, "fr");
  CHECK(r.stats.sentences == expected["sentences"].get<std::size_t>());
  CHECK(r.stats.dependencies == expected["dependencies"].get<std::size_t>());
  CHECK(r.stats.distinct_units == expected["distinct_units"].get<std::size_t>());
  CHECK(r.stats.distinct_pairs == expected["distinct_pairs"].get<std::size_t>());
  CHECK(r.stats.dropped_function_word_arcs == expected["dropped_function_word_arcs"].get<std::size_t>());
  CHECK(r.stats.skipped_multiword_ranges == expected["skipped_multiword_ranges"].get<std::size_t>());
  std::map<Pos, std::size_t> by_pos;
  for (const auto& u : r.table.sorted_units()) ++by_pos[u.pos];
  CHECK(by_pos[Pos::Noun] == expected["nouns"].get<std::size_t>());
  CHECK(by_pos[Pos::Verb] == expected["verbs"].get<std::size_t>());
  CHECK(by_pos[Pos::Adj] == expected["adjectives"].get<std::size_t>());
}

TEST_CASE("one sentence ingested twice doubles frequencies") {
  std::vector<CorpusSource> once{{"a", kCercle}};
  std::vector<CorpusSource> twice{{"a", kCercle}, {"b", kCercle}};
  auto one = ingest(once, "fr", {});
  auto two = ingest(twice, "fr", {});
  CHECK(two.stats.distinct_units == one.stats.distinct_units);
  CHECK(two.stats.dependencies == 2 * one.stats.dependencies);
  for (const auto& [a, b, f] : one.table.pair_frequencies()) CHECK(two.table.pair_frequency(a, b) == 2 * f);
}

TEST_CASE("frequencies add over disjoint corpora") {
  const auto a = read_file(oracle::fixture("fr_regle.conllu"));
  const auto b = read_file(oracle::fixture("fr_poisson.conllu"));
  std::vector<CorpusSource> both{{"a", a}, {"b", b}};
  auto ra = oracle::ingest_text(a, "fr", "a");
  auto rb = oracle::ingest_text(b, "fr", "b");
  auto rab = ingest(both, "fr", {});
  CHECK(freq_sum(rab.table) == freq_sum(ra.table) + freq_sum(rb.table));
  for (const auto& [u, v, f] : rab.table.pair_frequencies()) {
    CHECK(f == ra.table.pair_frequency(u, v) + rb.table.pair_frequency(u, v));
  }
}

TEST_CASE("no surviving record touches a function word, under random configs") {
  const auto text = read_file(oracle::fixture("fr_regle.conllu")) + "\n" + read_file(oracle::fixture("fr_poisson.conllu"));
  std::istringstream in(text);
  auto sentences = parse_corpus(in, "fr");
  std::mt19937_64 rng(7);
  std::bernoulli_distribution coin(0.3);
  for (int trial = 0; trial < 50; ++trial) {
    IngestConfig cfg;
    cfg.function_word_pos.clear();
    for (int p = 0; p < kPosCount; ++p) {
      if (coin(rng)) cfg.function_word_pos.insert(static_cast<Pos>(p));
    }
    cfg.lemmatize_nouns = coin(rng);
    // Map units back to POS through the raw tokens: every record endpoint's
    // POS must lie outside the set.
    for (const auto& r : filter_and_normalize(std::span<const ParsedSentence>(sentences), cfg)) {
      CHECK(cfg.function_word_pos.count(r.head.pos) == 0);
      CHECK(cfg.function_word_pos.count(r.dependent.pos) == 0);
    }
  }
}

TEST_CASE("ingest is deterministic and persists losslessly") {
  auto a = oracle::ingest_fixtures({"fr_regle.conllu", "fr_poisson.conllu"}, "fr");
  auto b = oracle::ingest_fixtures({"fr_regle.conllu", "fr_poisson.conllu"}, "fr");
  CHECK(dependencies_jsonl(a.table) == dependencies_jsonl(b.table));

  auto dir = fs::temp_directory_path() / "lexatlas_test_ingest";
  fs::remove_all(dir);
  save_ingest(a, dir);
  auto loaded = load_ingest(dir);
  CHECK(dependencies_jsonl(loaded.table) == dependencies_jsonl(a.table));
  CHECK(loaded.sentences == a.sentences);
  CHECK(loaded.stats == a.stats);
  fs::remove_all(dir);
}

TEST_CASE("duplicate file stems get distinct document ids") {
  auto r = oracle::ingest_fixtures({"fr_regle.conllu", "fr_regle.conllu"}, "fr");
  CHECK(r.stats.sentences == 20);
  CHECK(r.sentences.find("fr_regle:1"));
  CHECK(r.sentences.find("fr_regle.2:1"));
}

TEST_CASE("parse errors name the offending document") {
  std::vector<CorpusSource> bad{{"good", kChat}, {"broken", "1\tx\n"}};
  try {
    ingest(bad, "fr", {});
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).rfind("broken: ", 0) == 0);
  }
}
