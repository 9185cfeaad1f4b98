#include "doctest.h"
#include "lexatlas/error.hpp"
#include "lexatlas/graph.hpp"

using namespace lexatlas;

namespace {

std::vector<WindowSentence> stream_of(const std::vector<std::string>& sentences) {
  std::vector<WindowSentence> out;
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    WindowSentence s{"s" + std::to_string(i + 1), {}};
    std::size_t start = 0;
    const auto& text = sentences[i];
    while (start < text.size()) {
      auto sp = text.find(' ', start);
      if (sp == std::string::npos) sp = text.size();
      if (sp > start) s.tokens.push_back(text.substr(start, sp - start));
      start = sp + 1;
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<std::string> keys(const ContextGraph& g) {
  std::vector<std::string> out;
  for (const auto& v : g.vertices) out.push_back(v.unit.key);
  return out;
}

}  // namespace

TEST_CASE("sentence window around a single target") {
  WindowConfig cfg;
  cfg.window = std::nullopt;
  cfg.stop_rank = 0;
  cfg.context_quantile = 1.0;
  auto stream = stream_of({"a t b"});
  auto g = build_window_graph("t", stream, cfg);
  CHECK(keys(g) == std::vector<std::string>{"a", "b"});
  REQUIRE(g.edges.size() == 1);
  CHECK(g.edges[0].a == 0);
  CHECK(g.edges[0].b == 1);
  CHECK(g.sentences == std::vector<SentenceId>{"s1"});
  CHECK(g.target.pos == Pos::X);
}

TEST_CASE("the most frequent corpus units are dropped") {
  WindowConfig cfg;
  cfg.window = std::nullopt;
  cfg.stop_rank = 1;
  cfg.context_quantile = 1.0;
  auto stream = stream_of({"le chat t le", "le le chien", "le t souris"});
  auto g = build_window_graph("t", stream, cfg);
  CHECK(keys(g) == std::vector<std::string>{"chat", "souris"});
  cfg.stop_rank = 0;
  g = build_window_graph("t", stream, cfg);
  CHECK(keys(g) == std::vector<std::string>{"chat", "le", "souris"});
}

TEST_CASE("contexts under the retention quantile are dropped") {
  WindowConfig cfg;
  cfg.window = std::nullopt;
  cfg.stop_rank = 0;
  // Co-window counts with t: x=3, y=2, z=1, w=1. Keeping the top half leaves x and y.
  auto stream = stream_of({"t x y z", "t x y", "t x w"});
  cfg.context_quantile = 0.5;
  CHECK(keys(build_window_graph("t", stream, cfg)) == std::vector<std::string>{"x", "y"});
  cfg.context_quantile = 0.25;
  CHECK(keys(build_window_graph("t", stream, cfg)) == std::vector<std::string>{"x"});
  // Ties at the cut are kept together.
  cfg.context_quantile = 0.75;
  CHECK(keys(build_window_graph("t", stream, cfg)) == std::vector<std::string>{"w", "x", "y", "z"});
}

TEST_CASE("token span windows cross sentence boundaries") {
  WindowConfig cfg;
  cfg.window = 3;
  cfg.stop_rank = 0;
  cfg.context_quantile = 1.0;
  auto stream = stream_of({"p q", "t r s"});
  auto g = build_window_graph("t", stream, cfg);
  CHECK(keys(g) == std::vector<std::string>{"q", "r"});
  REQUIRE(g.edges.size() == 1);
  cfg.window = 1;
  g = build_window_graph("t", stream, cfg);
  CHECK(g.vertices.empty());
}

TEST_CASE("every co-windowed pair becomes an edge") {
  WindowConfig cfg;
  cfg.window = std::nullopt;
  cfg.stop_rank = 0;
  cfg.context_quantile = 1.0;
  auto stream = stream_of({"a b t c", "t d"});
  auto g = build_window_graph("t", stream, cfg);
  CHECK(keys(g) == std::vector<std::string>{"a", "b", "c", "d"});
  CHECK(g.edges.size() == 3);
  auto cliques = enumerate_cliques(g, CliquePolicy::PrimaryOnly);
  REQUIRE(cliques.size() == 2);
  CHECK(cliques[0].members.size() == 3);
  CHECK(cliques[0].support == std::vector<SentenceId>{"s1"});
  CHECK(cliques[1].members.size() == 1);
  CHECK(cliques[1].support == std::vector<SentenceId>{"s2"});
}

TEST_CASE("surface tokens fold case") {
  WindowConfig cfg;
  cfg.window = std::nullopt;
  cfg.stop_rank = 0;
  cfg.context_quantile = 1.0;
  auto stream = stream_of({"Maison T Rouge", "maison t"});
  CHECK(keys(build_window_graph("t", stream, cfg)) == std::vector<std::string>{"maison", "rouge"});
  cfg.case_fold = false;
  CHECK(keys(build_window_graph("t", stream, cfg)) == std::vector<std::string>{"maison"});
}

TEST_CASE("window config validation") {
  WindowConfig cfg;
  cfg.context_quantile = 0.0;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg.context_quantile = 0.05;
  cfg.window = 0;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
}
