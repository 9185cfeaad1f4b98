#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <unordered_map>

#include "lexatlas/error.hpp"
#include "lexatlas/graph.hpp"

namespace lexatlas {

void WindowConfig::validate() const {
  if (window && *window < 1) throw InvalidArgument("window span must be >= 1");
  if (!(context_quantile > 0.0 && context_quantile <= 1.0)) {
    throw InvalidArgument("context_quantile must lie in (0, 1]");
  }
}

ContextGraph build_window_graph(std::string_view target, std::span<const WindowSentence> stream,
                                const WindowConfig& config) {
  config.validate();
  auto norm = [&](std::string_view s) { return config.case_fold ? fold_case(s) : std::string(s); };
  const std::string target_key = norm(target);

  struct Position {
    std::string key;
    std::uint32_t sentence;
  };
  std::vector<Position> positions;
  std::vector<std::pair<std::size_t, std::size_t>> sentence_span;  // [begin, end) per sentence
  std::unordered_map<std::string, std::size_t> corpus_freq;
  for (std::uint32_t s = 0; s < stream.size(); ++s) {
    std::size_t begin = positions.size();
    for (const auto& tok : stream[s].tokens) {
      positions.push_back({norm(tok), s});
      ++corpus_freq[positions.back().key];
    }
    sentence_span.emplace_back(begin, positions.size());
  }

  std::vector<std::pair<std::string, std::size_t>> ranked(corpus_freq.begin(), corpus_freq.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  std::set<std::string> stop;
  for (std::size_t i = 0; i < ranked.size() && i < config.stop_rank; ++i) stop.insert(ranked[i].first);

  struct Window {
    std::uint32_t sentence;
    std::set<std::string> contexts;
  };
  std::vector<Window> windows;
  for (std::size_t i = 0; i < positions.size(); ++i) {
    if (positions[i].key != target_key) continue;
    std::size_t lo, hi;
    if (config.window) {
      const std::size_t left = (*config.window - 1) / 2;
      const std::size_t right = *config.window / 2;
      lo = i >= left ? i - left : 0;
      hi = std::min(positions.size(), i + right + 1);
    } else {
      std::tie(lo, hi) = sentence_span[positions[i].sentence];
    }
    Window w{positions[i].sentence, {}};
    for (std::size_t k = lo; k < hi; ++k) {
      const auto& key = positions[k].key;
      if (key == target_key || stop.count(key)) continue;
      w.contexts.insert(key);
    }
    windows.push_back(std::move(w));
  }

  std::map<std::string, std::size_t> cofreq;
  for (const auto& w : windows) {
    for (const auto& c : w.contexts) ++cofreq[c];
  }

  std::set<std::string> retained;
  if (!cofreq.empty()) {
    std::vector<std::size_t> freqs;
    for (const auto& [k, f] : cofreq) freqs.push_back(f);
    std::sort(freqs.rbegin(), freqs.rend());
    auto keep = static_cast<std::size_t>(std::ceil(config.context_quantile * static_cast<double>(freqs.size()) - 1e-9));
    keep = std::clamp<std::size_t>(keep, 1, freqs.size());
    const std::size_t threshold = freqs[keep - 1];
    for (const auto& [k, f] : cofreq) {
      if (f >= threshold) retained.insert(k);
    }
  }

  ContextGraph graph;
  graph.target = LexicalUnit{target_key, Pos::X};
  std::map<std::string, std::uint32_t> local;
  for (const auto& key : retained) {
    local[key] = static_cast<std::uint32_t>(graph.vertices.size());
    graph.vertices.push_back({LexicalUnit{key, Pos::X}, RelationKind::Primary, {}});
  }

  std::set<std::uint32_t> used_sentences;
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::set<std::uint32_t>> edges;
  std::vector<std::set<std::uint32_t>> vertex_support(graph.vertices.size());
  for (const auto& w : windows) {
    std::vector<std::uint32_t> members;
    for (const auto& c : w.contexts) {
      auto it = local.find(c);
      if (it != local.end()) members.push_back(it->second);
    }
    if (members.empty()) continue;
    used_sentences.insert(w.sentence);
    for (std::size_t a = 0; a < members.size(); ++a) {
      vertex_support[members[a]].insert(w.sentence);
      for (std::size_t b = a + 1; b < members.size(); ++b) edges[{members[a], members[b]}].insert(w.sentence);
    }
  }

  std::map<std::uint32_t, std::uint32_t> remap;
  for (auto s : used_sentences) {
    remap[s] = static_cast<std::uint32_t>(graph.sentences.size());
    graph.sentences.push_back(stream[s].id);
  }
  auto localize = [&](const std::set<std::uint32_t>& support) {
    ContextGraph::Support out;
    for (auto s : support) out.push_back(remap.at(s));
    return out;
  };
  for (std::size_t v = 0; v < graph.vertices.size(); ++v) graph.vertices[v].support = localize(vertex_support[v]);
  for (const auto& [key, support] : edges) {
    graph.edges.push_back({key.first, key.second, RelationKind::Primary, localize(support)});
  }
  return graph;
}

}  // namespace lexatlas
