#include "lexatlas/graph.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_map>

#include "lexatlas/error.hpp"
#include "lexatlas/fsutil.hpp"

namespace lexatlas {

namespace {

using UnitId = DependencyTable::UnitId;
using SentenceIndex = DependencyTable::SentenceIndex;

struct Candidate {
  UnitId id = 0;
  RelationKind relation = RelationKind::Primary;
  std::vector<SentenceIndex> support;
  std::vector<UnitId> intermediates;
};

std::vector<SentenceIndex> sorted_union(const std::vector<SentenceIndex>& a, const std::vector<SentenceIndex>& b) {
  std::vector<SentenceIndex> out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

std::vector<SentenceIndex> sorted_intersection(const std::vector<SentenceIndex>& a,
                                               const std::vector<SentenceIndex>& b) {
  std::vector<SentenceIndex> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

std::vector<Candidate> primary_candidates(UnitId target, const DependencyTable& table, const GraphConfig& config) {
  std::vector<Candidate> out;
  for (UnitId u : table.neighbors(target)) {
    if (u == target) continue;
    const auto* p = table.pair(target, u);
    if (p->count < config.min_pair_frequency) continue;
    out.push_back(Candidate{u, RelationKind::Primary, p->sentences, {}});
  }
  return out;
}

std::vector<Candidate> secondary_candidates(UnitId target, const DependencyTable& table, const GraphConfig& config,
                                            const std::vector<Candidate>& primary) {
  if (!config.include_secondary) return {};
  std::set<UnitId> primary_ids;
  for (const auto& c : primary) primary_ids.insert(c.id);

  std::map<UnitId, Candidate> found;
  for (const auto& mid : primary) {
    for (UnitId v : table.neighbors(mid.id)) {
      if (v == target || v == mid.id || primary_ids.count(v)) continue;
      const auto* hop = table.pair(mid.id, v);
      if (hop->count < config.min_pair_frequency) continue;
      auto shared = sorted_intersection(mid.support, hop->sentences);
      if (shared.empty()) continue;
      auto& c = found[v];
      c.id = v;
      c.relation = RelationKind::Secondary;
      c.support = sorted_union(c.support, shared);
      c.intermediates.push_back(mid.id);
    }
  }
  std::vector<Candidate> out;
  out.reserve(found.size());
  for (auto& [id, c] : found) out.push_back(std::move(c));
  return out;
}

std::vector<SentenceId> to_ids(const DependencyTable& table, const std::vector<SentenceIndex>& support) {
  std::vector<SentenceId> out;
  out.reserve(support.size());
  for (auto s : support) out.push_back(table.sentence_id(s));
  return out;
}

void sort_by_unit(std::vector<Candidate>& cands, const DependencyTable& table) {
  std::sort(cands.begin(), cands.end(),
            [&](const Candidate& a, const Candidate& b) { return table.unit(a.id) < table.unit(b.id); });
}

// Growable bitset sized once per enumeration.
class Bits {
 public:
  explicit Bits(std::size_t n = 0) : words_((n + 63) / 64, 0) {}
  void set(std::size_t i) { words_[i / 64] |= (1ull << (i % 64)); }
  void reset(std::size_t i) { words_[i / 64] &= ~(1ull << (i % 64)); }
  bool test(std::size_t i) const { return (words_[i / 64] >> (i % 64)) & 1ull; }
  bool none() const {
    for (auto w : words_) {
      if (w) return false;
    }
    return true;
  }
  std::size_t count_and(const Bits& o) const {
    std::size_t n = 0;
    for (std::size_t k = 0; k < words_.size(); ++k) n += static_cast<std::size_t>(__builtin_popcountll(words_[k] & o.words_[k]));
    return n;
  }
  Bits operator&(const Bits& o) const {
    Bits r = *this;
    for (std::size_t k = 0; k < words_.size(); ++k) r.words_[k] &= o.words_[k];
    return r;
  }
  Bits and_not(const Bits& o) const {
    Bits r = *this;
    for (std::size_t k = 0; k < words_.size(); ++k) r.words_[k] &= ~o.words_[k];
    return r;
  }
  Bits operator|(const Bits& o) const {
    Bits r = *this;
    for (std::size_t k = 0; k < words_.size(); ++k) r.words_[k] |= o.words_[k];
    return r;
  }
  template <typename Fn>
  void for_each(Fn&& fn) const {
    for (std::size_t k = 0; k < words_.size(); ++k) {
      auto w = words_[k];
      while (w) {
        auto bit = static_cast<std::size_t>(__builtin_ctzll(w));
        fn(k * 64 + bit);
        w &= w - 1;
      }
    }
  }

 private:
  std::vector<std::uint64_t> words_;
};

// Bron-Kerbosch with Tomita pivoting.
class CliqueFinder {
 public:
  CliqueFinder(std::vector<Bits> adjacency, std::size_t budget)
      : adjacency_(std::move(adjacency)), budget_(budget) {}

  std::vector<std::vector<std::uint32_t>> run() {
    const std::size_t n = adjacency_.size();
    Bits all(n);
    for (std::size_t i = 0; i < n; ++i) all.set(i);
    std::vector<std::uint32_t> r;
    expand(r, all, Bits(n));
    return std::move(found_);
  }

 private:
  void expand(std::vector<std::uint32_t>& r, Bits p, Bits x) {
    if (p.none() && x.none()) {
      if (found_.size() >= budget_) {
        throw BudgetExceeded("clique budget of " + std::to_string(budget_) + " exceeded", found_.size());
      }
      auto clique = r;
      std::sort(clique.begin(), clique.end());
      found_.push_back(std::move(clique));
      return;
    }
    std::size_t pivot = 0;
    std::size_t best = 0;
    bool have = false;
    (p | x).for_each([&](std::size_t u) {
      std::size_t c = p.count_and(adjacency_[u]);
      if (!have || c > best) {
        pivot = u;
        best = c;
        have = true;
      }
    });
    Bits candidates = p.and_not(adjacency_[pivot]);
    candidates.for_each([&](std::size_t v) {
      r.push_back(static_cast<std::uint32_t>(v));
      expand(r, p & adjacency_[v], x & adjacency_[v]);
      r.pop_back();
      p.reset(v);
      x.set(v);
    });
  }

  std::vector<Bits> adjacency_;
  std::size_t budget_;
  std::vector<std::vector<std::uint32_t>> found_;
};

}  // namespace

std::string_view to_string(RelationKind kind) { return kind == RelationKind::Primary ? "primary" : "secondary"; }

RelationKind parse_relation_kind(std::string_view text) {
  if (text == "primary") return RelationKind::Primary;
  if (text == "secondary") return RelationKind::Secondary;
  throw ParseError("unknown relation kind '" + std::string(text) + "'");
}

void GraphConfig::validate() const {
  if (min_pair_frequency < 1) throw InvalidArgument("min_pair_frequency must be >= 1");
  if (max_vertices < 1) throw InvalidArgument("max_vertices must be >= 1");
  if (max_cliques < 1) throw InvalidArgument("max_cliques must be >= 1");
}

std::vector<Neighbor> primary_neighbors(const LexicalUnit& target, const DependencyTable& table,
                                        const GraphConfig& config) {
  config.validate();
  auto t = table.find(target);
  if (!t) return {};
  auto cands = primary_candidates(*t, table, config);
  sort_by_unit(cands, table);
  std::vector<Neighbor> out;
  for (const auto& c : cands) out.push_back(Neighbor{table.unit(c.id), to_ids(table, c.support)});
  return out;
}

std::vector<SecondaryNeighbor> secondary_neighbors(const LexicalUnit& target, const DependencyTable& table,
                                                   const GraphConfig& config) {
  config.validate();
  auto t = table.find(target);
  if (!t) return {};
  auto primary = primary_candidates(*t, table, config);
  auto cands = secondary_candidates(*t, table, config, primary);
  sort_by_unit(cands, table);
  std::vector<SecondaryNeighbor> out;
  for (const auto& c : cands) {
    SecondaryNeighbor n{table.unit(c.id), {}, to_ids(table, c.support)};
    for (auto m : c.intermediates) n.intermediates.push_back(table.unit(m));
    std::sort(n.intermediates.begin(), n.intermediates.end());
    out.push_back(std::move(n));
  }
  return out;
}

const ContextGraph::Edge* ContextGraph::edge(std::uint32_t a, std::uint32_t b) const {
  if (a > b) std::swap(a, b);
  auto it = std::lower_bound(edges.begin(), edges.end(), std::make_pair(a, b), [](const Edge& e, const auto& key) {
    return std::make_pair(e.a, e.b) < key;
  });
  if (it == edges.end() || it->a != a || it->b != b) return nullptr;
  return &*it;
}

std::vector<SentenceId> ContextGraph::support_ids(const Support& support) const {
  std::vector<SentenceId> out;
  out.reserve(support.size());
  for (auto s : support) out.push_back(sentences.at(s));
  return out;
}

ContextGraph build_context_graph(const LexicalUnit& target, const DependencyTable& table, const GraphConfig& config) {
  config.validate();
  auto t = table.find(target);
  if (!t) throw NotFound("unknown lexical unit " + to_string(target));

  auto cands = primary_candidates(*t, table, config);
  auto secondary = secondary_candidates(*t, table, config, cands);
  cands.insert(cands.end(), std::make_move_iterator(secondary.begin()), std::make_move_iterator(secondary.end()));

  if (cands.size() > config.max_vertices) {
    std::sort(cands.begin(), cands.end(), [&](const Candidate& a, const Candidate& b) {
      if (a.support.size() != b.support.size()) return a.support.size() > b.support.size();
      if (a.relation != b.relation) return a.relation == RelationKind::Primary;
      return table.unit(a.id) < table.unit(b.id);
    });
    cands.resize(config.max_vertices);
  }
  sort_by_unit(cands, table);

  std::unordered_map<UnitId, std::uint32_t> local;
  for (std::uint32_t i = 0; i < cands.size(); ++i) local[cands[i].id] = i;

  struct EdgeAcc {
    RelationKind kind = RelationKind::Primary;
    std::vector<SentenceIndex> support;
  };
  std::map<std::pair<std::uint32_t, std::uint32_t>, EdgeAcc> edges;

  for (std::uint32_t i = 0; i < cands.size(); ++i) {
    for (UnitId u : table.neighbors(cands[i].id)) {
      auto it = local.find(u);
      if (it == local.end() || it->second <= i) continue;
      const auto* p = table.pair(cands[i].id, u);
      if (p->count < config.min_pair_frequency) continue;
      edges[{i, it->second}] = EdgeAcc{RelationKind::Primary, p->sentences};
    }
  }

  if (config.include_secondary) {
    std::vector<SentenceIndex> scan;
    for (const auto& c : cands) scan = sorted_union(scan, table.unit_sentences(c.id));
    std::map<UnitId, std::vector<UnitId>> hops;
    for (SentenceIndex s : scan) {
      hops.clear();
      for (const auto& [a, b] : table.sentence_pairs(s)) {
        if (a == b) continue;
        if (table.pair(a, b)->count < config.min_pair_frequency) continue;
        hops[a].push_back(b);
        hops[b].push_back(a);
      }
      for (const auto& [mid, ends] : hops) {
        std::vector<std::uint32_t> present;
        for (UnitId e : ends) {
          auto it = local.find(e);
          if (it != local.end()) present.push_back(it->second);
        }
        std::sort(present.begin(), present.end());
        present.erase(std::unique(present.begin(), present.end()), present.end());
        for (std::size_t x = 0; x < present.size(); ++x) {
          for (std::size_t y = x + 1; y < present.size(); ++y) {
            auto [it, inserted] = edges.try_emplace({present[x], present[y]}, EdgeAcc{RelationKind::Secondary, {}});
            if (it->second.kind == RelationKind::Secondary && (it->second.support.empty() || it->second.support.back() != s)) {
              it->second.support.push_back(s);
            }
          }
        }
      }
    }
  }

  // Compact sentence indexes to a graph-local table in corpus order.
  std::vector<SentenceIndex> used;
  for (const auto& c : cands) used = sorted_union(used, c.support);
  for (const auto& [key, e] : edges) used = sorted_union(used, e.support);
  std::unordered_map<SentenceIndex, std::uint32_t> remap;
  ContextGraph graph;
  graph.target = target;
  for (std::uint32_t i = 0; i < used.size(); ++i) {
    remap[used[i]] = i;
    graph.sentences.push_back(table.sentence_id(used[i]));
  }
  auto localize = [&](const std::vector<SentenceIndex>& support) {
    ContextGraph::Support out;
    out.reserve(support.size());
    for (auto s : support) out.push_back(remap.at(s));
    return out;
  };
  for (const auto& c : cands) graph.vertices.push_back({table.unit(c.id), c.relation, localize(c.support)});
  for (const auto& [key, e] : edges) graph.edges.push_back({key.first, key.second, e.kind, localize(e.support)});
  return graph;
}

std::string clique_id(const LexicalUnit& target, RelationKind kind, std::span<const LexicalUnit> members) {
  std::string payload = to_string(target);
  payload += '\x1f';
  payload += to_string(kind);
  for (const auto& m : members) {
    payload += '\x1f';
    payload += to_string(m);
  }
  return "c" + hex64(fnv1a64(payload));
}

std::vector<Clique> enumerate_cliques(const ContextGraph& graph, CliquePolicy policy, std::size_t max_cliques) {
  std::vector<std::uint32_t> admitted;
  std::vector<int> slot(graph.vertices.size(), -1);
  for (std::uint32_t i = 0; i < graph.vertices.size(); ++i) {
    if (policy == CliquePolicy::PrimaryOnly && graph.vertices[i].relation != RelationKind::Primary) continue;
    slot[i] = static_cast<int>(admitted.size());
    admitted.push_back(i);
  }
  if (admitted.empty()) return {};
  std::vector<Bits> adjacency(admitted.size(), Bits(admitted.size()));
  for (const auto& e : graph.edges) {
    if (policy == CliquePolicy::PrimaryOnly && e.kind != RelationKind::Primary) continue;
    if (slot[e.a] < 0 || slot[e.b] < 0) continue;
    adjacency[static_cast<std::size_t>(slot[e.a])].set(static_cast<std::size_t>(slot[e.b]));
    adjacency[static_cast<std::size_t>(slot[e.b])].set(static_cast<std::size_t>(slot[e.a]));
  }

  auto raw = CliqueFinder(std::move(adjacency), max_cliques).run();

  std::vector<Clique> out;
  out.reserve(raw.size());
  for (const auto& local_members : raw) {
    Clique c;
    c.target = graph.target;
    bool all_primary = true;
    ContextGraph::Support support;
    for (std::size_t k = 0; k < local_members.size(); ++k) {
      const auto v = admitted[local_members[k]];
      const auto& vertex = graph.vertices[v];
      c.members.push_back(vertex.unit);
      if (vertex.relation != RelationKind::Primary) all_primary = false;
      ContextGraph::Support merged;
      std::set_union(support.begin(), support.end(), vertex.support.begin(), vertex.support.end(),
                     std::back_inserter(merged));
      support = std::move(merged);
      for (std::size_t l = k + 1; l < local_members.size(); ++l) {
        const auto* e = graph.edge(v, admitted[local_members[l]]);
        if (e->kind != RelationKind::Primary) all_primary = false;
      }
    }
    c.kind = all_primary ? RelationKind::Primary : RelationKind::Secondary;
    c.support = graph.support_ids(support);
    c.id = clique_id(c.target, c.kind, c.members);
    out.push_back(std::move(c));
  }
  std::sort(out.begin(), out.end(), [](const Clique& a, const Clique& b) { return a.members < b.members; });
  return out;
}

}  // namespace lexatlas
