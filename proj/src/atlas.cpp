#include "lexatlas/atlas.hpp"

#include <algorithm>
#include <exception>
#include <set>

#include "lexatlas/error.hpp"

namespace lexatlas {

const Clique* Atlas::find_clique(const std::string& id) const {
  auto it = clique_index.find(id);
  if (it == clique_index.end()) return nullptr;
  auto entry = entries.find(it->second.target);
  if (entry == entries.end() || it->second.position >= entry->second.cliques.size()) return nullptr;
  const Clique& c = entry->second.cliques[it->second.position];
  return c.id == id ? &c : nullptr;
}

bool Atlas::operator==(const Atlas& o) const {
  return language == o.language && entries == o.entries && sentences == o.sentences && unit_index == o.unit_index &&
         clique_index == o.clique_index && report == o.report;
}

void rebuild_indexes(Atlas& atlas) {
  atlas.unit_index.clear();
  atlas.clique_index.clear();
  for (const auto& [target, entry] : atlas.entries) {
    for (std::size_t k = 0; k < entry.cliques.size(); ++k) {
      const auto& c = entry.cliques[k];
      if (!atlas.clique_index.try_emplace(c.id, CliqueRef{target, k}).second) {
        throw IntegrityError("duplicate clique id " + c.id);
      }
      for (const auto& m : c.members) atlas.unit_index[m].push_back(c.id);
    }
  }
  for (auto& [unit, ids] : atlas.unit_index) std::sort(ids.begin(), ids.end());
}

void validate_atlas(const Atlas& atlas) {
  auto fail = [](const std::string& what) { throw IntegrityError("invariant violation: " + what); };
  std::set<std::string> ids;
  for (const auto& [target, entry] : atlas.entries) {
    if (entry.target != target) fail("entry keyed by " + to_string(target) + " holds " + to_string(entry.target));
    if (entry.cliques.empty()) fail("entry " + to_string(target) + " has no clique");
    std::set<LexicalUnit> columns;
    for (const auto& c : entry.cliques) {
      if (c.target != target) fail("clique " + c.id + " belongs to another target");
      if (c.members.empty()) fail("clique " + c.id + " is empty");
      if (!std::is_sorted(c.members.begin(), c.members.end()) ||
          std::adjacent_find(c.members.begin(), c.members.end()) != c.members.end()) {
        fail("clique " + c.id + " members not sorted and unique");
      }
      if (std::find(c.members.begin(), c.members.end(), target) != c.members.end()) {
        fail("clique " + c.id + " contains its own target");
      }
      if (c.id != clique_id(c.target, c.kind, c.members)) fail("clique id " + c.id + " does not match its content");
      if (!ids.insert(c.id).second) fail("duplicate clique id " + c.id);
      if (c.support.empty()) fail("clique " + c.id + " has no support");
      for (const auto& s : c.support) {
        if (!atlas.sentences.find(s)) fail("clique " + c.id + " cites unknown sentence " + s);
      }
      columns.insert(c.members.begin(), c.members.end());
    }
    const auto& map = entry.map;
    if (map.target != target) fail("map of " + to_string(target) + " has another target");
    if (map.clique_ids.size() != entry.cliques.size()) fail("map rows differ from cliques for " + to_string(target));
    for (std::size_t k = 0; k < entry.cliques.size(); ++k) {
      if (map.clique_ids[k] != entry.cliques[k].id) fail("map row order differs for " + to_string(target));
    }
    if (!std::equal(map.contexts.begin(), map.contexts.end(), columns.begin(), columns.end())) {
      fail("map columns differ from clique members for " + to_string(target));
    }
    const auto axes = static_cast<Eigen::Index>(map.inertias.size());
    if (map.clique_coords.rows() != static_cast<Eigen::Index>(map.clique_ids.size()) ||
        map.clique_coords.cols() != axes || map.context_coords.rows() != static_cast<Eigen::Index>(map.contexts.size()) ||
        map.context_coords.cols() != axes) {
      fail("map coordinate shape mismatch for " + to_string(target));
    }
    for (std::size_t a = 1; a < map.inertias.size(); ++a) {
      if (map.inertias[a] > map.inertias[a - 1]) fail("inertias not non-increasing for " + to_string(target));
    }
    if (map.axes_2d.size() > 2 || map.axes_2d.size() > map.inertias.size()) {
      fail("display axes out of range for " + to_string(target));
    }
  }

  Atlas derived;
  derived.entries = atlas.entries;
  rebuild_indexes(derived);
  if (derived.unit_index != atlas.unit_index) fail("unit index does not invert clique membership");
  if (derived.clique_index != atlas.clique_index) fail("clique index does not match entries");
}

namespace {

std::size_t record_count(const DependencyTable& table, DependencyTable::UnitId id) {
  std::size_t n = 0;
  for (auto u : table.neighbors(id)) n += table.pair(id, u)->count;
  return n;
}

struct TargetOutcome {
  std::optional<AtlasEntry> entry;
  std::optional<BuildFailure> failure;
  bool hapax = false;
};

TargetOutcome build_target(const LexicalUnit& target, const DependencyTable& table, const AtlasConfig& config) {
  TargetOutcome out;
  try {
    if (config.skip_hapax) {
      auto id = table.find(target);
      if (id && record_count(table, *id) <= 1) {
        out.hapax = true;
        return out;
      }
    }
    out.entry = build_entry(target, table, config);
  } catch (const BudgetExceeded& e) {
    out.failure = BuildFailure{target, e.what(), e.partial_count()};
  } catch (const Error& e) {
    out.failure = BuildFailure{target, e.what(), 0};
  }
  return out;
}

}  // namespace

std::optional<AtlasEntry> build_entry(const LexicalUnit& target, const DependencyTable& table,
                                      const AtlasConfig& config) {
  ContextGraph graph = build_context_graph(target, table, config.graph);
  auto policy = config.graph.include_secondary ? CliquePolicy::PrimaryAndSecondary : CliquePolicy::PrimaryOnly;
  auto cliques = enumerate_cliques(graph, policy, config.graph.max_cliques);
  if (cliques.empty()) return std::nullopt;
  AtlasEntry entry;
  entry.target = target;
  entry.map = correspondence_analysis(build_incidence(cliques), config.ca_tolerance, Execution::Serial);
  entry.map.target = target;
  entry.cliques = std::move(cliques);
  return entry;
}

Atlas build_atlas(const DependencyTable& table, const SentenceStore& sentences,
                  const std::optional<std::vector<LexicalUnit>>& targets, const AtlasConfig& config, Execution exec) {
  if (table.empty()) throw InvalidArgument("cannot build an atlas from an empty dependency table");
  config.graph.validate();

  std::vector<LexicalUnit> todo = targets ? *targets : table.sorted_units();
  std::sort(todo.begin(), todo.end());
  todo.erase(std::unique(todo.begin(), todo.end()), todo.end());

  std::vector<TargetOutcome> outcomes(todo.size());
  const auto n = static_cast<long>(todo.size());
  if (exec == Execution::Parallel) {
#pragma omp parallel for schedule(dynamic, 4)
    for (long i = 0; i < n; ++i) {
      outcomes[static_cast<std::size_t>(i)] = build_target(todo[static_cast<std::size_t>(i)], table, config);
    }
  } else {
    for (long i = 0; i < n; ++i) {
      outcomes[static_cast<std::size_t>(i)] = build_target(todo[static_cast<std::size_t>(i)], table, config);
    }
  }

  Atlas atlas;
  atlas.sentences = sentences;
  atlas.language = config.language;
  if (atlas.language.empty() && !sentences.all().empty()) atlas.language = sentences.all().front().language;
  atlas.report.targets = todo.size();
  for (auto& o : outcomes) {
    if (o.hapax) {
      ++atlas.report.skipped_hapax;
    } else if (o.failure) {
      atlas.report.failures.push_back(std::move(*o.failure));
    } else if (o.entry) {
      LexicalUnit key = o.entry->target;
      atlas.entries.emplace(std::move(key), std::move(*o.entry));
    } else {
      ++atlas.report.without_cliques;
    }
  }
  atlas.report.entries = atlas.entries.size();
  rebuild_indexes(atlas);
  return atlas;
}

std::optional<WordResult> query_word(const Atlas& atlas, const LexicalUnit& unit) {
  auto it = atlas.entries.find(unit);
  if (it == atlas.entries.end()) return std::nullopt;
  for (const auto& c : it->second.cliques) {
    if (atlas.find_clique(c.id) != &c) throw IntegrityError("clique " + c.id + " is not resolvable through the index");
  }
  return WordResult{&it->second};
}

std::vector<const AtlasEntry*> entries_for_key(const Atlas& atlas, const std::string& key) {
  std::vector<const AtlasEntry*> out;
  for (auto it = atlas.entries.lower_bound(LexicalUnit{key, Pos::Noun});
       it != atlas.entries.end() && it->first.key == key; ++it) {
    out.push_back(&it->second);
  }
  return out;
}

std::vector<Sentence> sentences_for_clique(const Atlas& atlas, const std::string& id) {
  const Clique* c = atlas.find_clique(id);
  if (!c) throw NotFound("unknown clique " + id);
  std::vector<Sentence> out;
  out.reserve(c->support.size());
  for (const auto& s : c->support) {
    const Sentence* sentence = atlas.sentences.find(s);
    if (!sentence) throw IntegrityError("clique " + id + " cites unknown sentence " + s);
    out.push_back(*sentence);
  }
  return out;
}

}  // namespace lexatlas
