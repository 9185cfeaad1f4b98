#pragma once

// Context graphs around a target unit and their maximal cliques.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lexatlas/corpus.hpp"
#include "lexatlas/unit.hpp"

namespace lexatlas {

enum class RelationKind : std::uint8_t { Primary, Secondary };

std::string_view to_string(RelationKind kind);
RelationKind parse_relation_kind(std::string_view text);

struct GraphConfig {
  std::size_t min_pair_frequency = 1;
  bool include_secondary = true;
  std::size_t max_vertices = 500;
  // Upper bound on maximal cliques per target before enumeration gives up.
  std::size_t max_cliques = 100000;

  void validate() const;
};

struct Neighbor {
  LexicalUnit unit;
  std::vector<SentenceId> support;  // corpus order
};

struct SecondaryNeighbor {
  LexicalUnit unit;
  std::vector<LexicalUnit> intermediates;  // sorted
  std::vector<SentenceId> support;         // corpus order
};

// Units with at least min_pair_frequency records linking them to `target`,
// either direction, sorted by unit. Empty when the target is absent.
std::vector<Neighbor> primary_neighbors(const LexicalUnit& target, const DependencyTable& table,
                                        const GraphConfig& config);

// Units reached through exactly one intermediate: target-m and m-v both
// direct relations (each meeting min_pair_frequency) occurring together in one
// sentence. Never overlaps primary_neighbors. Empty when include_secondary
// is false.
std::vector<SecondaryNeighbor> secondary_neighbors(const LexicalUnit& target, const DependencyTable& table,
                                                   const GraphConfig& config);

struct ContextGraph {
  using Support = std::vector<std::uint32_t>;  // sorted indexes into `sentences`

  struct Vertex {
    LexicalUnit unit;
    RelationKind relation = RelationKind::Primary;  // link to the target
    Support support;
    bool operator==(const Vertex&) const = default;
  };

  struct Edge {
    std::uint32_t a = 0;  // a < b, indexes into `vertices`
    std::uint32_t b = 0;
    RelationKind kind = RelationKind::Primary;
    Support support;
    bool operator==(const Edge&) const = default;
  };

  LexicalUnit target;
  std::vector<SentenceId> sentences;  // corpus order
  std::vector<Vertex> vertices;       // sorted by unit
  std::vector<Edge> edges;            // sorted by (a, b)

  const Edge* edge(std::uint32_t a, std::uint32_t b) const;
  std::vector<SentenceId> support_ids(const Support& support) const;
  bool operator==(const ContextGraph&) const = default;
};

// Throws NotFound("unknown lexical unit ...") when the target has no record.
ContextGraph build_context_graph(const LexicalUnit& target, const DependencyTable& table,
                                 const GraphConfig& config);

enum class CliquePolicy : std::uint8_t { PrimaryOnly, PrimaryAndSecondary };

struct Clique {
  std::string id;
  LexicalUnit target;
  std::vector<LexicalUnit> members;  // sorted
  RelationKind kind = RelationKind::Primary;
  std::vector<SentenceId> support;  // union of member-target supports, corpus order

  bool operator==(const Clique&) const = default;
};

// Stable identifier derived from (target, kind, sorted members).
std::string clique_id(const LexicalUnit& target, RelationKind kind, std::span<const LexicalUnit> members);

// Maximal cliques of the subgraph admitted by the policy. PrimaryOnly keeps
// primary vertices and primary edges; PrimaryAndSecondary admits everything.
// A clique is tagged primary when all its members and internal edges are.
// Output sorted by members. Throws BudgetExceeded past max_cliques.
std::vector<Clique> enumerate_cliques(const ContextGraph& graph, CliquePolicy policy,
                                      std::size_t max_cliques = GraphConfig{}.max_cliques);

// Legacy co-occurrence mode.

struct WindowSentence {
  SentenceId id;
  std::vector<std::string> tokens;
};

struct WindowConfig {
  // Token span centred on each target occurrence; nullopt bounds the window
  // by the target's sentence.
  std::optional<std::size_t> window = 25;
  std::size_t stop_rank = 500;
  double context_quantile = 0.05;
  bool case_fold = true;

  void validate() const;
};

// Units are the (case-folded) surface tokens tagged Pos::X. Every pair of
// retained units sharing a window becomes a primary edge.
ContextGraph build_window_graph(std::string_view target, std::span<const WindowSentence> stream,
                                const WindowConfig& config);

}  // namespace lexatlas
