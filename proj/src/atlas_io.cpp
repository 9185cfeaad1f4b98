#include <fstream>

#include "lexatlas/atlas.hpp"
#include "lexatlas/error.hpp"
#include "lexatlas/fsutil.hpp"

namespace lexatlas {

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr const char* kEntriesFile = "entries.jsonl";
constexpr const char* kSentencesFile = "sentences.jsonl";
constexpr const char* kUnitsFile = "units.jsonl";
constexpr const char* kReportFile = "report.json";
constexpr const char* kManifestFile = "manifest.json";

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j, Eigen::Index rows, Eigen::Index cols) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows) throw ParseError("coordinate row count mismatch");
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) throw ParseError("coordinate column count mismatch");
    for (Eigen::Index k = 0; k < cols; ++k) m(i, k) = row[static_cast<std::size_t>(k)].get<double>();
  }
  return m;
}

std::vector<std::string> units_to_strings(const std::vector<LexicalUnit>& units) {
  std::vector<std::string> out;
  out.reserve(units.size());
  for (const auto& u : units) out.push_back(to_string(u));
  return out;
}

std::vector<LexicalUnit> units_from_json(const json& j) {
  std::vector<LexicalUnit> out;
  for (const auto& s : j) out.push_back(parse_unit(s.get<std::string>()));
  return out;
}

Clique clique_from_json(const json& j, const LexicalUnit& target) {
  Clique c;
  c.id = j.at("id").get<std::string>();
  c.target = target;
  c.kind = parse_relation_kind(j.at("kind").get<std::string>());
  c.members = units_from_json(j.at("members"));
  c.support = j.at("support").get<std::vector<std::string>>();
  return c;
}

SemanticMap map_from_json(const json& j, const LexicalUnit& target) {
  SemanticMap m;
  m.target = target;
  m.clique_ids = j.at("clique_ids").get<std::vector<std::string>>();
  m.contexts = units_from_json(j.at("contexts"));
  m.inertias = j.at("inertias").get<std::vector<double>>();
  m.total_inertia = j.at("total_inertia").get<double>();
  m.axes_2d = j.at("axes_2d").get<std::vector<int>>();
  const auto axes = static_cast<Eigen::Index>(m.inertias.size());
  m.clique_coords = matrix_from_json(j.at("clique_coords"), static_cast<Eigen::Index>(m.clique_ids.size()), axes);
  m.context_coords = matrix_from_json(j.at("context_coords"), static_cast<Eigen::Index>(m.contexts.size()), axes);
  return m;
}

json file_digest(const std::string& content) {
  return json{{"bytes", content.size()}, {"fnv1a64", hex64(fnv1a64(content))}};
}

}  // namespace

json to_json(const Clique& c) {
  return json{{"id", c.id},
              {"target", to_string(c.target)},
              {"kind", to_string(c.kind)},
              {"members", units_to_strings(c.members)},
              {"support", c.support}};
}

json to_json(const SemanticMap& m) {
  return json{{"target", to_string(m.target)},
              {"clique_ids", m.clique_ids},
              {"contexts", units_to_strings(m.contexts)},
              {"clique_coords", matrix_to_json(m.clique_coords)},
              {"context_coords", matrix_to_json(m.context_coords)},
              {"inertias", m.inertias},
              {"total_inertia", m.total_inertia},
              {"axes_2d", m.axes_2d}};
}

json to_json(const AtlasEntry& e) {
  json cliques = json::array();
  for (const auto& c : e.cliques) cliques.push_back(to_json(c));
  return json{{"target", to_string(e.target)}, {"cliques", std::move(cliques)}, {"map", to_json(e.map)}};
}

json to_json(const Sentence& s) { return json{{"id", s.id}, {"lang", s.language}, {"text", s.text}}; }

json to_json(const BuildReport& r) {
  json failures = json::array();
  for (const auto& f : r.failures) {
    failures.push_back(json{{"target", to_string(f.target)}, {"reason", f.reason}, {"partial_count", f.partial_count}});
  }
  return json{{"targets", r.targets},
              {"entries", r.entries},
              {"without_cliques", r.without_cliques},
              {"skipped_hapax", r.skipped_hapax},
              {"failures", std::move(failures)}};
}

void save_atlas(const Atlas& atlas, const fs::path& dir) {
  std::string entries;
  for (const auto& [target, entry] : atlas.entries) {
    entries += to_json(entry).dump();
    entries += '\n';
  }
  std::string sentences;
  for (const auto& s : atlas.sentences.all()) {
    sentences += to_json(s).dump();
    sentences += '\n';
  }
  std::string units;
  for (const auto& [unit, ids] : atlas.unit_index) {
    units += json{{"unit", to_string(unit)}, {"cliques", ids}}.dump();
    units += '\n';
  }
  std::string report = to_json(atlas.report).dump(2) + "\n";

  json manifest = {{"format", kAtlasFormat},
                   {"version", kAtlasFormatVersion},
                   {"language", atlas.language},
                   {"counts",
                    {{"entries", atlas.entries.size()},
                     {"cliques", atlas.clique_index.size()},
                     {"sentences", atlas.sentences.size()}}},
                   {"files",
                    {{kEntriesFile, file_digest(entries)},
                     {kSentencesFile, file_digest(sentences)},
                     {kUnitsFile, file_digest(units)},
                     {kReportFile, file_digest(report)}}}};

  fs::path staged = dir;
  staged += ".tmp";
  fs::remove_all(staged);
  fs::create_directories(staged);
  write_file(staged / kEntriesFile, entries);
  write_file(staged / kSentencesFile, sentences);
  write_file(staged / kUnitsFile, units);
  write_file(staged / kReportFile, report);
  write_file(staged / kManifestFile, manifest.dump(2) + "\n");
  replace_directory(staged, dir);
}

Atlas load_atlas(const fs::path& dir) {
  json manifest;
  try {
    manifest = json::parse(read_file(dir / kManifestFile));
  } catch (const json::exception& e) {
    throw IntegrityError(std::string("unreadable manifest: ") + e.what());
  }
  if (manifest.value("format", std::string()) != kAtlasFormat) throw IntegrityError("not an atlas directory: " + dir.string());
  if (manifest.value("version", -1) != kAtlasFormatVersion) {
    throw IntegrityError("version mismatch: atlas format " + manifest.value("version", json(nullptr)).dump() +
                         ", expected " + std::to_string(kAtlasFormatVersion));
  }

  std::map<std::string, std::string> contents;
  for (const char* name : {kEntriesFile, kSentencesFile, kUnitsFile, kReportFile}) {
    std::string content = read_file(dir / name);
    const json& expected = manifest.at("files").at(name);
    if (expected != file_digest(content)) throw IntegrityError(std::string("checksum failure in ") + name);
    contents[name] = std::move(content);
  }

  auto each_line = [](const std::string& content, const char* name, const auto& fn) {
    std::size_t start = 0;
    std::size_t line_no = 0;
    while (start < content.size()) {
      auto end = content.find('\n', start);
      if (end == std::string::npos) end = content.size();
      ++line_no;
      if (end > start) {
        try {
          fn(json::parse(content.substr(start, end - start)));
        } catch (const json::exception& e) {
          throw ParseError(std::string(name) + ": " + e.what(), line_no);
        } catch (const ParseError& e) {
          throw ParseError(std::string(name) + ": " + e.what(), line_no);
        }
      }
      start = end + 1;
    }
  };

  Atlas atlas;
  atlas.language = manifest.at("language").get<std::string>();
  each_line(contents[kSentencesFile], kSentencesFile, [&](const json& j) {
    atlas.sentences.add(Sentence{j.at("id").get<std::string>(), j.at("text").get<std::string>(),
                                 j.at("lang").get<std::string>()});
  });
  each_line(contents[kEntriesFile], kEntriesFile, [&](const json& j) {
    AtlasEntry e;
    e.target = parse_unit(j.at("target").get<std::string>());
    for (const auto& c : j.at("cliques")) e.cliques.push_back(clique_from_json(c, e.target));
    e.map = map_from_json(j.at("map"), e.target);
    if (!atlas.entries.emplace(e.target, e).second) throw IntegrityError("duplicate entry " + to_string(e.target));
  });
  each_line(contents[kUnitsFile], kUnitsFile, [&](const json& j) {
    atlas.unit_index[parse_unit(j.at("unit").get<std::string>())] = j.at("cliques").get<std::vector<std::string>>();
  });
  try {
    auto r = json::parse(contents[kReportFile]);
    atlas.report.targets = r.at("targets").get<std::size_t>();
    atlas.report.entries = r.at("entries").get<std::size_t>();
    atlas.report.without_cliques = r.at("without_cliques").get<std::size_t>();
    atlas.report.skipped_hapax = r.at("skipped_hapax").get<std::size_t>();
    for (const auto& f : r.at("failures")) {
      atlas.report.failures.push_back(BuildFailure{parse_unit(f.at("target").get<std::string>()),
                                                   f.at("reason").get<std::string>(),
                                                   f.at("partial_count").get<std::size_t>()});
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string(kReportFile) + ": " + e.what());
  }

  for (const auto& [target, entry] : atlas.entries) {
    for (std::size_t k = 0; k < entry.cliques.size(); ++k) {
      if (!atlas.clique_index.try_emplace(entry.cliques[k].id, CliqueRef{target, k}).second) {
        throw IntegrityError("invariant violation: duplicate clique id " + entry.cliques[k].id);
      }
    }
  }
  const auto& counts = manifest.at("counts");
  if (counts.at("entries").get<std::size_t>() != atlas.entries.size() ||
      counts.at("cliques").get<std::size_t>() != atlas.clique_index.size() ||
      counts.at("sentences").get<std::size_t>() != atlas.sentences.size()) {
    throw IntegrityError("invariant violation: manifest counts disagree with records");
  }
  validate_atlas(atlas);
  return atlas;
}

}  // namespace lexatlas
