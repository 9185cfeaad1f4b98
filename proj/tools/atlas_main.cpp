// atlas: command-line front end (ingest, cliques, build, link, serve).

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "lexatlas/atlas.hpp"
#include "lexatlas/corpus.hpp"
#include "lexatlas/error.hpp"
#include "lexatlas/fsutil.hpp"
#include "lexatlas/service.hpp"
#include "lexatlas/xlink.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace lexatlas;

namespace {

std::vector<LexicalUnit> read_targets(const fs::path& path) {
  std::vector<LexicalUnit> out;
  for_each_line(path, [&](std::string_view line, std::size_t) {
    if (line.front() == '#') return;
    out.push_back(parse_unit(line));
  });
  return out;
}

// Picks the entry for "key#POS" or the first entry with a bare key.
LexicalUnit resolve_word(const Atlas& atlas, const std::string& text) {
  if (text.find('#') != std::string::npos) {
    try {
      return parse_unit(text);
    } catch (const ParseError&) {
    }
  }
  auto entries = entries_for_key(atlas, text);
  if (entries.empty()) throw NotFound("no atlas entry for " + text);
  return entries.front()->target;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lexico-semantic atlas builder and navigator"};
  app.require_subcommand(1);

  // ingest
  auto* ingest_cmd = app.add_subcommand("ingest", "Parse CoNLL-U files into a dependency table");
  std::string lang;
  std::string ingest_config;
  std::string ingest_out;
  std::vector<std::string> inputs;
  ingest_cmd->add_option("--lang", lang, "ISO 639-1 language code")->required();
  ingest_cmd->add_option("--config", ingest_config, "JSON ingest configuration");
  ingest_cmd->add_option("--out", ingest_out, "Output directory")->required();
  ingest_cmd->add_option("files", inputs, "CoNLL-U files")->required()->check(CLI::ExistingFile);

  // shared graph options
  GraphConfig graph;
  bool primary_only = false;
  auto add_graph_options = [&](CLI::App* cmd) {
    cmd->add_flag("--primary-only", primary_only, "Ignore secondary relations");
    cmd->add_option("--min-freq", graph.min_pair_frequency, "Minimum pair frequency")->check(CLI::PositiveNumber);
    cmd->add_option("--max-vertices", graph.max_vertices, "Context graph vertex cap")->check(CLI::PositiveNumber);
    cmd->add_option("--max-cliques", graph.max_cliques, "Clique budget per target")->check(CLI::PositiveNumber);
  };

  // cliques
  auto* cliques_cmd = app.add_subcommand("cliques", "Print the maximal cliques of one target");
  std::string cliques_in;
  std::string target_text;
  cliques_cmd->add_option("--in", cliques_in, "Ingest directory")->required()->check(CLI::ExistingDirectory);
  cliques_cmd->add_option("--target", target_text, "Target unit as lemma#POS")->required();
  add_graph_options(cliques_cmd);

  // build
  auto* build_cmd = app.add_subcommand("build", "Build an atlas from an ingest directory");
  std::string build_in;
  std::string build_out;
  std::string targets_file;
  bool skip_hapax = false;
  bool serial = false;
  build_cmd->add_option("--in", build_in, "Ingest directory")->required()->check(CLI::ExistingDirectory);
  build_cmd->add_option("--out", build_out, "Atlas directory")->required();
  build_cmd->add_option("--targets", targets_file, "File with one lemma#POS per line")->check(CLI::ExistingFile);
  build_cmd->add_flag("--skip-hapax", skip_hapax, "Skip targets seen in a single record");
  build_cmd->add_flag("--serial", serial, "Disable the parallel build");
  add_graph_options(build_cmd);

  // link
  auto* link_cmd = app.add_subcommand("link", "Align the senses of a word across two atlases");
  std::string src_dir;
  std::string tgt_dir;
  std::string dict_path;
  std::string word;
  LinkParams link_params;
  link_cmd->add_option("--src", src_dir, "Source-language atlas")->required()->check(CLI::ExistingDirectory);
  link_cmd->add_option("--tgt", tgt_dir, "Target-language atlas")->required()->check(CLI::ExistingDirectory);
  link_cmd->add_option("--dict", dict_path, "Bilingual dictionary (TSV)")->required()->check(CLI::ExistingFile);
  link_cmd->add_option("--word", word, "Source word (lemma or lemma#POS)")->required();
  link_cmd->add_option("--theta", link_params.theta, "Score threshold in (0,1]");
  link_cmd->add_option("--min-overlap", link_params.overlap_min, "Minimum matched contexts");

  // serve
  auto* serve_cmd = app.add_subcommand("serve", "Serve atlases over HTTP");
  std::string serve_config;
  serve_cmd->add_option("--config", serve_config, "Service configuration (JSON)")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);
  graph.include_secondary = !primary_only;

  try {
    if (*ingest_cmd) {
      IngestConfig cfg;
      if (!ingest_config.empty()) cfg = IngestConfig::from_json_text(read_file(ingest_config));
      std::vector<fs::path> files(inputs.begin(), inputs.end());
      auto result = ingest_files(files, lang, cfg);
      save_ingest(result, ingest_out);
      std::cout << stats_json(result.stats);
    } else if (*cliques_cmd) {
      auto ing = load_ingest(cliques_in);
      auto target = parse_unit(target_text);
      auto g = build_context_graph(target, ing.table, graph);
      auto policy = graph.include_secondary ? CliquePolicy::PrimaryAndSecondary : CliquePolicy::PrimaryOnly;
      for (const auto& c : enumerate_cliques(g, policy, graph.max_cliques)) std::cout << to_json(c).dump() << "\n";
    } else if (*build_cmd) {
      auto ing = load_ingest(build_in);
      AtlasConfig cfg;
      cfg.language = ing.stats.language;
      cfg.graph = graph;
      cfg.skip_hapax = skip_hapax;
      std::optional<std::vector<LexicalUnit>> targets;
      if (!targets_file.empty()) targets = read_targets(targets_file);
      auto atlas = build_atlas(ing.table, ing.sentences, targets, cfg,
                               serial ? Execution::Serial : Execution::Parallel);
      save_atlas(atlas, build_out);
      std::cout << to_json(atlas.report).dump(2) << "\n";
    } else if (*link_cmd) {
      auto src = load_atlas(src_dir);
      auto tgt = load_atlas(tgt_dir);
      std::ifstream in(dict_path);
      auto dict = load_dictionary(in, src.language, tgt.language);
      auto unit = resolve_word(src, word);
      for (const auto& link : match_word(src, unit, tgt, dict, link_params)) {
        std::cout << to_json(link).dump() << "\n";
      }
    } else if (*serve_cmd) {
      auto cfg = ServiceConfig::from_json_text(read_file(serve_config), fs::path(serve_config).parent_path());
      serve(cfg);
    }
  } catch (const Error& e) {
    std::cerr << "atlas: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
