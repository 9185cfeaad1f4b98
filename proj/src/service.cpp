#include "lexatlas/service.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iostream>

#include "httplib.h"
#include "lexatlas/error.hpp"
#include "lexatlas/fsutil.hpp"

namespace lexatlas {

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr const char* kJson = "application/json; charset=utf-8";

HttpResponse ok(const json& body) { return HttpResponse{200, body.dump() + "\n"}; }

HttpResponse error_response(int status, const std::string& message) {
  return HttpResponse{status, json{{"error", message}, {"status", status}}.dump() + "\n"};
}

std::vector<std::string> split_path(std::string_view path) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (start <= path.size()) {
    auto slash = path.find('/', start);
    if (slash == std::string_view::npos) slash = path.size();
    if (slash > start) parts.emplace_back(path.substr(start, slash - start));
    start = slash + 1;
  }
  return parts;
}

const std::string* param(const QueryParams& params, const std::string& name) {
  auto it = params.find(name);
  return it == params.end() ? nullptr : &it->second;
}

LinkParams link_params(const QueryParams& params) {
  LinkParams p;
  if (const auto* theta = param(params, "theta")) {
    std::size_t used = 0;
    try {
      p.theta = std::stod(*theta, &used);
    } catch (const std::exception&) {
      throw InvalidArgument("theta is not a number");
    }
    if (used != theta->size()) throw InvalidArgument("theta is not a number");
  }
  if (const auto* overlap = param(params, "min_overlap")) {
    std::size_t value = 0;
    auto [ptr, ec] = std::from_chars(overlap->data(), overlap->data() + overlap->size(), value);
    if (ec != std::errc() || ptr != overlap->data() + overlap->size()) {
      throw InvalidArgument("min_overlap must be a non-negative integer");
    }
    p.overlap_min = value;
  }
  p.validate();
  return p;
}

// "key#POS" selects one entry; a bare key picks the first entry with that key.
const AtlasEntry* resolve_entry(const Atlas& atlas, const std::string& text) {
  if (text.find('#') != std::string::npos) {
    try {
      auto found = query_word(atlas, parse_unit(text));
      return found ? found->entry : nullptr;
    } catch (const ParseError&) {
    }
  }
  auto entries = entries_for_key(atlas, text);
  return entries.empty() ? nullptr : entries.front();
}

json sentences_json(const std::vector<Sentence>& sentences) {
  json out = json::array();
  for (const auto& s : sentences) out.push_back(to_json(s));
  return out;
}

}  // namespace

ServiceConfig ServiceConfig::from_json_text(std::string_view text, const fs::path& base_dir) {
  ServiceConfig cfg;
  auto resolve = [&](const std::string& p) {
    fs::path path(p);
    return path.is_absolute() ? path : base_dir / path;
  };
  try {
    auto j = json::parse(text);
    if (j.contains("bind")) {
      auto bind = j.at("bind").get<std::string>();
      auto colon = bind.rfind(':');
      if (colon == std::string::npos) throw ParseError("bind must be host:port");
      cfg.host = bind.substr(0, colon);
      cfg.port = std::stoi(bind.substr(colon + 1));
    }
    for (const auto& [lang, path] : j.at("atlases").items()) cfg.atlases[lang] = resolve(path.get<std::string>());
    if (j.contains("dictionaries")) {
      for (const auto& d : j.at("dictionaries")) {
        cfg.dictionaries.push_back(
            {d.at("src").get<std::string>(), d.at("tgt").get<std::string>(), resolve(d.at("path").get<std::string>())});
      }
    }
    if (j.contains("cors")) cfg.cors_allowlist = j.at("cors").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw ParseError(std::string("invalid service config: ") + e.what());
  } catch (const std::logic_error& e) {
    throw ParseError(std::string("invalid service config: ") + e.what());
  }
  return cfg;
}

void ServiceConfig::validate() const {
  if (atlases.empty()) throw InvalidArgument("service config lists no atlas");
  for (const auto& [lang, path] : atlases) {
    if (!fs::exists(path / "manifest.json")) throw InvalidArgument("atlas for " + lang + " not found at " + path.string());
  }
  for (const auto& d : dictionaries) {
    if (!atlases.count(d.source) || !atlases.count(d.target)) {
      throw InvalidArgument("dictionary " + d.source + "->" + d.target + " refers to an unconfigured language");
    }
    if (!fs::exists(d.path)) throw InvalidArgument("dictionary not found at " + d.path.string());
  }
}

AtlasService::AtlasService(std::map<std::string, Atlas> atlases,
                           std::map<std::pair<std::string, std::string>, BilingualDictionary> dictionaries)
    : atlases_(std::move(atlases)), dictionaries_(std::move(dictionaries)) {
  if (atlases_.empty()) throw InvalidArgument("service needs at least one atlas");
}

AtlasService AtlasService::load(const ServiceConfig& config) {
  config.validate();
  std::map<std::string, Atlas> atlases;
  for (const auto& [lang, path] : config.atlases) atlases.emplace(lang, load_atlas(path));
  std::map<std::pair<std::string, std::string>, BilingualDictionary> dicts;
  for (const auto& d : config.dictionaries) {
    std::ifstream in(d.path);
    if (!in) throw NotFound("cannot open dictionary " + d.path.string());
    dicts.emplace(std::make_pair(d.source, d.target), load_dictionary(in, d.source, d.target));
  }
  return AtlasService(std::move(atlases), std::move(dicts));
}

const Atlas& AtlasService::atlas(const std::string& lang) const {
  auto it = atlases_.find(lang);
  if (it == atlases_.end()) throw NotFound("unknown language " + lang);
  return it->second;
}

const BilingualDictionary& AtlasService::dictionary(const std::string& src, const std::string& tgt) const {
  auto it = dictionaries_.find({src, tgt});
  if (it == dictionaries_.end()) throw NotFound("no dictionary for " + src + "->" + tgt);
  return it->second;
}

HttpResponse AtlasService::handle(std::string_view path, const QueryParams& params) const {
  try {
    auto parts = split_path(path);
    if (parts.size() < 2 || parts[0] != "v1") return error_response(404, "no such endpoint");
    if (parts.size() == 2 && parts[1] == "langs") return langs();
    if (parts[1] == "link") {
      if (parts.size() == 5) return link_word(parts[2], parts[3], parts[4], params);
      if (parts.size() == 7 && parts[4] == "clique" && parts[6] == "sentences") {
        return link_sentences(parts[2], parts[3], parts[5], params);
      }
      return error_response(404, "no such endpoint");
    }
    if (parts.size() == 4 && parts[2] == "map") return word_map(parts[1], parts[3]);
    if (parts.size() == 5 && parts[2] == "clique" && parts[4] == "sentences") return clique_sentences(parts[1], parts[3]);
    return error_response(404, "no such endpoint");
  } catch (const NotFound& e) {
    return error_response(404, e.what());
  } catch (const InvalidArgument& e) {
    return error_response(400, e.what());
  } catch (const ParseError& e) {
    return error_response(400, e.what());
  } catch (const std::exception& e) {
    return error_response(500, e.what());
  }
}

HttpResponse AtlasService::langs() const {
  json langs = json::array();
  for (const auto& [lang, atlas] : atlases_) {
    langs.push_back(json{{"lang", lang},
                         {"entries", atlas.entries.size()},
                         {"cliques", atlas.clique_count()},
                         {"sentences", atlas.sentences.size()}});
  }
  json links = json::array();
  for (const auto& [key, dict] : dictionaries_) {
    links.push_back(json{{"src", key.first}, {"tgt", key.second}, {"entries", dict.entry_count()}});
  }
  return ok(json{{"format", kAtlasFormat}, {"version", kAtlasFormatVersion}, {"langs", langs}, {"links", links}});
}

HttpResponse AtlasService::word_map(const std::string& lang, const std::string& unit) const {
  const Atlas& a = atlas(lang);
  const AtlasEntry* entry = resolve_entry(a, unit);
  if (!entry) return error_response(404, "unknown unit " + unit + " in " + lang);
  // Display points on the first two axes; missing axes collapse to 0.
  const auto& map = entry->map;
  json points = json::array();
  for (std::size_t i = 0; i < entry->cliques.size(); ++i) {
    json xy = json::array();
    for (int k = 0; k < 2; ++k) {
      double v = 0.0;
      if (k < static_cast<int>(map.axes_2d.size())) v = map.clique_coords(static_cast<Eigen::Index>(i), map.axes_2d[k]);
      xy.push_back(v);
    }
    points.push_back(json{{"clique", entry->cliques[i].id}, {"xy", std::move(xy)}});
  }
  return ok(json{{"version", kAtlasFormatVersion}, {"lang", lang}, {"entry", to_json(*entry)}, {"points", points}});
}

HttpResponse AtlasService::clique_sentences(const std::string& lang, const std::string& id) const {
  const Atlas& a = atlas(lang);
  auto sentences = sentences_for_clique(a, id);
  return ok(json{{"version", kAtlasFormatVersion},
                 {"lang", lang},
                 {"clique", to_json(*a.find_clique(id))},
                 {"sentences", sentences_json(sentences)}});
}

HttpResponse AtlasService::link_word(const std::string& src, const std::string& tgt, const std::string& unit,
                                     const QueryParams& params) const {
  LinkParams p = link_params(params);
  const Atlas& source = atlas(src);
  const Atlas& target = atlas(tgt);
  const auto& dict = dictionary(src, tgt);
  const AtlasEntry* entry = resolve_entry(source, unit);
  if (!entry) return error_response(404, "unknown unit " + unit + " in " + src);
  json links = json::array();
  for (const auto& link : match_cliques(*entry, target, dict, p)) links.push_back(to_json(link));
  return ok(json{{"version", kAtlasFormatVersion},
                 {"src", src},
                 {"tgt", tgt},
                 {"word", to_string(entry->target)},
                 {"theta", p.theta},
                 {"min_overlap", p.overlap_min},
                 {"links", links}});
}

HttpResponse AtlasService::link_sentences(const std::string& src, const std::string& tgt, const std::string& id,
                                          const QueryParams& params) const {
  LinkParams p = link_params(params);
  const Atlas& source = atlas(src);
  const Atlas& target = atlas(tgt);
  const auto& dict = dictionary(src, tgt);
  json groups = json::array();
  for (const auto& g : cross_navigate(source, id, target, dict, p)) {
    groups.push_back(json{{"link", to_json(g.link)}, {"sentences", sentences_json(g.sentences)}});
  }
  return ok(json{{"version", kAtlasFormatVersion},
                 {"src", src},
                 {"tgt", tgt},
                 {"clique", id},
                 {"theta", p.theta},
                 {"min_overlap", p.overlap_min},
                 {"groups", groups}});
}

void AtlasService::mount(httplib::Server& server, std::vector<std::string> cors_allowlist) const {
  server.Get(R"(/v1/.*)", [this](const httplib::Request& req, httplib::Response& res) {
    QueryParams params(req.params.begin(), req.params.end());
    auto r = handle(req.path, params);
    res.status = r.status;
    res.set_content(r.body, kJson);
  });
  server.set_post_routing_handler([allow = std::move(cors_allowlist)](const httplib::Request& req, httplib::Response& res) {
    if (!req.has_header("Origin")) return;
    auto origin = req.get_header_value("Origin");
    bool any = std::find(allow.begin(), allow.end(), "*") != allow.end();
    if (any || std::find(allow.begin(), allow.end(), origin) != allow.end()) {
      res.set_header("Access-Control-Allow-Origin", any ? "*" : origin);
      res.set_header("Vary", "Origin");
    }
  });
}

void serve(const ServiceConfig& config) {
  AtlasService service = AtlasService::load(config);
  httplib::Server server;
  service.mount(server, config.cors_allowlist);
  std::cerr << "serving " << service.atlases().size() << " atlas(es) on " << config.host << ":" << config.port << "\n";
  if (!server.listen(config.host, config.port)) throw Error("cannot listen on " + config.host + ":" + std::to_string(config.port));
}

}  // namespace lexatlas
