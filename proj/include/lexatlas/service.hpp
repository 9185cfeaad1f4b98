#pragma once

// Read-only HTTP facade over loaded atlases and dictionaries.

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lexatlas/atlas.hpp"
#include "lexatlas/xlink.hpp"

namespace httplib {
class Server;
}

namespace lexatlas {

struct ServiceConfig {
  struct DictionarySpec {
    std::string source;
    std::string target;
    std::filesystem::path path;
  };

  std::string host = "127.0.0.1";
  int port = 8080;
  std::map<std::string, std::filesystem::path> atlases;  // language -> atlas dir
  std::vector<DictionarySpec> dictionaries;
  std::vector<std::string> cors_allowlist;

  // JSON document; relative paths resolve against `base_dir`.
  static ServiceConfig from_json_text(std::string_view text, const std::filesystem::path& base_dir);

  // Throws InvalidArgument when no atlas is configured or a file is missing.
  void validate() const;
};

struct HttpResponse {
  int status = 200;
  std::string body;
};

using QueryParams = std::multimap<std::string, std::string>;

class AtlasService {
 public:
  AtlasService(std::map<std::string, Atlas> atlases,
               std::map<std::pair<std::string, std::string>, BilingualDictionary> dictionaries);

  static AtlasService load(const ServiceConfig& config);

  // Dispatches a GET on a decoded path. Never throws.
  HttpResponse handle(std::string_view path, const QueryParams& params = {}) const;

  // Registers the v1 routes and the CORS allowlist on `server`.
  void mount(httplib::Server& server, std::vector<std::string> cors_allowlist = {}) const;

  const std::map<std::string, Atlas>& atlases() const { return atlases_; }

 private:
  HttpResponse langs() const;
  HttpResponse word_map(const std::string& lang, const std::string& unit) const;
  HttpResponse clique_sentences(const std::string& lang, const std::string& id) const;
  HttpResponse link_word(const std::string& src, const std::string& tgt, const std::string& unit,
                         const QueryParams& params) const;
  HttpResponse link_sentences(const std::string& src, const std::string& tgt, const std::string& id,
                              const QueryParams& params) const;

  const Atlas& atlas(const std::string& lang) const;
  const BilingualDictionary& dictionary(const std::string& src, const std::string& tgt) const;

  std::map<std::string, Atlas> atlases_;
  std::map<std::pair<std::string, std::string>, BilingualDictionary> dictionaries_;
};

// Loads everything and blocks serving on config.host:config.port.
void serve(const ServiceConfig& config);

}  // namespace lexatlas
