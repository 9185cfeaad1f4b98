#include <filesystem>
#include <fstream>
#include <thread>

#include "doctest.h"
#include "json.hpp"
#include "lexatlas/error.hpp"
#include "lexatlas/fsutil.hpp"
#include "lexatlas/service.hpp"
#include "oracles.hpp"

// After Eigen: <resolv.h> defines a _res macro that clashes with Eigen internals.
#include "httplib.h"

using namespace lexatlas;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

Atlas atlas_from(const std::string& file, const std::string& lang) {
  auto r = oracle::ingest_fixtures({file}, lang);
  return build_atlas(r.table, r.sentences, std::nullopt, {});
}

AtlasService fixture_service() {
  std::map<std::string, Atlas> atlases;
  atlases.emplace("fr", atlas_from("fr_poisson.conllu", "fr"));
  atlases.emplace("en", atlas_from("en_fish.conllu", "en"));
  std::ifstream in(oracle::fixture("fr_en.tsv"));
  std::map<std::pair<std::string, std::string>, BilingualDictionary> dicts;
  dicts.emplace(std::make_pair("fr", "en"), load_dictionary(in, "fr", "en"));
  return AtlasService(std::move(atlases), std::move(dicts));
}

json body(const HttpResponse& r) { return json::parse(r.body); }

}  // namespace

TEST_CASE("languages listing") {
  auto svc = fixture_service();
  auto r = svc.handle("/v1/langs");
  REQUIRE(r.status == 200);
  auto j = body(r);
  REQUIRE(j["langs"].size() == 2);
  for (const auto& l : j["langs"]) {
    const auto& a = svc.atlases().at(l["lang"].get<std::string>());
    CHECK(l["entries"] == a.entries.size());
    CHECK(l["cliques"] == a.clique_count());
    CHECK(l["sentences"] == a.sentences.size());
  }
  CHECK(j["links"].size() == 1);
  CHECK_THROWS_AS(AtlasService({}, {}), InvalidArgument);
}

TEST_CASE("word map") {
  auto svc = fixture_service();
  CHECK(svc.handle("/v1/fr/map/requin").status == 404);
  CHECK(svc.handle("/v1/de/map/poisson").status == 404);
  auto r = svc.handle("/v1/fr/map/poisson#NOUN");
  REQUIRE(r.status == 200);
  auto j = body(r);
  const auto& entry = svc.atlases().at("fr").entries.at({"poisson", Pos::Noun});
  CHECK(j["entry"]["cliques"].size() == entry.cliques.size());
  CHECK(j["entry"]["target"] == "poisson#NOUN");
  REQUIRE(entry.map.axis_count() >= 2);
  REQUIRE(j["points"].size() == entry.cliques.size());
  for (std::size_t i = 0; i < entry.cliques.size(); ++i) {
    CHECK(j["points"][i]["clique"] == entry.cliques[i].id);
    CHECK(j["points"][i]["xy"][0] == entry.map.clique_coords(static_cast<Eigen::Index>(i), 0));
    CHECK(j["points"][i]["xy"][1] == entry.map.clique_coords(static_cast<Eigen::Index>(i), 1));
  }
  // Bare key resolves to the same entry.
  CHECK(body(svc.handle("/v1/fr/map/poisson"))["entry"] == j["entry"]);
}

TEST_CASE("every clique id from a map resolves") {
  auto svc = fixture_service();
  for (const auto& [lang, atlas] : svc.atlases()) {
    for (const auto& [unit, entry] : atlas.entries) {
      auto m = body(svc.handle("/v1/" + lang + "/map/" + to_string(unit)));
      for (const auto& c : m["entry"]["cliques"]) {
        auto r = svc.handle("/v1/" + lang + "/clique/" + c["id"].get<std::string>() + "/sentences");
        REQUIRE(r.status == 200);
        CHECK(body(r)["sentences"].size() == c["support"].size());
      }
    }
  }
  CHECK(svc.handle("/v1/fr/clique/c0000000000000000/sentences").status == 404);
}

TEST_CASE("link endpoint") {
  auto svc = fixture_service();
  CHECK(svc.handle("/v1/link/fr/en/poisson", {{"theta", "0"}}).status == 400);
  CHECK(svc.handle("/v1/link/fr/en/poisson", {{"theta", "1.5"}}).status == 400);
  CHECK(svc.handle("/v1/link/fr/en/poisson", {{"theta", "abc"}}).status == 400);
  CHECK(svc.handle("/v1/link/fr/en/poisson", {{"min_overlap", "-1"}}).status == 400);
  CHECK(svc.handle("/v1/link/en/fr/fish").status == 404);
  CHECK(svc.handle("/v1/link/fr/en/requin").status == 404);

  auto r = svc.handle("/v1/link/fr/en/poisson", {{"theta", "0.4"}, {"min_overlap", "3"}});
  REQUIRE(r.status == 200);
  const auto links = body(r);
  std::vector<double> scores;
  for (const auto& l : links["links"]) {
    if (l["accepted"].get<bool>()) scores.push_back(l["score"].get<double>());
  }
  REQUIRE(scores.size() == 2);
  CHECK(std::abs(scores[0] - 4.0 / 7.0) <= 1e-12);
  CHECK(std::abs(scores[1] - 4.0 / 9.0) <= 1e-12);

  auto first = links["links"][0];
  auto s = svc.handle("/v1/link/fr/en/clique/" + first["source_clique"].get<std::string>() + "/sentences",
                      {{"theta", "0.4"}});
  REQUIRE(s.status == 200);
  auto groups = body(s)["groups"];
  REQUIRE(groups.size() == 1);
  CHECK(groups[0]["sentences"].size() == 2);
}

TEST_CASE("unknown routes") {
  auto svc = fixture_service();
  CHECK(svc.handle("/").status == 404);
  CHECK(svc.handle("/v2/langs").status == 404);
  CHECK(svc.handle("/v1/fr/nothing/here").status == 404);
  CHECK(svc.handle("/v1/link/fr/en/x/y").status == 404);
  CHECK(body(svc.handle("/v1/fr/map/requin"))["status"] == 404);
}

TEST_CASE("service config") {
  auto base = fs::temp_directory_path() / "lexatlas_cfg";
  fs::remove_all(base);
  fs::create_directories(base);
  auto cfg = ServiceConfig::from_json_text(
      R"({"bind": "0.0.0.0:9000", "atlases": {"fr": "atlas_fr"},
          "dictionaries": [{"src": "fr", "tgt": "en", "path": "/abs/d.tsv"}], "cors": ["http://x"]})",
      base);
  CHECK(cfg.host == "0.0.0.0");
  CHECK(cfg.port == 9000);
  CHECK(cfg.atlases.at("fr") == base / "atlas_fr");
  CHECK(cfg.dictionaries.at(0).path == fs::path("/abs/d.tsv"));
  CHECK(cfg.cors_allowlist == std::vector<std::string>{"http://x"});
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);

  auto none = ServiceConfig::from_json_text(R"({"atlases": {}})", base);
  CHECK_THROWS_AS(none.validate(), InvalidArgument);
  CHECK_THROWS_AS(AtlasService::load(none), InvalidArgument);
  CHECK_THROWS_AS(ServiceConfig::from_json_text(R"({"bind": "nope", "atlases": {}})", base), ParseError);
  CHECK_THROWS_AS(ServiceConfig::from_json_text("{", base), ParseError);

  save_atlas(atlas_from("fr_poisson.conllu", "fr"), base / "atlas_fr");
  auto ok = ServiceConfig::from_json_text(R"({"atlases": {"fr": "atlas_fr"}})", base);
  CHECK_NOTHROW(ok.validate());
  CHECK(AtlasService::load(ok).atlases().size() == 1);
  fs::remove_all(base);
}

TEST_CASE("CORS allowlist over a live server") {
  auto svc = fixture_service();
  httplib::Server server;
  svc.mount(server, {"http://allowed.example"});
  int port = server.bind_to_any_port("127.0.0.1");
  REQUIRE(port > 0);
  std::thread t([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  httplib::Client client("127.0.0.1", port);
  auto allowed = client.Get("/v1/langs", {{"Origin", "http://allowed.example"}});
  REQUIRE(allowed);
  CHECK(allowed->status == 200);
  CHECK(allowed->get_header_value("Access-Control-Allow-Origin") == "http://allowed.example");
  auto denied = client.Get("/v1/langs", {{"Origin", "http://other.example"}});
  REQUIRE(denied);
  CHECK_FALSE(denied->has_header("Access-Control-Allow-Origin"));
  auto map = client.Get("/v1/fr/map/poisson%23NOUN");
  REQUIRE(map);
  CHECK(map->status == 200);
  auto missing = client.Get("/v1/fr/map/requin");
  REQUIRE(missing);
  CHECK(missing->status == 404);

  server.stop();
  t.join();
}
