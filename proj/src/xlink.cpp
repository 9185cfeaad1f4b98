#include "lexatlas/xlink.hpp"

#include <algorithm>
#include <istream>

#include "lexatlas/error.hpp"

namespace lexatlas {

using json = nlohmann::json;

namespace {

const std::set<std::string> kNoTranslations;

std::string_view trim(std::string_view s) {
  const auto* ws = " \t\r";
  auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

// Links for one source clique against all candidate target cliques.
std::vector<SenseLink> links_for(const Clique& source, const std::vector<const AtlasEntry*>& candidates,
                                 const BilingualDictionary& dict, const LinkParams& params) {
  auto translated = translate_clique(source, dict);
  std::vector<SenseLink> out;
  for (const AtlasEntry* entry : candidates) {
    for (const auto& target : entry->cliques) {
      std::multimap<std::string, const LexicalUnit*> by_key;
      for (const auto& m : target.members) by_key.emplace(fold_case(m.key), &m);

      SenseLink link;
      link.source_clique = source.id;
      link.target_clique = target.id;
      link.target_word = entry->target;
      for (const auto& mt : translated) {
        bool hit = false;
        for (const auto& cand : mt.candidates) {
          auto [lo, hi] = by_key.equal_range(cand);
          for (auto it = lo; it != hi; ++it) {
            link.matched.emplace_back(mt.member, *it->second);
            hit = true;
          }
        }
        if (hit) ++link.matched_sources;
      }
      if (link.matched_sources == 0) continue;
      std::sort(link.matched.begin(), link.matched.end());
      link.matched.erase(std::unique(link.matched.begin(), link.matched.end()), link.matched.end());
      link.score = static_cast<double>(link.matched_sources) / static_cast<double>(source.members.size());
      link.accepted = link.score >= params.theta && link.matched_sources >= params.overlap_min;
      out.push_back(std::move(link));
    }
  }
  return out;
}

void sort_links(std::vector<SenseLink>& links) {
  std::sort(links.begin(), links.end(), [](const SenseLink& a, const SenseLink& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.accepted != b.accepted) return a.accepted;
    if (a.source_clique != b.source_clique) return a.source_clique < b.source_clique;
    return a.target_clique < b.target_clique;
  });
}

}  // namespace

void BilingualDictionary::add(std::string_view source, std::string_view target) {
  entries_[fold_case(source)].insert(fold_case(target));
}

const std::set<std::string>& BilingualDictionary::translations(std::string_view source) const {
  auto it = entries_.find(fold_case(source));
  return it == entries_.end() ? kNoTranslations : it->second;
}

BilingualDictionary BilingualDictionary::inverted() const {
  BilingualDictionary inv(target_lang_, source_lang_);
  for (const auto& [src, targets] : entries_) {
    for (const auto& t : targets) inv.entries_[t].insert(src);
  }
  return inv;
}

std::size_t BilingualDictionary::translation_count() const {
  std::size_t n = 0;
  for (const auto& [k, v] : entries_) n += v.size();
  return n;
}

BilingualDictionary load_dictionary(std::istream& in, std::string source_lang, std::string target_lang) {
  BilingualDictionary dict(std::move(source_lang), std::move(target_lang));
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = trim(line);
    if (view.empty() || view.front() == '#') continue;
    auto tab = view.find('\t');
    if (tab == std::string_view::npos || view.find('\t', tab + 1) != std::string_view::npos) {
      throw ParseError("malformed dictionary line: expected source<TAB>target", line_no);
    }
    auto src = trim(view.substr(0, tab));
    auto tgt = trim(view.substr(tab + 1));
    if (src.empty() || tgt.empty()) throw ParseError("malformed dictionary line: empty column", line_no);
    dict.add(src, tgt);
  }
  return dict;
}

std::vector<MemberTranslations> translate_clique(const Clique& clique, const BilingualDictionary& dict) {
  std::vector<MemberTranslations> out;
  out.reserve(clique.members.size());
  for (const auto& m : clique.members) out.push_back(MemberTranslations{m, dict.translations(m.key)});
  return out;
}

void LinkParams::validate() const {
  if (!(theta > 0.0 && theta <= 1.0)) throw InvalidArgument("theta must lie in (0, 1]");
}

std::vector<const AtlasEntry*> candidate_entries(const LexicalUnit& source_word, const Atlas& target_atlas,
                                                 const BilingualDictionary& dict) {
  std::vector<const AtlasEntry*> out;
  for (const auto& translation : dict.translations(source_word.key)) {
    for (const auto* e : entries_for_key(target_atlas, translation)) out.push_back(e);
  }
  std::sort(out.begin(), out.end(), [](const AtlasEntry* a, const AtlasEntry* b) { return a->target < b->target; });
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<SenseLink> match_cliques(const AtlasEntry& source, const Atlas& target_atlas,
                                     const BilingualDictionary& dict, const LinkParams& params) {
  params.validate();
  const auto candidates = candidate_entries(source.target, target_atlas, dict);
  std::vector<std::vector<SenseLink>> per_clique(source.cliques.size());
  const auto n = static_cast<long>(source.cliques.size());
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < n; ++i) {
    per_clique[static_cast<std::size_t>(i)] = links_for(source.cliques[static_cast<std::size_t>(i)], candidates, dict, params);
  }
  std::vector<SenseLink> links;
  for (auto& part : per_clique) links.insert(links.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
  sort_links(links);
  return links;
}

std::vector<SenseLink> match_word(const Atlas& source_atlas, const LexicalUnit& word, const Atlas& target_atlas,
                                  const BilingualDictionary& dict, const LinkParams& params) {
  auto it = source_atlas.entries.find(word);
  if (it == source_atlas.entries.end()) throw NotFound("no atlas entry for " + to_string(word));
  return match_cliques(it->second, target_atlas, dict, params);
}

std::vector<LinkedSentences> cross_navigate(const Atlas& source_atlas, const std::string& clique_id,
                                            const Atlas& target_atlas, const BilingualDictionary& dict,
                                            const LinkParams& params) {
  params.validate();
  const Clique* clique = source_atlas.find_clique(clique_id);
  if (!clique) throw NotFound("unknown clique " + clique_id);
  auto links = links_for(*clique, candidate_entries(clique->target, target_atlas, dict), dict, params);
  sort_links(links);
  std::vector<LinkedSentences> out;
  for (auto& link : links) {
    if (!link.accepted) continue;
    auto sentences = sentences_for_clique(target_atlas, link.target_clique);
    out.push_back(LinkedSentences{std::move(link), std::move(sentences)});
  }
  return out;
}

json to_json(const SenseLink& link) {
  json matched = json::array();
  for (const auto& [s, t] : link.matched) matched.push_back(json::array({to_string(s), to_string(t)}));
  return json{{"source_clique", link.source_clique},
              {"target_clique", link.target_clique},
              {"target_word", to_string(link.target_word)},
              {"matched", std::move(matched)},
              {"matched_sources", link.matched_sources},
              {"score", link.score},
              {"accepted", link.accepted}};
}

}  // namespace lexatlas
