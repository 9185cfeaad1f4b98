#include "lexatlas/fsutil.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "lexatlas/error.hpp"

namespace lexatlas {

namespace fs = std::filesystem;

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFound("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error("write failed for " + path.string());
}

void for_each_line(const fs::path& path, const std::function<void(std::string_view, std::size_t)>& fn) {
  std::string content = read_file(path);
  std::string_view view(content);
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < view.size()) {
    auto end = view.find('\n', start);
    if (end == std::string_view::npos) end = view.size();
    ++line_no;
    auto line = view.substr(start, end - start);
    if (!line.empty()) fn(line, line_no);
    start = end + 1;
  }
}

std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

void replace_directory(const fs::path& staged, const fs::path& target) {
  if (fs::exists(target)) {
    fs::path old = target;
    old += ".old";
    fs::remove_all(old);
    fs::rename(target, old);
    fs::rename(staged, target);
    fs::remove_all(old);
  } else {
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    fs::rename(staged, target);
  }
}

}  // namespace lexatlas
