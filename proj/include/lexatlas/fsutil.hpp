#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>

namespace lexatlas {

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

// Calls fn(line, 1-based line number) for each non-empty line.
void for_each_line(const std::filesystem::path& path,
                   const std::function<void(std::string_view, std::size_t)>& fn);

std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed = 0xcbf29ce484222325ull);
std::string hex64(std::uint64_t value);

// Replaces `target` with the directory `staged` using renames so readers see
// either the old or the new tree.
void replace_directory(const std::filesystem::path& staged, const std::filesystem::path& target);

}  // namespace lexatlas
