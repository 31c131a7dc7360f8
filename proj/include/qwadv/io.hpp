#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace qwadv {

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

// FNV-1a over the raw bytes of a file; used for input fingerprints in run
// manifests.
std::uint64_t fnv1a64(const std::string& bytes);
std::string hex64(std::uint64_t v);

// Runs fn(0..count-1) on up to `jobs` worker threads. Completion order is
// unspecified; callers must write results into per-index slots.
void parallel_for(std::size_t count, int jobs,
                  const std::function<void(std::size_t)>& fn);

std::vector<std::string> split_lines(const std::string& text);

}  // namespace qwadv
