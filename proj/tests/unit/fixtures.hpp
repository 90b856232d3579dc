#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "synth.hpp"
#include "text/project.hpp"

namespace fixtures {

class TempDir {
 public:
  explicit TempDir(const std::string& stem);
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

struct Corpus {
  std::vector<text::Gray8Image> pages;
  /// Ink boxes of the repeated word, per page.
  std::vector<std::vector<text::BoundingBox>> targets;
  std::vector<std::vector<text::BoundingBox>> words;
};

/// `n_pages` pages of handwriting-like lines sharing one repeated word.
Corpus make_corpus(int n_pages, std::uint64_t seed, int width = 420, int height = 260, int targets_per_page = 2);

text::Project in_memory_project(const Corpus& corpus, const std::string& id = "mem");

/// Write the pages as page00.png, page01.png, ...
void write_corpus(const Corpus& corpus, const std::filesystem::path& dir);

}  // namespace fixtures
