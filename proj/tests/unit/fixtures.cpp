#include "fixtures.hpp"

#include <atomic>
#include <cstdio>

#include <unistd.h>

#include "text/image_io.hpp"

namespace fixtures {

namespace fs = std::filesystem;

TempDir::TempDir(const std::string& stem) {
  static std::atomic<int> counter{0};
  path_ = fs::temp_directory_path() /
          (stem + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter.fetch_add(1)));
  fs::remove_all(path_);
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

Corpus make_corpus(int n_pages, std::uint64_t seed, int width, int height, int targets_per_page) {
  synth::Rng rng(seed);
  const synth::WordShape target = synth::random_word(rng, 5);
  synth::PaperStyle style;
  style.noise = 0.02;
  Corpus c;
  for (int p = 0; p < n_pages; ++p) {
    synth::PlantedPage page = synth::planted_page(rng, width, height, target, targets_per_page, style, 60, 20);
    c.pages.push_back(std::move(page.gray));
    c.targets.push_back(std::move(page.targets));
    c.words.push_back(std::move(page.words));
  }
  return c;
}

text::Project in_memory_project(const Corpus& corpus, const std::string& id) {
  text::Project p;
  p.id = id;
  p.root = fs::temp_directory_path();
  for (std::size_t i = 0; i < corpus.pages.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "page%02zu.png", i);
    p.pages.push_back(std::make_shared<text::Page>(static_cast<int>(i), name, corpus.pages[i]));
    p.page_paths.push_back(name);
  }
  return p;
}

void write_corpus(const Corpus& corpus, const fs::path& dir) {
  fs::create_directories(dir);
  for (std::size_t i = 0; i < corpus.pages.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "page%02zu.png", i);
    text::write_png(dir / name, corpus.pages[i]);
  }
}

}  // namespace fixtures
