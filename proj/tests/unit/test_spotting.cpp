#include <doctest.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <set>
#include <thread>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "synth.hpp"
#include "text/error.hpp"
#include "text/search.hpp"
#include "text/snapbox.hpp"
#include "text/spotting.hpp"

using namespace text;

namespace {

WordTemplate random_template(synth::Rng& rng, int w, int h) {
  WordTemplate t;
  t.cleaned = synth::random_image(rng, w, h);
  t.mask = BinaryImage(w, h, 1);
  return t;
}

}  // namespace

TEST_CASE("ncc examples") {
  synth::Rng rng(3);
  const WordTemplate t = random_template(rng, 30, 16);
  CHECK(ncc(t.cleaned, t.mask, t.cleaned) == doctest::Approx(1.0).epsilon(1e-9));
  GrayImage inverse = t.cleaned;
  for (float& v : inverse.pixels()) v = 1.0f - v;
  CHECK(ncc(t.cleaned, t.mask, inverse) == doctest::Approx(-1.0).epsilon(1e-9));
  GrayImage brighter = t.cleaned;
  for (float& v : brighter.pixels()) v += 0.2f;
  CHECK(std::abs(ncc(t.cleaned, t.mask, brighter) - 1.0) <= 1e-6);
  CHECK(ncc(t.cleaned, t.mask, GrayImage(30, 16, 0.3f)) == 0.0);
  CHECK_THROWS_AS(ncc(t.cleaned, t.mask, GrayImage(29, 16, 0.3f)), Error);
  BinaryImage tiny(30, 16, 0);
  tiny.at(15, 8) = 1;
  CHECK(ncc(t.cleaned, tiny, t.cleaned) == doctest::Approx(1.0));
  BinaryImage none(30, 16, 0);
  CHECK_THROWS_AS(ncc(t.cleaned, none, t.cleaned), Error);
}

TEST_CASE("stride-1 score map equals the dense oracle, with negatives") {
  EngineConfig cfg;
  cfg.stride = 1;
  synth::Rng rng(12);
  const Page page(0, "p", synth::quantize(synth::random_image(rng, 96, 80)));
  QueryModel q;
  q.query_id = "q";
  q.scales = {1.0};
  q.positives = {random_template(rng, 20, 12), random_template(rng, 20, 12)};
  q.negatives = {random_template(rng, 20, 12)};
  const ScoreMap map = score_map(q, page, cfg);
  const GrayImage& cleaned = page.layers(cfg)->cleaned;
  const auto p0 = oracle::dense_ncc_map(cleaned, q.positives[0].cleaned, q.positives[0].mask);
  const auto p1 = oracle::dense_ncc_map(cleaned, q.positives[1].cleaned, q.positives[1].mask);
  const auto n0 = oracle::dense_ncc_map(cleaned, q.negatives[0].cleaned, q.negatives[0].mask);
  REQUIRE(map.score.size() == p0.size());
  for (std::size_t i = 0; i < p0.size(); ++i) {
    const double expect = std::clamp(std::max(p0[i], p1[i]) - 0.5 * std::max(0.0, n0[i]), -1.0, 1.0);
    REQUIRE(std::abs(map.score[i] - expect) <= 1e-6);
    REQUIRE(std::abs(map.positive[i] - std::max(p0[i], p1[i])) <= 1e-5);
  }
}

TEST_CASE("adding a positive never lowers the positive component") {
  EngineConfig cfg;
  synth::Rng rng(21);
  const Page page(0, "p", synth::quantize(synth::random_image(rng, 90, 70)));
  QueryModel q;
  q.positives = {random_template(rng, 18, 10)};
  q.scales = {0.9, 1.0, 1.1};
  const ScoreMap before = score_map(q, page, cfg);
  q.positives.push_back(random_template(rng, 22, 12));
  const ScoreMap after = score_map(q, page, cfg);
  REQUIRE(before.positive.size() == after.positive.size());
  for (std::size_t i = 0; i < before.positive.size(); ++i) {
    if (std::isnan(before.score[i])) continue;
    CHECK(after.positive[i] >= before.positive[i] - 1e-6f);
  }
}

TEST_CASE("planting the template shifts the arg max exactly") {
  EngineConfig cfg;
  cfg.stride = 1;
  synth::Rng rng(31);
  const GrayImage word = synth::rasterize(synth::random_word(rng, 4));
  synth::PaperStyle style;
  style.noise = 0.0;
  auto page_at = [&](int x, int y) {
    GrayImage cov(200, 120, 0.0f);
    synth::stamp(cov, word, x, y);
    synth::Rng local(5);
    return Page(0, "p", synth::quantize(synth::compose(cov, style, local)));
  };
  const Page base = page_at(60, 40);
  const BoundingBox box = expand(synth::ink_box([&] {
                                   GrayImage cov(200, 120, 0.0f);
                                   synth::stamp(cov, word, 60, 40);
                                   return cov;
                                 }()),
                                 3);
  QueryModel q;
  q.scales = {1.0};
  q.positives = {extract_template(base, box, cfg)};
  auto argmax = [&](const Page& page) {
    const ScoreMap m = score_map(q, page, cfg);
    std::size_t best = 0;
    for (std::size_t i = 0; i < m.score.size(); ++i) {
      if (m.score[i] > m.score[best]) best = i;
    }
    return std::pair<int, int>(static_cast<int>(best % m.width), static_cast<int>(best / m.width));
  };
  const auto a = argmax(base);
  CHECK(a == std::pair<int, int>(box.x, box.y));
  const auto b = argmax(page_at(60 + 17, 40 + 9));
  CHECK(b.first - a.first == 17);
  CHECK(b.second - a.second == 9);
}

TEST_CASE("score_page finds its own source and planted copies") {
  const EngineConfig cfg;
  synth::Rng rng(41);
  const GrayImage word = synth::rasterize(synth::random_word(rng, 5));
  GrayImage cov(420, 260, 0.0f);
  const std::vector<std::pair<int, int>> spots{{30, 30}, {220, 60}, {120, 170}};
  for (auto [x, y] : spots) synth::stamp(cov, word, x, y);
  synth::PaperStyle style;
  style.noise = 0.0;
  const Page page(0, "p", synth::quantize(synth::compose(cov, style, rng)));
  GrayImage first(420, 260, 0.0f);
  synth::stamp(first, word, 30, 30);
  const BoundingBox src = snap_box(page, expand(synth::ink_box(first), 6), cfg).box;

  QueryModel q;
  q.query_id = "q";
  q.positives = {extract_template(page, src, cfg)};
  const auto cands = score_page(q, page, cfg);
  REQUIRE(cands.size() == 3);
  CHECK(iou(cands[0].box, src) >= 0.9);
  CHECK(cands[0].score >= 0.99);
  for (auto [x, y] : spots) {
    const int ex = src.x - 30 + x, ey = src.y - 30 + y;
    const bool found = std::any_of(cands.begin(), cands.end(), [&](const Candidate& c) {
      return std::abs(c.box.x - ex) <= 2 && std::abs(c.box.y - ey) <= 2;
    });
    CHECK(found);
  }
  for (const Candidate& c : cands) {
    CHECK(c.box.x >= 0);
    CHECK(c.box.right() <= page.width());
    CHECK(c.box.bottom() <= page.height());
  }
  const Page blank(1, "blank", synth::quantize(GrayImage(300, 200, 0.8f)));
  CHECK(score_page(q, blank, cfg).empty());
}

TEST_CASE("nms examples and idempotence") {
  CHECK(nms({}).empty());
  const Candidate a{0, {0, 0, 100, 20}, 0.9, 1.0};
  const Candidate b{0, {2, 0, 100, 20}, 0.8, 1.0};
  const auto kept = nms({b, a});
  REQUIRE(kept.size() == 1);
  CHECK(kept[0] == a);

  synth::Rng rng(55);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<Candidate> cands;
    const int n = rng.integer(0, 40);
    for (int i = 0; i < n; ++i) {
      cands.push_back({rng.integer(0, 1), {rng.integer(0, 120), rng.integer(0, 80), rng.integer(8, 40), rng.integer(6, 20)},
                       std::round(rng.uniform(0.3, 1.0) * 20) / 20, 1.0});
    }
    const auto once = nms(cands);
    CHECK(nms(once) == once);
    for (std::size_t i = 0; i < once.size(); ++i) {
      for (std::size_t j = i + 1; j < once.size(); ++j) {
        if (once[i].page_id == once[j].page_id) CHECK(iou(once[i].box, once[j].box) <= 0.3);
      }
    }
    CHECK(std::is_sorted(once.begin(), once.end(), candidate_before));
  }
}

TEST_CASE("query model validation") {
  QueryModel q;
  CHECK_THROWS_AS(q.validate(), Error);
  synth::Rng rng(1);
  q.positives = {random_template(rng, 10, 10)};
  q.validate();
  q.scales = {1.1, 0.9};
  CHECK_THROWS_AS(q.validate(), Error);
  q.scales = {1.0};
  q.threshold = 0.95;
  CHECK_THROWS_AS(q.validate(), Error);
}

TEST_CASE("search order starts on the query page") {
  CHECK(search_order(5, 3) == std::vector<int>{3, 0, 1, 2, 4});
  CHECK(search_order(3, 0) == std::vector<int>{0, 1, 2});
}

namespace {

struct SearchFixture {
  fixtures::Corpus corpus = fixtures::make_corpus(10, 8, 300, 200, 2);
  Project project = fixtures::in_memory_project(corpus);
  std::shared_ptr<const QueryModel> model;

  SearchFixture() {
    const BoundingBox src = snap_box(*project.pages[7], expand(corpus.targets[7][0], 5), project.config).box;
    QueryModel q;
    q.query_id = "q1";
    q.positives = {extract_template(*project.pages[7], src, project.config)};
    model = std::make_shared<const QueryModel>(q);
  }

  std::vector<PageResult> run(int workers) {
    std::vector<PageResult> out;
    SearchHandle h = search_corpus(model, project.pages, 7, project.config,
                                   [&](const PageResult& r) { out.push_back(r); }, workers);
    CHECK(h.await_done() == SearchStatus::Completed);
    return out;
  }
};

}  // namespace

TEST_CASE("corpus search is ordered and independent of worker count") {
  SearchFixture f;
  const auto one = f.run(1);
  const auto four = f.run(4);
  REQUIRE(one.size() == 10);
  REQUIRE(four.size() == 10);
  CHECK(one.front().page_id == 7);
  const std::vector<int> order = search_order(10, 7);
  for (std::size_t i = 0; i < one.size(); ++i) {
    CHECK(one[i].page_id == order[i]);
    CHECK(four[i].page_id == order[i]);
    CHECK(one[i].candidates == four[i].candidates);
    CHECK(one[i].candidates == score_page(*f.model, *f.project.pages[order[i]], f.project.config));
  }
}

TEST_CASE("cancel after the first emission stops the search") {
  SearchFixture f;
  std::atomic<int> emitted{0};
  SearchHandle h;
  std::mutex mu;
  std::unique_lock hold(mu);
  h = search_corpus(f.model, f.project.pages, 7, f.project.config,
                    [&](const PageResult&) {
                      ++emitted;
                      std::lock_guard lock(mu);
                      h.cancel();
                    },
                    2);
  hold.unlock();
  CHECK(h.await_done() == SearchStatus::Cancelled);
  CHECK(emitted.load() == 1);
}

TEST_CASE("an emit callback that throws fails the search") {
  SearchFixture f;
  SearchHandle h = search_corpus(f.model, f.project.pages, 7, f.project.config,
                                 [](const PageResult&) { throw std::runtime_error("sink closed"); }, 2);
  CHECK(h.await_done() == SearchStatus::Failed);
  CHECK(h.error().find("sink closed") != std::string::npos);
}
