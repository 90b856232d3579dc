#include <doctest.h>

#include <chrono>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "fixtures.hpp"
#include "text/corpus.hpp"
#include "text/feedback.hpp"
#include "text/ground_truth.hpp"
#include "text/service.hpp"

using namespace text;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

class Server {
 public:
  explicit Server(int workers = 2) : service(workers), http(service) {
    port = http.bind("127.0.0.1", 0);
    REQUIRE(port > 0);
    thread = std::thread([this] { http.listen(); });
    client = std::make_unique<httplib::Client>("127.0.0.1", port);
    client->set_read_timeout(60, 0);
    for (int i = 0; i < 100 && !client->Get("/projects/none"); ++i) {
      std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
  }
  ~Server() {
    http.stop();
    thread.join();
  }

  std::pair<int, json> post(const std::string& path, const json& body) {
    auto r = client->Post(path, body.dump(), "application/json");
    REQUIRE(r);
    return {r->status, r->body.empty() ? json() : json::parse(r->body)};
  }
  std::pair<int, json> get(const std::string& path) {
    auto r = client->Get(path);
    REQUIRE(r);
    return {r->status, json::parse(r->body, nullptr, false)};
  }
  httplib::Result raw(const std::string& path) { return client->Get(path); }

  WorkbenchService service;
  HttpServer http;
  int port = -1;
  std::thread thread;
  std::unique_ptr<httplib::Client> client;
};

json box_json(const BoundingBox& b) { return {{"x", b.x}, {"y", b.y}, {"w", b.w}, {"h", b.h}}; }

// Poll until every search of the project is done, returning all matches seen.
json drain(Server& s, const std::string& pid) {
  s.service.wait_idle(pid);
  return s.get("/projects/" + pid + "/matches?cursor=0").second;
}

}  // namespace

TEST_CASE("service workflow over HTTP") {
  fixtures::TempDir dir("service");
  const fixtures::Corpus c = fixtures::make_corpus(4, 31, 360, 220, 2);
  fixtures::write_corpus(c, dir.path() / "corpus");
  Server s;

  auto [st, created] = s.post("/projects", {{"corpus_dir", (dir.path() / "corpus").string()}});
  REQUIRE(st == 201);
  CHECK(created["n_pages"] == 4);
  const std::string pid = created["project_id"];
  CHECK(s.post("/projects", {{"corpus_dir", (dir.path() / "corpus").string()}}).second["project_id"] != pid);

  const BoundingBox user = expand(c.targets[0][0], 8);
  const auto t0 = std::chrono::steady_clock::now();
  auto [qs, query] = s.post("/projects/" + pid + "/queries",
                            {{"page", 0}, {"box", box_json(user)}, {"transcription", "reberé"}, {"category", "name"}});
  const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  REQUIRE(qs == 201);
  CHECK(ms < 200.0);
  const BoundingBox snapped = query["snapped_box"].get<BoundingBox>();
  CHECK(expand(user, 8).contains(snapped));
  CHECK(snapped.area() < user.area());
  auto png = s.raw(query["template_png_url"].get<std::string>());
  REQUIRE(png);
  CHECK(png->status == 200);
  CHECK(png->body.substr(1, 3) == "PNG");

  const json all = drain(s, pid);
  const auto& matches = all["matches"];
  REQUIRE(matches.size() >= 2);
  std::int64_t last = 0;
  std::set<std::string> ids;
  for (const auto& m : matches) {
    CHECK(m["seq"].get<std::int64_t>() > last);
    last = m["seq"];
    CHECK(ids.insert(m["match_id"].get<std::string>()).second);
  }
  CHECK(s.get("/projects/" + pid + "/matches?cursor=0").second == all);
  const json tail = s.get("/projects/" + pid + "/matches?cursor=" + std::to_string(all["next_cursor"].get<int>())).second;
  CHECK(tail["matches"].empty());
  CHECK(tail["next_cursor"] == all["next_cursor"]);
  CHECK(s.get("/projects/" + pid + "/matches?cursor=999999").first == 410);

  const std::string m0 = matches[0]["match_id"], m1 = matches[1]["match_id"];
  auto [fs0, f0] = s.post("/matches/" + m0 + "/feedback", {{"verdict", "confirm"}});
  CHECK(fs0 == 200);
  CHECK(f0["state"] == "confirmed");
  auto [fs1, f1] = s.post("/projects/" + pid + "/matches/" + m1 + "/feedback", {{"verdict", "reject"}});
  CHECK(fs1 == 200);
  auto [fs2, f2] = s.post("/projects/" + pid + "/matches/" + m1 + "/feedback", {{"verdict", "reject"}});
  CHECK(f2["state"] == "rejected");
  CHECK(f2["model_delta"]["empty"] == true);
  CHECK(s.post("/matches/nothing/feedback", {{"verdict", "confirm"}}).first == 404);

  const json after = drain(s, pid);
  for (const auto& m : after["matches"]) CHECK(m["match_id"] != m1);
  bool confirmed_present = false;
  for (const auto& m : after["matches"]) confirmed_present |= m["match_id"] == m0 && m["state"] == "confirmed";
  CHECK(confirmed_present);

  auto [es, exported] = s.get("/projects/" + pid + "/export");
  CHECK(es == 200);
  int entries = 0;
  for (const auto& page : exported["pages"]) entries += static_cast<int>(page["words"].size());
  CHECK(entries == 2);
  CHECK(s.raw("/projects/" + pid + "/export")->body == s.raw("/projects/" + pid + "/export")->body);

  auto text = s.raw("/projects/" + pid + "/pages/0/transcription");
  REQUIRE(text);
  CHECK(text->body.find("reberé") != std::string::npos);

  auto [ps, prog] = s.get("/projects/" + pid + "/progress");
  CHECK(ps == 200);
  CHECK(prog["queries"][0]["pages_searched"] == 4);

  auto img = s.raw("/projects/" + pid + "/pages/1/image?cleaned=1");
  REQUIRE(img);
  CHECK(img->status == 200);
  CHECK(s.raw("/projects/" + pid + "/pages/9/image")->status == 404);

  auto [ss, saved] = s.post("/projects/" + pid + "/save", json::object());
  CHECK(ss == 200);
  const Project live = s.service.snapshot(pid);
  Project reloaded = load_project(saved["path"].get<std::string>());
  replay_feedback(reloaded);
  CHECK(ground_truth_text(reloaded) == ground_truth_text(live));
}

TEST_CASE("service errors") {
  fixtures::TempDir dir("service_errors");
  fs::create_directories(dir.path() / "empty");
  Server s(1);
  auto [st, body] = s.post("/projects", {{"corpus_dir", (dir.path() / "empty").string()}});
  CHECK(st == 400);
  CHECK(body["error"] == "EmptyCorpus");
  CHECK(s.get("/projects/prj404").first == 404);

  const fixtures::Corpus c = fixtures::make_corpus(1, 2, 300, 200, 1);
  fixtures::write_corpus(c, dir.path() / "one");
  const std::string pid = s.post("/projects", {{"corpus_dir", (dir.path() / "one").string()}}).second["project_id"];
  const BoundingBox word = expand(c.targets[0][0], 4);
  auto blank = s.post("/projects/" + pid + "/queries", {{"page", 0},
                                                        {"box", box_json({2, 190, 30, 8})},
                                                        {"transcription", "x"}});
  CHECK(blank.first == 400);
  CHECK(blank.second["error"] == "EmptyTemplate");
  CHECK(s.post("/projects/" + pid + "/queries", {{"page", 0}, {"box", box_json(word)}, {"transcription", ""}}).first ==
        422);
  CHECK(s.post("/projects/" + pid + "/queries", {{"page", 3}, {"box", box_json(word)}, {"transcription", "x"}}).first ==
        404);
  CHECK(s.post("/projects/" + pid + "/matches/m/feedback", {{"verdict", "perhaps"}}).first == 400);
}

TEST_CASE("many queries all finish") {
  fixtures::TempDir dir("service_many");
  const fixtures::Corpus c = fixtures::make_corpus(3, 44, 360, 220, 1);
  fixtures::write_corpus(c, dir.path() / "corpus");
  WorkbenchService svc(2);
  const std::string pid = svc.open_corpus(dir.path() / "corpus")["project_id"];
  int made = 0;
  for (std::size_t p = 0; p < c.words.size() && made < 11; ++p) {
    for (const BoundingBox& w : c.words[p]) {
      if (made == 11) break;
      try {
        svc.create_query(pid, static_cast<int>(p), expand(w, 4), "w" + std::to_string(made), Category::None);
        ++made;
      } catch (const Error&) {
      }
    }
  }
  REQUIRE(made == 11);
  svc.wait_idle(pid);
  const json prog = svc.progress(pid);
  REQUIRE(prog["queries"].size() == 11);
  for (const auto& q : prog["queries"]) CHECK(q["pages_searched"] == 3);
}

TEST_CASE("reopened project resumes where it stopped") {
  fixtures::TempDir dir("service_resume");
  const fixtures::Corpus c = fixtures::make_corpus(3, 45, 360, 220, 2);
  fixtures::write_corpus(c, dir.path() / "corpus");
  Project p = load_corpus(dir.path() / "corpus", EngineConfig{});
  {
    WorkbenchService svc(1);
    const std::string pid = svc.open_corpus(dir.path() / "corpus")["project_id"];
    svc.create_query(pid, 0, expand(c.targets[0][0], 5), "w", Category::None);
    svc.wait_idle(pid);
    p = svc.snapshot(pid);
    p.query("q1").search.pages_done = {0};
    save_project(p, dir.path() / "corpus" / "project.json");
  }
  WorkbenchService svc(1);
  const std::string pid = svc.open_project(dir.path() / "corpus" / "project.json")["project_id"];
  svc.wait_idle(pid);
  const Project resumed = svc.snapshot(pid);
  CHECK(resumed.query("q1").search.pages_done.size() == 3);
  std::set<std::string> before, after;
  for (const Match& m : p.matches) before.insert(m.match_id);
  for (const Match& m : resumed.matches) after.insert(m.match_id);
  CHECK(before == after);
}
