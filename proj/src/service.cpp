#include "text/service.hpp"

#include <algorithm>
#include <chrono>
#include <condition_variable>
#include <unordered_map>

#include <httplib.h>

#include "text/corpus.hpp"
#include "text/ground_truth.hpp"
#include "text/image_io.hpp"
#include "text/search.hpp"
#include "text/workbench.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace text {

namespace {

std::int64_t now_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

}  // namespace

json to_json(const ModelDelta& d) {
  return {{"positives_added", d.positives_added},
          {"positives_removed", d.positives_removed},
          {"negatives_added", d.negatives_added},
          {"negatives_removed", d.negatives_removed},
          {"threshold_before", d.threshold_before},
          {"threshold_after", d.threshold_after},
          {"inverted", d.inverted},
          {"empty", d.empty()}};
}

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownProject:
    case ErrorCode::UnknownPage:
    case ErrorCode::UnknownQuery:
    case ErrorCode::UnknownMatch:
      return 404;
    case ErrorCode::IllegalTransition:
    case ErrorCode::Cancelled:
      return 409;
    case ErrorCode::CursorGone:
      return 410;
    case ErrorCode::EmptyTranscription:
      return 422;
    default:
      return 400;
  }
}

struct WorkbenchService::Pool {
  explicit Pool(int workers) : pool(workers) {}
  WorkerPool pool;
};

struct WorkbenchService::Session {
  std::string id;
  fs::path origin;

  std::mutex mu;
  std::condition_variable cv;
  Project project;

  // Emission log: every match id sits at the seq of its latest change.
  std::int64_t last_seq = 0;
  std::map<std::int64_t, std::string> log;
  std::unordered_map<std::string, std::int64_t> seq_of;

  std::map<std::string, SearchHandle> runs;

  void touch(const std::string& match_id) {
    auto it = seq_of.find(match_id);
    if (it != seq_of.end()) log.erase(it->second);
    log[++last_seq] = match_id;
    seq_of[match_id] = last_seq;
  }

  void on_page(const std::string& query_id, int generation, const PageResult& pr) {
    std::lock_guard lock(mu);
    auto qit = std::find_if(project.queries.begin(), project.queries.end(),
                            [&](const QueryWord& q) { return q.query_id == query_id; });
    if (qit == project.queries.end() || qit->search.generation != generation) return;
    const auto& done = qit->search.pages_done;
    if (std::find(done.begin(), done.end(), pr.page_id) != done.end()) return;

    std::unordered_map<std::string, double> before;
    for (const Match& m : project.matches) {
      if (m.query_id == query_id && m.page_id == pr.page_id && m.state == MatchState::Pending) {
        before[m.match_id] = m.score;
      }
    }
    const IngestResult r = ingest_candidates(project, query_id, pr.page_id, pr.candidates);
    project.query(query_id).search.pages_done.push_back(pr.page_id);
    for (const std::string& id : r.removed) touch(id);
    for (const std::string& id : r.upserted) {
      auto it = before.find(id);
      if (it == before.end() || it->second != project.find_match(id)->score) touch(id);
    }
    project.bump();
    cv.notify_all();
  }

  bool busy() const {
    return std::any_of(runs.begin(), runs.end(), [](const auto& kv) { return !kv.second.done(); });
  }
};

namespace {

using SessionPtr = std::shared_ptr<WorkbenchService::Session>;

/// Start (or resume) the current generation of a query's search. Caller holds
/// the session lock; the displaced handle is returned so it can be cancelled
/// after the lock is released.
SearchHandle start_search(const SessionPtr& s, const std::string& query_id, WorkerPool& pool) {
  Project& p = s->project;
  const QueryWord& q = p.query(query_id);
  auto model = std::make_shared<const QueryModel>(build_query_model(p, query_id));
  std::vector<int> order;
  for (int page : search_order(static_cast<int>(p.pages.size()), q.page_id)) {
    if (std::find(q.search.pages_done.begin(), q.search.pages_done.end(), page) == q.search.pages_done.end()) {
      order.push_back(page);
    }
  }
  std::weak_ptr<WorkbenchService::Session> weak = s;
  const int generation = q.search.generation;
  EmitFn emit = [weak, query_id, generation](const PageResult& pr) {
    if (auto locked = weak.lock()) locked->on_page(query_id, generation, pr);
  };
  SearchHandle h = search_corpus(std::move(model), p.pages, std::move(order), p.config, std::move(emit), pool);
  SearchHandle old = std::move(s->runs[query_id]);
  s->runs[query_id] = std::move(h);
  return old;
}

json match_json(const Match& m, std::int64_t seq) {
  json j = m;
  j["seq"] = seq;
  return j;
}

}  // namespace

WorkbenchService::WorkbenchService(int workers)
    : pool_(std::make_unique<Pool>(std::max(1, workers))) {}

WorkbenchService::~WorkbenchService() {
  std::vector<SearchHandle> handles;
  {
    std::lock_guard lock(mu_);
    for (auto& [id, s] : sessions_) {
      std::lock_guard slock(s->mu);
      for (auto& [qid, h] : s->runs) handles.push_back(std::move(h));
      s->runs.clear();
    }
  }
  for (SearchHandle& h : handles) h.cancel();
  pool_.reset();
  handles.clear();
  sessions_.clear();
}

json WorkbenchService::register_session(std::shared_ptr<Session> s) {
  for (const PagePtr& page : s->project.pages) {
    pool_->pool.submit([page, cfg = s->project.config] {
      try {
        page->layers(cfg);
      } catch (...) {
      }
    });
  }
  const int n_pages = static_cast<int>(s->project.pages.size());
  std::lock_guard lock(mu_);
  s->id = "prj" + std::to_string(next_id_++);
  sessions_[s->id] = s;
  return {{"project_id", s->id}, {"n_pages", n_pages}};
}

json WorkbenchService::open_corpus(const fs::path& dir) {
  auto s = std::make_shared<Session>();
  s->project = load_corpus(dir, EngineConfig{});
  s->origin = dir / "project.json";
  return register_session(s);
}

json WorkbenchService::open_project(const fs::path& file) {
  auto s = std::make_shared<Session>();
  s->project = load_project(file);
  replay_feedback(s->project);
  s->origin = file;
  for (const Match* m : visible_matches(s->project)) s->touch(m->match_id);
  json out = register_session(s);
  std::lock_guard lock(s->mu);
  for (const QueryWord& q : s->project.queries) start_search(s, q.query_id, pool_->pool);
  return out;
}

std::shared_ptr<WorkbenchService::Session> WorkbenchService::session(const std::string& project_id) {
  std::lock_guard lock(mu_);
  auto it = sessions_.find(project_id);
  if (it == sessions_.end()) throw Error(ErrorCode::UnknownProject, "no project " + project_id);
  return it->second;
}

json WorkbenchService::summary(const std::string& project_id) {
  auto s = session(project_id);
  std::lock_guard lock(s->mu);
  json pages = json::array();
  for (const PagePtr& p : s->project.pages) {
    pages.push_back({{"id", p->id()}, {"source_name", p->source_name()}, {"width", p->width()}, {"height", p->height()}});
  }
  return {{"project_id", s->id},
          {"name", s->project.id},
          {"n_pages", s->project.pages.size()},
          {"pages", std::move(pages)},
          {"queries", s->project.queries},
          {"version", s->project.version},
          {"cursor", s->last_seq}};
}

json WorkbenchService::create_query(const std::string& project_id, int page_id, const BoundingBox& box,
                                    const std::string& transcription, Category category) {
  auto s = session(project_id);
  SearchHandle old;
  json out;
  {
    std::lock_guard lock(s->mu);
    CreatedQuery c = text::create_query(s->project, page_id, box, transcription, category);
    old = start_search(s, c.query.query_id, pool_->pool);
    out = {{"query_id", c.query.query_id},
           {"user_box", c.query.user_box},
           {"snapped_box", c.query.snapped_box},
           {"snapped", c.query.snapped},
           {"template_png_url", "/projects/" + s->id + "/queries/" + c.query.query_id + "/template.png"}};
  }
  old.cancel();
  return out;
}

json WorkbenchService::matches(const std::string& project_id, std::int64_t cursor, int wait_ms) {
  auto s = session(project_id);
  std::unique_lock lock(s->mu);
  if (cursor < 0) throw Error(ErrorCode::InvalidParams, "cursor must be >= 0");
  if (cursor > s->last_seq) {
    throw Error(ErrorCode::CursorGone, "cursor " + std::to_string(cursor) + " is unknown; resync from 0");
  }
  if (wait_ms > 0 && s->last_seq == cursor) {
    s->cv.wait_for(lock, std::chrono::milliseconds(std::min(wait_ms, 30000)),
                   [&] { return s->last_seq > cursor; });
  }
  json found = json::array();
  json removed = json::array();
  for (auto it = s->log.upper_bound(cursor); it != s->log.end(); ++it) {
    const Match* m = s->project.find_match(it->second);
    if (m && m->state != MatchState::Rejected) {
      found.push_back(match_json(*m, it->first));
    } else {
      removed.push_back(it->second);
    }
  }
  return {{"matches", std::move(found)}, {"removed", std::move(removed)}, {"next_cursor", s->last_seq}};
}

json WorkbenchService::feedback(const std::string& match_id, Verdict verdict, std::optional<std::int64_t> timestamp_ms,
                                const std::optional<std::string>& project_id) {
  std::shared_ptr<Session> s;
  if (project_id) {
    s = session(*project_id);
  } else {
    std::vector<std::shared_ptr<Session>> all;
    {
      std::lock_guard lock(mu_);
      for (auto& [id, candidate] : sessions_) all.push_back(candidate);
    }
    for (auto& candidate : all) {
      std::lock_guard lock(candidate->mu);
      if (!candidate->project.find_match(match_id)) continue;
      if (s) {
        throw Error(ErrorCode::IllegalTransition,
                    "match " + match_id + " exists in several projects; use /projects/{id}/matches/{match}/feedback");
      }
      s = candidate;
    }
    if (!s) throw Error(ErrorCode::UnknownMatch, "no match " + match_id);
  }

  SearchHandle old;
  json out;
  {
    std::lock_guard lock(s->mu);
    Project& p = s->project;
    const FeedbackResult r = apply_feedback(p, match_id, verdict, timestamp_ms.value_or(now_ms()));
    if (!r.delta.empty()) {
      const Match judged = *p.find_match(match_id);
      s->touch(judged.match_id);
      std::vector<Match> kept;
      for (Match& m : p.matches) {
        if (m.state == MatchState::Pending && m.query_id == judged.query_id && m.page_id == judged.page_id &&
            iou(m.box, judged.box) >= p.config.blacklist_iou) {
          s->touch(m.match_id);
          continue;
        }
        kept.push_back(std::move(m));
      }
      p.matches = std::move(kept);
      QueryWord& q = p.query(judged.query_id);
      ++q.search.generation;
      q.search.pages_done.clear();
      old = start_search(s, q.query_id, pool_->pool);
      s->cv.notify_all();
    }
    out = {{"match_id", match_id},
           {"state", to_string(r.state)},
           {"model_delta", to_json(r.delta)},
           {"new_threshold", r.new_threshold}};
  }
  old.cancel();
  return out;
}

json WorkbenchService::export_ground_truth(const std::string& project_id, const std::optional<fs::path>& dir) {
  auto s = session(project_id);
  std::lock_guard lock(s->mu);
  if (dir) {
    const ExportSummary sum = export_bundle(s->project, *dir);
    return {{"dir", dir->string()}, {"entries", sum.entries}, {"crops", sum.crops}};
  }
  return ground_truth_json(s->project);
}

std::string WorkbenchService::transcription(const std::string& project_id, int page_id) {
  auto s = session(project_id);
  std::lock_guard lock(s->mu);
  return page_transcription(s->project, page_id);
}

json WorkbenchService::progress(const std::string& project_id) {
  auto s = session(project_id);
  std::lock_guard lock(s->mu);
  const ProgressReport r = text::progress(s->project);
  json queries = json::array();
  for (const QueryProgress& q : r.queries) {
    auto run = s->runs.find(q.query_id);
    const bool running = run != s->runs.end() && !run->second.done();
    queries.push_back({{"query_id", q.query_id},
                       {"transcription", q.transcription},
                       {"pages_searched", q.pages_searched},
                       {"total_pages", q.total_pages},
                       {"fraction", q.fraction()},
                       {"pending", q.pending},
                       {"confirmed", q.confirmed},
                       {"rejected", q.rejected},
                       {"running", running}});
  }
  return {{"queries", std::move(queries)},
          {"confirmed_matches", r.confirmed_matches},
          {"transcribed_words", r.transcribed_words},
          {"total_pages", r.total_pages}};
}

std::vector<unsigned char> WorkbenchService::page_png(const std::string& project_id, int page_id, bool cleaned) {
  auto s = session(project_id);
  PagePtr page;
  EngineConfig cfg;
  {
    std::lock_guard lock(s->mu);
    s->project.page(page_id);
    page = s->project.pages[static_cast<std::size_t>(page_id)];
    cfg = s->project.config;
  }
  if (!cleaned) return encode_png(page->gray());
  return encode_png(to_gray8_inverted(page->layers(cfg)->cleaned));
}

std::vector<unsigned char> WorkbenchService::template_png(const std::string& project_id, const std::string& query_id) {
  auto s = session(project_id);
  std::lock_guard lock(s->mu);
  const QueryWord& q = s->project.query(query_id);
  const WordTemplate t = extract_template(s->project.page(q.page_id), q.snapped_box, s->project.config);
  return encode_png(to_gray8_inverted(t.cleaned));
}

json WorkbenchService::save(const std::string& project_id, const std::optional<fs::path>& path) {
  auto s = session(project_id);
  std::lock_guard lock(s->mu);
  const fs::path target = path.value_or(s->origin);
  save_project(s->project, target);
  return {{"path", target.string()}, {"version", s->project.version}};
}

Project WorkbenchService::snapshot(const std::string& project_id) {
  auto s = session(project_id);
  std::lock_guard lock(s->mu);
  return s->project;
}

void WorkbenchService::wait_idle(const std::string& project_id) {
  auto s = session(project_id);
  std::unique_lock lock(s->mu);
  while (s->busy()) s->cv.wait_for(lock, std::chrono::milliseconds(10));
}

// ---------------------------------------------------------------------------

struct HttpServer::Impl {
  WorkbenchService& service;
  httplib::Server server;

  explicit Impl(WorkbenchService& svc) : service(svc) {}
};

namespace {

void send_error(httplib::Response& res, int status, std::string_view code, const std::string& message) {
  res.status = status;
  res.set_content(json{{"error", code}, {"message", message}}.dump(), "application/json");
}

template <class Fn>
void guarded(httplib::Response& res, Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    send_error(res, http_status(e.code()), to_string(e.code()), e.what());
  } catch (const json::parse_error& e) {
    send_error(res, 400, "ParseError", e.what());
  } catch (const json::exception& e) {
    send_error(res, 400, "SchemaError", e.what());
  } catch (const std::exception& e) {
    send_error(res, 500, "Internal", e.what());
  }
}

json body_json(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  json j = json::parse(req.body);
  if (!j.is_object()) throw Error(ErrorCode::SchemaError, "request body must be a JSON object");
  return j;
}

void send_json(httplib::Response& res, const json& j, int status = 200) {
  res.status = status;
  res.set_content(j.dump(), "application/json");
}

void send_png(httplib::Response& res, const std::vector<unsigned char>& png) {
  res.set_content(std::string(png.begin(), png.end()), "image/png");
}

int int_param(const httplib::Request& req, const char* name, int fallback) {
  if (!req.has_param(name)) return fallback;
  try {
    return std::stoi(req.get_param_value(name));
  } catch (const std::exception&) {
    throw Error(ErrorCode::InvalidParams, std::string("query parameter '") + name + "' must be an integer");
  }
}

}  // namespace

HttpServer::HttpServer(WorkbenchService& service, std::optional<fs::path> ui_dir)
    : impl_(std::make_unique<Impl>(service)) {
  auto& srv = impl_->server;
  WorkbenchService& svc = service;

  srv.Post("/projects", [&svc](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const json body = body_json(req);
      if (body.contains("project_file")) {
        send_json(res, svc.open_project(body.at("project_file").get<std::string>()), 201);
      } else {
        send_json(res, svc.open_corpus(body.at("corpus_dir").get<std::string>()), 201);
      }
    });
  });

  srv.Get(R"(/projects/(\w+))", [&svc](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { send_json(res, svc.summary(req.matches[1])); });
  });

  srv.Post(R"(/projects/(\w+)/queries)", [&svc](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const json body = body_json(req);
      const Category cat = parse_category(body.value("category", std::string("none")));
      send_json(res,
                svc.create_query(req.matches[1], body.at("page").get<int>(), body.at("box").get<BoundingBox>(),
                                 body.value("transcription", std::string()), cat),
                201);
    });
  });

  srv.Get(R"(/projects/(\w+)/matches)", [&svc](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      send_json(res, svc.matches(req.matches[1], int_param(req, "cursor", 0), int_param(req, "wait_ms", 0)));
    });
  });

  auto feedback = [&svc](const httplib::Request& req, httplib::Response& res, std::optional<std::string> pid,
                         const std::string& mid) {
    guarded(res, [&] {
      const json body = body_json(req);
      std::optional<std::int64_t> ts;
      if (body.contains("timestamp")) ts = body["timestamp"].get<std::int64_t>();
      send_json(res, svc.feedback(mid, parse_verdict(body.at("verdict").get<std::string>()), ts, pid));
    });
  };
  srv.Post(R"(/matches/([^/]+)/feedback)", [feedback](const httplib::Request& req, httplib::Response& res) {
    feedback(req, res, std::nullopt, req.matches[1]);
  });
  srv.Post(R"(/projects/(\w+)/matches/([^/]+)/feedback)",
           [feedback](const httplib::Request& req, httplib::Response& res) {
             feedback(req, res, std::string(req.matches[1]), req.matches[2]);
           });

  srv.Get(R"(/projects/(\w+)/export)", [&svc](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      std::optional<fs::path> dir;
      if (req.has_param("dir")) dir = req.get_param_value("dir");
      if (dir) {
        send_json(res, svc.export_ground_truth(req.matches[1], dir));
      } else {
        res.set_content(svc.export_ground_truth(req.matches[1]).dump(2) + "\n", "application/json");
      }
    });
  });

  srv.Get(R"(/projects/(\w+)/pages/(\d+)/transcription)", [&svc](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      res.set_content(svc.transcription(req.matches[1], std::stoi(req.matches[2])), "text/plain; charset=utf-8");
    });
  });

  srv.Get(R"(/projects/(\w+)/pages/(\d+)/image)", [&svc](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const bool cleaned = req.has_param("cleaned") && req.get_param_value("cleaned") != "0";
      send_png(res, svc.page_png(req.matches[1], std::stoi(req.matches[2]), cleaned));
    });
  });

  srv.Get(R"(/projects/(\w+)/progress)", [&svc](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { send_json(res, svc.progress(req.matches[1])); });
  });

  srv.Get(R"(/projects/(\w+)/queries/(\w+)/template\.png)", [&svc](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { send_png(res, svc.template_png(req.matches[1], req.matches[2])); });
  });

  srv.Post(R"(/projects/(\w+)/save)", [&svc](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const json body = body_json(req);
      std::optional<fs::path> path;
      if (body.contains("path")) path = body["path"].get<std::string>();
      send_json(res, svc.save(req.matches[1], path));
    });
  });

  if (ui_dir) srv.set_mount_point("/ui", ui_dir->string());
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) return impl_->server.bind_to_any_port(host);
  return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool HttpServer::listen() { return impl_->server.listen_after_bind(); }

void HttpServer::stop() { impl_->server.stop(); }

}  // namespace text
