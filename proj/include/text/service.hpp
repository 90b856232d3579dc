#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "text/error.hpp"
#include "text/feedback.hpp"
#include "text/project.hpp"

namespace text {

nlohmann::json to_json(const ModelDelta& d);

/// HTTP status for an engine error code.
int http_status(ErrorCode code);

/// The workbench behind the HTTP API. Each open project is owned by a
/// session; mutations and search emissions are serialized on the session
/// lock, page searches run on one shared worker pool.
class WorkbenchService {
 public:
  explicit WorkbenchService(int workers);
  ~WorkbenchService();

  WorkbenchService(const WorkbenchService&) = delete;
  WorkbenchService& operator=(const WorkbenchService&) = delete;

  /// {project_id, n_pages}
  nlohmann::json open_corpus(const std::filesystem::path& dir);
  /// Reopen a saved project, replay its feedback log and resume unfinished
  /// searches. {project_id, n_pages}
  nlohmann::json open_project(const std::filesystem::path& file);

  nlohmann::json summary(const std::string& project_id);

  /// Snap, register and start searching. Returns before the search is done.
  /// {query_id, snapped_box, snapped, user_box, template_png_url}
  nlohmann::json create_query(const std::string& project_id, int page_id, const BoundingBox& box,
                              const std::string& transcription, Category category);

  /// Changes after `cursor`: {matches, removed, next_cursor}. Waits up to
  /// `wait_ms` for something new when nothing is pending.
  /// Throws Error{CursorGone} for cursors beyond the latest.
  nlohmann::json matches(const std::string& project_id, std::int64_t cursor, int wait_ms = 0);

  /// {state, model_delta, new_threshold}. Without a project id the match is
  /// looked up in every open project.
  nlohmann::json feedback(const std::string& match_id, Verdict verdict, std::optional<std::int64_t> timestamp_ms,
                          const std::optional<std::string>& project_id = std::nullopt);

  nlohmann::json export_ground_truth(const std::string& project_id,
                                     const std::optional<std::filesystem::path>& dir = std::nullopt);
  std::string transcription(const std::string& project_id, int page_id);
  nlohmann::json progress(const std::string& project_id);
  std::vector<unsigned char> page_png(const std::string& project_id, int page_id, bool cleaned);
  std::vector<unsigned char> template_png(const std::string& project_id, const std::string& query_id);
  /// Save to `path`, or to where the project was opened from.
  nlohmann::json save(const std::string& project_id,
                      const std::optional<std::filesystem::path>& path = std::nullopt);

  /// Copy of the project state.
  Project snapshot(const std::string& project_id);
  /// Block until no search of the project is running.
  void wait_idle(const std::string& project_id);

  struct Session;

 private:
  std::shared_ptr<Session> session(const std::string& project_id);
  nlohmann::json register_session(std::shared_ptr<Session> s);

  std::mutex mu_;
  int next_id_ = 1;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  struct Pool;
  std::unique_ptr<Pool> pool_;
};

/// Binds WorkbenchService to HTTP routes.
class HttpServer {
 public:
  explicit HttpServer(WorkbenchService& service,
                      std::optional<std::filesystem::path> ui_dir = std::nullopt);
  ~HttpServer();

  /// Bind to `port` (0 picks a free one); returns the bound port or -1.
  int bind(const std::string& host, int port);
  /// Serve until stop(); call after bind().
  bool listen();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace text
