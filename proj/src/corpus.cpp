#include "text/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <system_error>

#include "text/error.hpp"
#include "text/image_io.hpp"

namespace fs = std::filesystem;

namespace text {

namespace {

constexpr const char* kFormatTag = "text-project";

std::string sanitize_id(const std::string& raw) {
  std::string id;
  for (char c : raw) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
    id.push_back(ok ? c : '_');
  }
  return id.empty() ? std::string("corpus") : id;
}

std::string relative_path(const fs::path& target, const fs::path& base) {
  std::error_code ec;
  const fs::path abs_target = fs::weakly_canonical(fs::absolute(target), ec);
  const fs::path abs_base = fs::weakly_canonical(fs::absolute(base), ec);
  fs::path rel = abs_target.lexically_relative(abs_base);
  if (rel.empty()) rel = abs_target;
  return rel.generic_string();
}

}  // namespace

Project load_corpus(const fs::path& directory, const EngineConfig& config, LoadReport* report) {
  config.validate();
  std::error_code ec;
  if (!fs::is_directory(directory, ec)) {
    throw Error(ErrorCode::IoFailure, "not a directory: " + directory.string());
  }

  std::vector<fs::path> images;
  LoadReport local;
  for (const auto& entry : fs::directory_iterator(directory, ec)) {
    if (!entry.is_regular_file()) continue;
    if (is_supported_image(entry.path())) {
      images.push_back(entry.path());
    } else {
      local.ignored.push_back(entry.path().filename().string());
    }
  }
  if (ec) throw Error(ErrorCode::IoFailure, "cannot list " + directory.string() + ": " + ec.message());
  if (images.empty()) {
    throw Error(ErrorCode::EmptyCorpus, "no supported images in " + directory.string());
  }
  std::sort(images.begin(), images.end(),
            [](const fs::path& a, const fs::path& b) { return a.filename().string() < b.filename().string(); });
  std::sort(local.ignored.begin(), local.ignored.end());

  Project p;
  p.id = sanitize_id(fs::absolute(directory).lexically_normal().filename().string());
  if (p.id == "corpus" || p.id.empty()) {
    p.id = sanitize_id(fs::absolute(directory).lexically_normal().parent_path().filename().string());
  }
  p.root = directory;
  p.config = config;
  for (std::size_t i = 0; i < images.size(); ++i) {
    const std::string name = images[i].filename().string();
    p.pages.push_back(std::make_shared<Page>(static_cast<int>(i), name, read_gray8(images[i])));
    p.page_paths.push_back(name);
  }
  if (report) *report = std::move(local);
  return p;
}

nlohmann::json project_to_json(const Project& project, const fs::path& base_dir) {
  nlohmann::json pages = nlohmann::json::array();
  for (std::size_t i = 0; i < project.pages.size(); ++i) {
    const Page& pg = *project.pages[i];
    const std::string stored = i < project.page_paths.size() ? project.page_paths[i] : pg.source_name();
    pages.push_back({{"id", pg.id()},
                     {"source_name", pg.source_name()},
                     {"path", relative_path(project.root / stored, base_dir)},
                     {"width", pg.width()},
                     {"height", pg.height()}});
  }
  return {{"format", kFormatTag},
          {"format_version", kProjectFormatVersion},
          {"id", project.id},
          {"pages", pages},
          {"queries", project.queries},
          {"matches", project.matches},
          {"feedback_log", project.feedback_log},
          {"config", project.config},
          {"version", project.version}};
}

void save_project(const Project& project, const fs::path& path) {
  fs::path dir = path.parent_path();
  if (dir.empty()) dir = ".";
  const std::string body = project_to_json(project, dir).dump(2) + "\n";
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
    out << body;
    if (!out.flush()) throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
  }
}

Project load_project(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();

  nlohmann::json j;
  try {
    j = nlohmann::json::parse(ss.str());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
  if (!j.is_object() || j.value("format", std::string()) != kFormatTag ||
      !j.contains("format_version") || !j["format_version"].is_number_integer() ||
      j["format_version"].get<int>() != kProjectFormatVersion) {
    throw Error(ErrorCode::SchemaMismatch, path.string() + ": unsupported project format version");
  }

  Project p;
  try {
    p.root = path.parent_path().empty() ? fs::path(".") : path.parent_path();
    p.id = j.at("id").get<std::string>();
    p.config = j.at("config").get<EngineConfig>();
    p.version = j.at("version").get<std::uint64_t>();
    p.queries = j.at("queries").get<std::vector<QueryWord>>();
    p.matches = j.at("matches").get<std::vector<Match>>();
    p.feedback_log = j.at("feedback_log").get<std::vector<FeedbackEvent>>();
    int expected_id = 0;
    for (const auto& pj : j.at("pages")) {
      const int id = pj.at("id").get<int>();
      if (id != expected_id++) throw Error(ErrorCode::SchemaError, "page ids must be 0..n-1 in order");
      const std::string rel = pj.at("path").get<std::string>();
      Gray8Image gray = read_gray8(p.root / rel);
      if (gray.width() != pj.at("width").get<int>() || gray.height() != pj.at("height").get<int>()) {
        throw Error(ErrorCode::SchemaError, "page '" + rel + "' changed size since the project was saved");
      }
      p.pages.push_back(std::make_shared<Page>(id, pj.at("source_name").get<std::string>(), std::move(gray)));
      p.page_paths.push_back(rel);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::SchemaError, path.string() + ": " + e.what());
  }
  return p;
}

}  // namespace text
