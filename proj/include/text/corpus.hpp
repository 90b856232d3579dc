#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "text/config.hpp"
#include "text/project.hpp"

namespace text {

inline constexpr int kProjectFormatVersion = 1;

struct LoadReport {
  /// Files that were not page images, by file name.
  std::vector<std::string> ignored;
};

/// Load every PNG/JPEG/TIFF in `directory` (non-recursive), sorted by file
/// name, as pages 0..n-1. The project id is derived from the directory name.
/// Throws Error{EmptyCorpus}, Error{UnreadableImage}, Error{PageTooSmall},
/// Error{IoFailure} when the directory cannot be listed.
Project load_corpus(const std::filesystem::path& directory, const EngineConfig& config,
                    LoadReport* report = nullptr);

/// Single JSON document; page pixels are referenced by path relative to the
/// file's directory, never embedded. Throws Error{IoFailure}.
void save_project(const Project& project, const std::filesystem::path& path);
nlohmann::json project_to_json(const Project& project, const std::filesystem::path& base_dir);

/// Throws Error{IoFailure}, Error{ParseError}, Error{SchemaMismatch} (unknown
/// format version), plus page-loading errors.
Project load_project(const std::filesystem::path& path);

}  // namespace text
