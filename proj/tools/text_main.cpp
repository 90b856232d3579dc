#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "text/bench.hpp"
#include "text/corpus.hpp"
#include "text/error.hpp"
#include "text/evaluate.hpp"
#include "text/feedback.hpp"
#include "text/ground_truth.hpp"
#include "text/image_io.hpp"
#include "text/page.hpp"
#include "text/search.hpp"
#include "text/service.hpp"
#include "text/snapbox.hpp"
#include "text/spotting.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace text;

namespace {

BoundingBox parse_box(const std::string& s) {
  BoundingBox b;
  char c1 = 0, c2 = 0, c3 = 0;
  std::istringstream in(s);
  if (!(in >> b.x >> c1 >> b.y >> c2 >> b.w >> c3 >> b.h) || c1 != ',' || c2 != ',' || c3 != ',') {
    throw Error(ErrorCode::InvalidParams, "box must be X,Y,W,H: " + s);
  }
  return b;
}

void write_text(const fs::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out || !(out << body)) throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
}

Project open_any(const std::string& project, const std::string& corpus) {
  if (!project.empty()) return load_project(project);
  return load_corpus(corpus, EngineConfig{});
}

QueryModel adhoc_model(const Project& p, int page, const BoundingBox& box, bool snap,
                       std::optional<double> threshold) {
  const Page& pg = p.page(page);
  const BoundingBox b = snap ? snap_box(pg, box, p.config).box : box;
  QueryModel q;
  q.query_id = "cli";
  q.scales = p.config.scales;
  q.positives.push_back(extract_template(pg, b, p.config));
  q.threshold = threshold.value_or(p.config.default_threshold);
  return q;
}

int cmd_init(const std::string& corpus, const std::string& out) {
  LoadReport report;
  Project p = load_corpus(corpus, EngineConfig{}, &report);
  const fs::path target = out.empty() ? fs::path(corpus) / "project.json" : fs::path(out);
  save_project(p, target);
  std::printf("project %s: %zu pages -> %s\n", p.id.c_str(), p.pages.size(), target.string().c_str());
  for (const std::string& f : report.ignored) std::printf("ignored %s\n", f.c_str());
  return 0;
}

int cmd_clean(const std::string& input, const std::string& out, const std::string& binary_out) {
  const Page page(0, fs::path(input).filename().string(), read_gray8(input));
  const auto layers = page.layers(EngineConfig{});
  write_png(out, to_gray8_inverted(layers->cleaned));
  if (!binary_out.empty()) write_png(binary_out, binary_to_gray8(layers->ink));
  std::printf("cleaned %dx%d, otsu bin %d, %zu components\n", page.width(), page.height(), layers->threshold_bin,
              layers->components.stats.size());
  return 0;
}

int cmd_spot(const std::string& project, const std::string& corpus, int page, const std::string& box, bool no_snap,
             const std::string& out, std::optional<double> threshold, int workers) {
  Project p = open_any(project, corpus);
  auto model = std::make_shared<const QueryModel>(adhoc_model(p, page, parse_box(box), !no_snap, threshold));
  json results = json::array();
  SearchHandle h = search_corpus(
      model, p.pages, page, p.config,
      [&](const PageResult& pr) {
        for (const Candidate& c : pr.candidates) {
          results.push_back({{"page", c.page_id}, {"box", c.box}, {"score", c.score}, {"scale", c.scale}});
        }
      },
      workers > 0 ? workers : p.config.resolved_workers());
  if (h.await_done() != SearchStatus::Completed) throw Error(ErrorCode::Cancelled, "search failed: " + h.error());
  write_text(out, results.dump(2) + "\n");
  std::printf("%zu candidates -> %s\n", results.size(), out.c_str());
  return 0;
}

int cmd_eval(const std::string& pred, const std::string& gt, double iou_min, const std::string& word, bool as_json) {
  std::optional<std::string> w;
  if (!word.empty()) w = word;
  const EvalResult r = evaluate_files(pred, gt, iou_min, w);
  if (as_json) {
    std::cout << to_json(r).dump(2) << "\n";
  } else {
    std::cout << format_table(r);
  }
  return 0;
}

int cmd_bench(const std::string& project, const std::string& corpus, int page, const std::string& box, int workers,
              int runs, bool as_json) {
  Project p = open_any(project, corpus);
  const QueryModel model = adhoc_model(p, page, parse_box(box), true, std::nullopt);
  const BenchReport r = bench(p, model, page, workers, runs);
  if (as_json) {
    std::cout << to_json(r).dump(2) << "\n";
    return 0;
  }
  std::printf("layers prepared in %.3f s\n", r.run.prepare_seconds);
  for (const PageTiming& t : r.run.pages) std::printf("page %4d  %.4f s\n", t.page_id, t.median_seconds);
  std::printf("total (median of %d, %d workers)  %.4f s\n", r.run.runs, r.run.workers, r.run.median_total_seconds);
  if (r.baseline) {
    std::printf("1 worker total  %.4f s  speedup %.2fx  identical %s\n", r.baseline->median_total_seconds,
                r.speedup, r.identical ? "yes" : "NO");
  }
  return 0;
}

int cmd_replay(const std::string& project, const std::string& out) {
  const Project stored = load_project(project);
  Project replayed = stored;
  replay_feedback(replayed);
  int differing = 0;
  for (std::size_t i = 0; i < stored.matches.size(); ++i) {
    if (!(stored.matches[i] == replayed.matches[i])) {
      ++differing;
      std::printf("differs: %s\n", stored.matches[i].match_id.c_str());
    }
  }
  std::printf("%zu events replayed over %zu matches, %d differ\n", stored.feedback_log.size(),
              stored.matches.size(), differing);
  if (!out.empty()) save_project(replayed, out);
  return differing == 0 ? 0 : 1;
}

int cmd_export(const std::string& project, const std::string& out) {
  const Project p = load_project(project);
  const ExportSummary s = export_bundle(p, out);
  std::printf("%d entries, %d crops -> %s\n", s.entries, s.crops, out.c_str());
  return 0;
}

int cmd_serve(const std::string& corpus, const std::string& project, const std::string& host, int port, int workers,
              const std::string& ui) {
  EngineConfig defaults;
  defaults.workers = workers;
  WorkbenchService service(defaults.resolved_workers());
  if (!project.empty()) {
    std::printf("opened %s\n", service.open_project(project).dump().c_str());
  } else if (!corpus.empty()) {
    std::printf("opened %s\n", service.open_corpus(corpus).dump().c_str());
  }
  std::optional<fs::path> ui_dir;
  if (!ui.empty()) ui_dir = ui;
  HttpServer server(service, ui_dir);
  const int bound = server.bind(host, port);
  if (bound < 0) {
    std::fprintf(stderr, "cannot bind %s:%d\n", host.c_str(), port);
    return 1;
  }
  std::printf("listening on http://%s:%d\n", host.c_str(), bound);
  std::fflush(stdout);
  return server.listen() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Interactive word spotting and transcription workbench"};
  app.require_subcommand(1);

  std::string corpus, project, out, input, binary_out, box, pred, gt, word, host = "127.0.0.1", ui;
  int page = 0, workers = 0, runs = 5, port = 8080;
  double iou_min = 0.5;
  std::optional<double> threshold;
  bool as_json = false, no_snap = false;

  auto* init = app.add_subcommand("init", "Load a page directory and write project.json");
  init->add_option("--corpus", corpus, "Directory of page images")->required();
  init->add_option("--out", out, "Project file (default: <corpus>/project.json)");

  auto* clean = app.add_subcommand("clean", "Write the band-pass cleaned view of one page");
  clean->add_option("--image", input)->required();
  clean->add_option("--out", out)->required();
  clean->add_option("--binary", binary_out, "Also write the binarized ink layer");

  auto* spot = app.add_subcommand("spot", "Search the corpus for one marked word");
  auto* spot_src = spot->add_option_group("source");
  spot_src->add_option("--project", project);
  spot_src->add_option("--corpus", corpus);
  spot_src->require_option(1);
  spot->add_option("--page", page)->required();
  spot->add_option("--box", box, "X,Y,W,H")->required();
  spot->add_option("--out", out)->required();
  spot->add_option("--threshold", threshold);
  spot->add_option("--workers", workers);
  spot->add_flag("--no-snap", no_snap, "Use the box as given");

  auto* eval = app.add_subcommand("eval", "Score predictions against ground truth");
  eval->add_option("--pred", pred)->required();
  eval->add_option("--gt", gt)->required();
  eval->add_option("--iou", iou_min);
  eval->add_option("--word", word, "Evaluate every prediction as this word");
  eval->add_flag("--json", as_json);

  auto* benchc = app.add_subcommand("bench", "Time a single-query corpus search");
  auto* bench_src = benchc->add_option_group("source");
  bench_src->add_option("--project", project);
  bench_src->add_option("--corpus", corpus);
  bench_src->require_option(1);
  benchc->add_option("--page", page)->required();
  benchc->add_option("--box", box, "X,Y,W,H")->required();
  benchc->add_option("--workers", workers)->default_val(1);
  benchc->add_option("--runs", runs)->default_val(5);
  benchc->add_flag("--json", as_json);

  auto* replay = app.add_subcommand("replay", "Re-apply the feedback log and check the stored match states");
  replay->add_option("--project", project)->required();
  replay->add_option("--out", out, "Write the replayed project");

  auto* exp = app.add_subcommand("export", "Write ground_truth.json and crops");
  exp->add_option("--project", project)->required();
  exp->add_option("--out", out)->required();

  auto* serve = app.add_subcommand("serve", "Run the HTTP workbench");
  serve->add_option("--corpus", corpus);
  serve->add_option("--project", project);
  serve->add_option("--host", host);
  serve->add_option("--port", port);
  serve->add_option("--workers", workers);
  serve->add_option("--ui", ui, "Directory served under /ui/");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*init) return cmd_init(corpus, out);
    if (*clean) return cmd_clean(input, out, binary_out);
    if (*spot) return cmd_spot(project, corpus, page, box, no_snap, out, threshold, workers);
    if (*eval) return cmd_eval(pred, gt, iou_min, word, as_json);
    if (*benchc) return cmd_bench(project, corpus, page, box, workers, runs, as_json);
    if (*replay) return cmd_replay(project, out);
    if (*exp) return cmd_export(project, out);
    if (*serve) return cmd_serve(corpus, project, host, port, workers, ui);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s: %s\n", std::string(to_string(e.code())).c_str(), e.what());
    return 2;
  }
  return 0;
}
