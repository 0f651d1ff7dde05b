#include "iliosim/cli.hpp"

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "iliosim/cohort.hpp"
#include "iliosim/document.hpp"
#include "iliosim/error.hpp"
#include "iliosim/json_util.hpp"
#include "iliosim/service.hpp"

namespace iliosim::cli {

namespace fs = std::filesystem;
using json_util::json;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

anatomy::AnatomyModel read_anatomy(const std::string& path) {
  if (path.empty()) return anatomy::default_anatomy();
  return anatomy::load_anatomy_text(read_file(path));
}

int simulate(const std::string& anatomy_path, const std::string& script_path, const std::string& views_path,
             const std::string& out_path, const std::string& images_dir, std::ostream& out) {
  const anatomy::AnatomyModel model = read_anatomy(anatomy_path);
  const json script_doc = json_util::parse(read_file(script_path), "script");
  fluoro::ViewParams params;
  if (!views_path.empty()) {
    params = fluoro::view_params_from_json(json_util::parse(read_file(views_path), "views"));
  } else if (script_doc.contains("views")) {
    params = fluoro::view_params_from_json(script_doc["views"]);
  }
  const auto views = fluoro::standard_views(model, params);
  const auto commands = session::script_from_json(script_doc);
  const auto state = session::replay(model, views, commands);
  const auto doc = service::make_document(model, params, state);
  write_file(out_path, service::to_canonical(doc));
  if (!images_dir.empty()) {
    for (const auto& img : state.radiographs) {
      write_file(fs::path(images_dir) / fmt::format("xray-{:04d}.json", img.seq), fluoro::radiograph_to_text(img));
    }
  }
  out << fmt::format("events: {}\nphase: {}\n", state.events.size(), session::to_string(state.phase));
  if (doc.metrics) {
    const auto& m = *doc.metrics;
    const auto lesson = assess::lesson_for(m.final_assessment);
    out << fmt::format("xray_count: {}\ntrial_count: {}\niatrogenic_level: {}\nduration: {}\nassessment: {}\n",
                       m.xray_count, m.trial_count, m.iatrogenic_level, m.duration,
                       assess::comment_for(m.final_assessment));
    if (lesson) out << "lesson: " << *lesson << "\n";
  }
  return 0;
}

int analyze(const std::string& roster_path, const std::string& sessions_dir, const std::string& out_path,
            const std::string& table_path, double alpha, std::ostream& out) {
  const cohort::Roster roster = cohort::roster_from_json(json_util::parse(read_file(roster_path), "roster"));
  std::map<std::string, assess::SessionMetrics> metrics;
  for (const auto& p : roster.profiles) {
    const fs::path file = fs::path(sessions_dir) / (p.operator_id + ".json");
    if (!fs::exists(file)) {
      throw Error(ErrorCode::MissingMetrics, "no session document for operator '" + p.operator_id + "' (" +
                                                 file.string() + ")");
    }
    const auto doc = service::from_text(read_file(file));
    service::rebuild(doc);
    if (!doc.metrics) {
      throw Error(ErrorCode::MissingMetrics, "session of operator '" + p.operator_id + "' is not confirmed");
    }
    metrics.emplace(p.operator_id, *doc.metrics);
  }
  const auto report = cohort::cohort_report(roster.profiles, metrics, alpha);
  json doc = cohort::report_to_json(report);
  json assignment = json::object();
  for (const auto& p : roster.profiles) assignment[p.operator_id] = cohort::to_string(*p.group);
  doc["assignment"] = std::move(assignment);
  write_file(out_path, json_util::canonical(doc));
  const std::string table = cohort::report_to_table(report);
  if (!table_path.empty()) write_file(table_path, table);
  out << table;
  return 0;
}

int views(const std::string& anatomy_path, const std::string& views_path, std::ostream& out) {
  const anatomy::AnatomyModel model = read_anatomy(anatomy_path);
  fluoro::ViewParams params;
  if (!views_path.empty()) params = fluoro::view_params_from_json(json_util::parse(read_file(views_path), "views"));
  json arr = json::array();
  for (const auto& v : fluoro::standard_views(model, params)) arr.push_back(fluoro::view_spec_to_json(v));
  out << json_util::canonical(json{{"params", fluoro::view_params_to_json(params)}, {"views", arr}});
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Iliosacral guide-wire insertion trainer", "iliosim"};
  app.require_subcommand(1);

  std::string anatomy_path, script_path, views_path, out_path, images_dir;
  auto* sim = app.add_subcommand("simulate", "Replay a command script headlessly and write the session document");
  sim->add_option("--anatomy", anatomy_path, "Anatomy config (defaults built in)")->check(CLI::ExistingFile);
  sim->add_option("--script", script_path, "Command script")->required()->check(CLI::ExistingFile);
  sim->add_option("--views", views_path, "C-arm view parameters")->check(CLI::ExistingFile);
  sim->add_option("--out", out_path, "Session document to write")->required();
  sim->add_option("--images", images_dir, "Directory for the rendered radiographs");

  std::string roster_path, sessions_dir, report_path, table_path;
  double alpha = 0.05;
  auto* ana = app.add_subcommand("analyze", "Group report for a roster and its session documents");
  ana->add_option("--roster", roster_path, "Roster document")->required()->check(CLI::ExistingFile);
  ana->add_option("--sessions", sessions_dir, "Directory of <operator_id>.json session documents")
      ->required()
      ->check(CLI::ExistingDirectory);
  ana->add_option("--out", report_path, "Report document to write")->required();
  ana->add_option("--table", table_path, "Also write the plain-text table here");
  ana->add_option("--alpha", alpha, "Significance threshold")->check(CLI::Range(0.0, 1.0));

  int port = 8080;
  std::string host = "127.0.0.1";
  std::string store_dir = service::default_store_dir().string();
  auto* srv = app.add_subcommand("serve", "Run the HTTP API");
  srv->add_option("--port", port, "TCP port")->check(CLI::Range(1, 65535));
  srv->add_option("--host", host, "Bind address");
  srv->add_option("--store", store_dir, "Session store directory (env ILIOSIM_STORE)");

  std::string v_anatomy, v_views;
  auto* vw = app.add_subcommand("views", "Print the three standard C-arm views");
  vw->add_option("--anatomy", v_anatomy, "Anatomy config")->check(CLI::ExistingFile);
  vw->add_option("--views", v_views, "C-arm view parameters")->check(CLI::ExistingFile);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "iliosim: " << e.what() << "\n" << "run 'iliosim --help' for usage\n";
    return 2;
  }

  try {
    if (*sim) return simulate(anatomy_path, script_path, views_path, out_path, images_dir, out);
    if (*ana) return analyze(roster_path, sessions_dir, report_path, table_path, alpha, out);
    if (*srv) return service::serve(host, port, store_dir);
    if (*vw) return views(v_anatomy, v_views, out);
  } catch (const Error& e) {
    err << "iliosim: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "iliosim: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace iliosim::cli
