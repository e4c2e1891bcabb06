#include "tmc/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <map>

#include <CLI11.hpp>

#include "tmc/counting.hpp"
#include "tmc/error.hpp"
#include "tmc/geo.hpp"
#include "tmc/ingest.hpp"
#include "tmc/intersection.hpp"
#include "tmc/report.hpp"
#include "tmc/simgen.hpp"
#include "tmc/text_util.hpp"

namespace tmc::cli {

namespace fs = std::filesystem;

namespace {

struct Options {
  std::string config;
  std::string out_dir;
  bool strict = false;

  // georef
  std::string gcps;
  std::string frame_id;
  std::string registry;

  // estimate
  std::vector<std::string> logs;
  double bin_seconds = 300.0;
  std::optional<double> min_headway_right;
  std::optional<double> min_headway_other;
  std::optional<double> cluster_gap;
  std::optional<double> dedup_window;

  // compare
  std::string est;
  std::string gt;
  std::string group_by;
  std::string format = "text";

  // simulate
  std::string scenario;
  std::string script;
  std::optional<std::uint64_t> seed;
  std::optional<double> frame_rate;
  std::optional<double> dropout;
  std::optional<double> noise_sigma;
};

class Run {
 public:
  Run(std::string command, const std::vector<std::string>& args) {
    manifest_.command = std::move(command);
    manifest_.argv = args;
  }

  std::string read_input(const std::string& path) {
    std::string data = text::read_file(path);
    manifest_.inputs.push_back({path, text::fnv1a_hex(data)});
    return data;
  }

  void write_output(const fs::path& dir, const std::string& name, std::string_view content) {
    text::write_file_atomic(dir / name, content);
    manifest_.outputs.push_back(name);
  }

  void finish(const fs::path& dir) {
    manifest_.wall_clock = utc_now();
    text::write_file_atomic(dir / "manifest.json", manifest_to_json(manifest_));
  }

  RunManifest& manifest() { return manifest_; }

 private:
  RunManifest manifest_;
};

fs::path prepare_out_dir(const std::string& dir) {
  if (dir.empty()) {
    throw Error(ErrorKind::InvalidArgument, "--out-dir is required");
  }
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw Error(ErrorKind::Io, "cannot create output directory '" + dir + "': " + ec.message());
  }
  return dir;
}

intersection::IntersectionConfig load_config(Run& run, const std::string& path) {
  run.manifest().config = path;
  return intersection::config_from_json(run.read_input(path));
}

void apply_params(const Options& o, counting::CountingParams& p, RunManifest& m) {
  auto set = [&](const char* name, const std::optional<double>& v, double& field) {
    if (v) {
      field = *v;
      m.parameters.emplace_back(name, text::format_double(*v));
    }
  };
  set("min_headway_right", o.min_headway_right, p.min_headway_right);
  set("min_headway_other", o.min_headway_other, p.min_headway_other);
  set("cluster_gap", o.cluster_gap, p.cluster_gap);
  if (o.dedup_window) {
    set("dedup_window", o.dedup_window, p.dedup_window);
  } else {
    set("dedup_window", o.cluster_gap, p.dedup_window);  // follows cluster_gap unless given
  }
  p.validate();
}

void note_shared_zones(const intersection::IntersectionConfig& cfg, RunManifest& m) {
  const auto shared = cfg.shared_left_uturn_zones();
  if (!shared.empty()) {
    std::string ids;
    for (const auto& id : shared) {
      ids += (ids.empty() ? "" : ", ") + id;
    }
    m.notes.push_back("zones binding both Left and UTurn of one approach count as the first "
                      "permissible binding: " + ids);
  }
}

int cmd_georef(const Options& o, Run& run, std::ostream& out) {
  const fs::path dir = prepare_out_dir(o.out_dir);
  geo::FrameRegistry registry;
  if (!o.registry.empty()) {
    registry = geo::registry_from_json(run.read_input(o.registry));
  }
  if (!o.config.empty()) {
    const auto cfg = load_config(run, o.config);
    if (!registry.ned_origin()) {
      registry.set_ned_origin(cfg.ned_origin);
    }
  }
  const auto pairs = geo::parse_gcp_csv(run.read_input(o.gcps));
  std::vector<std::string> ids;
  for (const auto& p : pairs) {
    if (std::find(ids.begin(), ids.end(), p.sensor.frame_id) == ids.end()) {
      ids.push_back(p.sensor.frame_id);
    }
  }
  if (!o.frame_id.empty()) {
    if (std::find(ids.begin(), ids.end(), o.frame_id) == ids.end()) {
      throw Error(ErrorKind::InsufficientPoints, "no GCPs for frame '" + o.frame_id + "'");
    }
    ids = {o.frame_id};
    run.manifest().parameters.emplace_back("frame_id", o.frame_id);
  }
  if (ids.empty()) {
    throw Error(ErrorKind::InsufficientPoints, "GCP file has no correspondences");
  }
  for (const auto& id : ids) {
    std::vector<geo::GcpPair> subset;
    std::copy_if(pairs.begin(), pairs.end(), std::back_inserter(subset),
                 [&](const auto& p) { return p.sensor.frame_id == id; });
    const auto fit = geo::estimate_transform_from_gcps(subset);
    registry.register_frame(id, fit.transform);
    out << "frame " << id << ": " << subset.size() << " points, rmse_m=" << text::format_double(fit.rmse)
        << "\n";
  }
  run.write_output(dir, "registry.json", geo::registry_to_json(registry));
  run.finish(dir);
  return 0;
}

int cmd_estimate(const Options& o, Run& run, std::ostream& out) {
  if (o.config.empty() || o.registry.empty()) {
    throw Error(ErrorKind::InvalidArgument, "estimate needs --config and --registry");
  }
  const fs::path dir = prepare_out_dir(o.out_dir);
  auto cfg = load_config(run, o.config);
  apply_params(o, cfg.params, run.manifest());
  if (o.bin_seconds != 300.0) {
    run.manifest().parameters.emplace_back("bin_seconds", text::format_double(o.bin_seconds));
  }
  if (o.strict) {
    run.manifest().parameters.emplace_back("strict", "true");
  }
  const auto registry = geo::registry_from_json(run.read_input(o.registry));

  const auto policy = o.strict ? ingest::MalformedPolicy::Abort : ingest::MalformedPolicy::SkipAndLog;
  std::vector<std::vector<ingest::Frame>> streams;
  for (const auto& path : o.logs) {
    auto parsed = ingest::parse_detection_log(run.read_input(path), std::nullopt, policy);
    for (const auto& issue : parsed.skipped) {
      run.manifest().warnings.push_back(path + ":" + std::to_string(issue.line) +
                                        ": skipped: " + issue.reason);
    }
    streams.push_back(std::move(parsed.frames));
  }
  const auto merged = ingest::merge_streams(streams);
  auto ned = ingest::frames_to_ned(merged, registry);

  const auto start = cfg.schedule.session_start();
  const auto end = cfg.schedule.session_end();
  const auto before = ned.frames.size();
  std::erase_if(ned.frames, [&](const auto& f) { return !(f.t >= start && f.t < end); });
  if (const auto dropped = before - ned.frames.size(); dropped > 0) {
    run.manifest().warnings.push_back(std::to_string(dropped) +
                                      " frames outside the session were ignored");
  }
  note_shared_zones(cfg, run.manifest());

  const auto events = counting::count_events(ned, cfg, cfg.params);
  const auto table =
      counting::estimate_tmc(events, o.bin_seconds, start, end, cfg.classes.size());
  run.write_output(dir, "tmc.csv", report::table_to_csv(table));
  run.write_output(dir, "events.csv", counting::events_to_csv(events));
  run.finish(dir);
  out << events.size() << " movement events, " << table.num_bins() << " bins";
  if (!run.manifest().warnings.empty()) {
    out << ", " << run.manifest().warnings.size() << " warnings (see manifest.json)";
  }
  out << "\n";
  return 0;
}

int cmd_compare(const Options& o, Run& run, std::ostream& out) {
  const auto est = report::table_from_csv(run.read_input(o.est));
  const auto gt = report::table_from_csv(run.read_input(o.gt));
  const auto dims = report::parse_dims(o.group_by);
  if (!o.group_by.empty()) {
    run.manifest().parameters.emplace_back("group_by", o.group_by);
  }
  const auto rep = report::compare(est, gt, dims);
  out << report::render_report(rep, o.format == "csv" ? report::Format::Csv : report::Format::Text);
  if (!o.out_dir.empty()) {
    const fs::path dir = prepare_out_dir(o.out_dir);
    run.write_output(dir, "report.csv", report::render_report(rep, report::Format::Csv));
    run.write_output(dir, "shares.csv", report::render_shares_csv(rep));
    run.finish(dir);
  }
  return 0;
}

int cmd_simulate(const Options& o, Run& run, std::ostream& out) {
  if (!o.seed) {
    throw Error(ErrorKind::InvalidArgument,
                "simulate requires an explicit --seed so runs are reproducible");
  }
  if (o.scenario.empty() == o.script.empty()) {
    throw Error(ErrorKind::InvalidArgument, "simulate needs exactly one of --scenario or --script");
  }
  const fs::path dir = prepare_out_dir(o.out_dir);
  intersection::IntersectionConfig cfg;
  std::vector<simgen::ScriptedVehicle> script;
  simgen::SimConfig sim;
  if (!o.scenario.empty()) {
    const auto& sc = simgen::scenario(o.scenario);
    run.manifest().parameters.emplace_back("scenario", o.scenario);
    cfg = o.config.empty() ? sc.config : load_config(run, o.config);
    script = sc.script;
    sim = sc.sim;
  } else {
    cfg = o.config.empty() ? intersection::reference_intersection() : load_config(run, o.config);
    auto [vehicles, block] = simgen::script_from_json(run.read_input(o.script));
    script = std::move(vehicles);
    if (block) {
      sim = *block;
    }
  }
  if (run.manifest().config.empty()) {
    run.manifest().config = o.scenario.empty() ? "builtin:reference" : "builtin:" + o.scenario;
  }
  auto override = [&](const char* name, const std::optional<double>& v, double& field) {
    if (v) {
      field = *v;
      run.manifest().parameters.emplace_back(name, text::format_double(*v));
    }
  };
  override("frame_rate", o.frame_rate, sim.frame_rate);
  override("dropout", o.dropout, sim.dropout);
  override("noise_sigma", o.noise_sigma, sim.noise_sigma);
  if (o.bin_seconds != 300.0) {
    run.manifest().parameters.emplace_back("bin_seconds", text::format_double(o.bin_seconds));
  }
  sim.seed = *o.seed;
  run.manifest().seed = *o.seed;

  const auto session = simgen::simulate(script, cfg, sim, o.bin_seconds);
  for (const auto& [id, frames] : session.logs) {
    run.write_output(dir, id + ".jsonl", ingest::serialize_log(frames));
  }
  run.write_output(dir, "registry.json", geo::registry_to_json(session.registry));
  run.write_output(dir, "config.json", intersection::config_to_json(cfg));
  run.write_output(dir, "script.json", simgen::script_to_json(session.script, sim));
  run.write_output(dir, "ground_truth.csv", report::table_to_csv(session.ground_truth));
  note_shared_zones(cfg, run.manifest());
  run.finish(dir);
  out << session.script.size() << " vehicles, " << session.logs.size() << " sensor logs written to "
      << dir.string() << "\n";
  return 0;
}

void add_param_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--min-headway-right", o.min_headway_right, "seconds between right-turn vehicles");
  cmd->add_option("--min-headway-other", o.min_headway_other, "seconds between other vehicles");
  cmd->add_option("--cluster-gap", o.cluster_gap, "max gap between triggers of one vehicle");
  cmd->add_option("--dedup-window", o.dedup_window, "cross-sensor duplicate window");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Turning movement counts from roadside LiDAR detections", "tmc"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  auto* georef = app.add_subcommand("georef", "fit sensor frames to surveyed control points");
  georef->add_option("--gcps", o.gcps, "GCP CSV: frame_id,sx,sy,sz,lat,lon,alt")->required();
  georef->add_option("--frame-id", o.frame_id, "fit only this frame");
  georef->add_option("--registry", o.registry, "existing registry to update");
  georef->add_option("--config", o.config, "intersection config supplying the NED origin");
  georef->add_option("--out-dir", o.out_dir)->required();

  auto* estimate = app.add_subcommand("estimate", "count movements from detection logs");
  estimate->add_option("logs", o.logs, "detection logs (JSON lines, optionally gzip)");
  estimate->add_option("--config", o.config)->required();
  estimate->add_option("--registry", o.registry)->required();
  estimate->add_option("--out-dir", o.out_dir)->required();
  estimate->add_option("--bin", o.bin_seconds, "bin width in seconds")->check(CLI::PositiveNumber);
  estimate->add_flag("--strict", o.strict, "abort on malformed lines");
  add_param_flags(estimate, o);

  auto* compare = app.add_subcommand("compare", "compare an estimate with ground truth");
  compare->add_option("--est", o.est)->required();
  compare->add_option("--gt", o.gt)->required();
  compare->add_option("--group-by", o.group_by, "comma list of time,approach,movement,class");
  compare->add_option("--format", o.format)->check(CLI::IsMember({"text", "csv"}));
  compare->add_option("--out-dir", o.out_dir);

  auto* simulate = app.add_subcommand("simulate", "synthesize detection logs and ground truth");
  simulate->add_option("--scenario", o.scenario, "bundled scenario name");
  simulate->add_option("--script", o.script, "vehicle script JSON");
  simulate->add_option("--config", o.config);
  simulate->add_option("--seed", o.seed);
  simulate->add_option("--out-dir", o.out_dir)->required();
  simulate->add_option("--bin", o.bin_seconds)->check(CLI::PositiveNumber);
  simulate->add_option("--frame-rate", o.frame_rate);
  simulate->add_option("--dropout", o.dropout);
  simulate->add_option("--noise-sigma", o.noise_sigma);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  Run run(name, args);
  try {
    if (name == "georef") {
      return cmd_georef(o, run, out);
    }
    if (name == "estimate") {
      return cmd_estimate(o, run, out);
    }
    if (name == "compare") {
      return cmd_compare(o, run, out);
    }
    return cmd_simulate(o, run, out);
  } catch (const Error& e) {
    err << "tmc " << name << ": " << to_string(e.kind()) << ": " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "tmc " << name << ": internal error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace tmc::cli
