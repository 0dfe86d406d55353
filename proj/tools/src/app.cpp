#include "lightray/cli/app.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <ostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "lightray/cli/config.hpp"
#include "lightray/cli/output.hpp"
#include "lightray/cli/stages.hpp"
#include "lightray/error.hpp"
#include "lightray/parallel.hpp"

#ifndef LIGHTRAY_VERSION
#define LIGHTRAY_VERSION "unknown"
#endif

namespace lightray::cli {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

std::string version() { return LIGHTRAY_VERSION; }

namespace {

struct Command {
  CLI::App* app = nullptr;
  std::string name;
  std::string config;
  std::map<std::string, std::string> values;  // flag -> raw value
  std::map<std::string, CLI::Option*> options;
};

std::string describe(const ParamDef& p) {
  std::string d = p.help;
  d += " [config: " + p.section + "." + p.key;
  if (!p.fallback.empty()) d += ", default: " + p.fallback;
  return d + "]";
}

void add_params(Command& c, unsigned groups, bool with_stage_list) {
  for (const auto& p : param_table()) {
    const bool wanted = (p.groups & groups) != 0 || (with_stage_list && p.flag == "stages");
    if (!wanted) continue;
    auto& slot = c.values[p.flag];
    CLI::Option* opt = c.app->add_option("--" + p.flag, slot, describe(p));
    opt->allow_extra_args(false)->type_name("VALUE");
    c.options[p.flag] = opt;
  }
}

// Registry ids and grids are checked before any stage runs so that a bad
// configuration is a usage error rather than a stage failure.
void validate(Context& ctx, const std::vector<const StageDef*>& stages) {
  try {
    for (const StageDef* s : stages) {
      if (s->groups & kModel) {
        (void)ctx.metric();
        (void)ctx.phantom();
        (void)ctx.weight();
      }
      if (s->groups & kGrid) ctx.grid().validate();
      if (s->groups & kSurface) (void)ctx.surface();
    }
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  }
}

Json config_echo(const Settings& s) {
  Json out = Json::object();
  for (const auto& [key, entry] : s.entries()) {
    const auto dot = key.find('.');
    out[key.substr(0, dot)][key.substr(dot + 1)] = entry.value;
  }
  return out;
}

void write_manifest(const fs::path& path, Json manifest, const Context& ctx) {
  Json files = Json::array();
  for (const auto& f : ctx.outputs()) {
    if (!fs::exists(f)) continue;
    char crc[16];
    std::snprintf(crc, sizeof crc, "%08x", static_cast<unsigned>(crc32_file(f)));
    files.push_back({{"path", fs::relative(f, ctx.output_dir()).generic_string()},
                     {"bytes", fs::file_size(f)},
                     {"crc32", crc}});
  }
  manifest["files"] = std::move(files);
  std::ofstream out(path, std::ios::binary);
  out << manifest.dump(2) << '\n';
  if (!out) throw Error("cannot write " + path.string());
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Light-ray transform experiments on Lorentzian spacetimes.", "lightray"};
  app.set_version_flag("--version", version());
  app.require_subcommand(1, 1);

  std::vector<std::unique_ptr<Command>> commands;
  for (const auto& stage : stage_table()) {
    auto c = std::make_unique<Command>();
    c->name = stage.name;
    c->app = app.add_subcommand(stage.name, stage.help);
    c->app->add_option("--config", c->config, "INI configuration file; flags win over its keys");
    add_params(*c, stage.groups | kIo, false);
    commands.push_back(std::move(c));
  }
  {
    auto c = std::make_unique<Command>();
    c->name = "run";
    c->app = app.add_subcommand("run", "run the stages listed in [experiment] stages");
    c->app->add_option("config", c->config, "INI configuration file")->required();
    add_params(*c, kAllGroups, true);
    commands.push_back(std::move(c));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    if (code == 0) return kExitOk;
    err << app.help();
    return kExitUsage;
  }

  const Command* cmd = nullptr;
  for (const auto& c : commands) {
    if (c->app->parsed()) cmd = c.get();
  }

  std::optional<Context> ctx;
  std::vector<const StageDef*> stages;
  try {
    IniData ini;
    if (!cmd->config.empty()) ini = read_ini(cmd->config);
    std::map<std::string, std::string> flags;
    for (const auto& [flag, opt] : cmd->options) {
      if (opt->count() > 0) flags[flag] = cmd->values.at(flag);
    }
    Settings settings = Settings::resolve(ini, flags);
    if (cmd->name == "run") {
      for (const auto& w : settings.words("experiment.stages")) {
        const StageDef* s = find_stage(w);
        if (!s) throw UsageError("unknown stage '" + w + "'");
        stages.push_back(s);
      }
    } else {
      stages.push_back(find_stage(cmd->name));
    }
    if (settings.has("experiment.threads")) {
      const long t = settings.integer("experiment.threads");
      if (t <= 0) throw UsageError("threads must be positive");
      set_thread_count(static_cast<int>(t));
    }
    fs::path dir = settings.str("experiment.output");
    ctx.emplace(std::move(settings), std::move(dir));
    validate(*ctx, stages);
  } catch (const UsageError& e) {
    err << "lightray: " << e.what() << "\nRun with --help for more information.\n";
    return kExitUsage;
  }

  Json manifest;
  manifest["tool"] = "lightray";
  manifest["version"] = version();
  manifest["command"] = cmd->name;
  manifest["config_file"] = cmd->config.empty() ? Json() : Json(cmd->config);
  manifest["threads"] = thread_count();
  manifest["config"] = config_echo(ctx->settings());
  manifest["stages"] = Json::array();

  const fs::path manifest_path = ctx->output_dir() / "manifest.json";
  int code = kExitOk;
  try {
    fs::create_directories(ctx->output_dir());
  } catch (const fs::filesystem_error& e) {
    err << "lightray: " << e.what() << '\n';
    return kExitStageFailure;
  }

  for (const StageDef* stage : stages) {
    Json record;
    record["name"] = stage->name;
    const auto start = std::chrono::steady_clock::now();
    auto seconds = [&] {
      return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    };
    try {
      const StageOutcome o = stage->run(*ctx);
      const double secs = seconds();
      record["status"] = o.pass ? "pass" : "fail";
      record["seconds"] = secs;
      record["summary"] = o.summary;
      Json metrics = Json::object();
      for (const auto& [k, v] : o.metrics) metrics[k] = v;
      record["metrics"] = std::move(metrics);
      char t[32];
      std::snprintf(t, sizeof t, "%.1f", secs);
      out << (o.pass ? "[PASS] " : "[FAIL] ") << stage->name << ": " << o.summary << " (" << t
          << " s)\n";
      if (!o.pass) code = kExitStageFailure;
    } catch (const UsageError& e) {
      record["status"] = "error";
      record["seconds"] = seconds();
      record["error"] = e.what();
      err << "lightray: " << stage->name << ": " << e.what() << '\n';
      code = kExitUsage;
    } catch (const std::exception& e) {
      record["status"] = "error";
      record["seconds"] = seconds();
      record["error"] = e.what();
      out << "[ERROR] " << stage->name << ": " << e.what() << '\n';
      code = kExitStageFailure;
    }
    manifest["stages"].push_back(std::move(record));
    if (code != kExitOk) break;
  }

  manifest["status"] = code == kExitOk ? "ok" : "failed";
  manifest["exit_code"] = code;
  try {
    write_manifest(manifest_path, std::move(manifest), *ctx);
  } catch (const std::exception& e) {
    err << "lightray: " << e.what() << '\n';
    return kExitStageFailure;
  }
  out << "manifest: " << manifest_path.generic_string() << '\n';
  return code;
}

}  // namespace lightray::cli
