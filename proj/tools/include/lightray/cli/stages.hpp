#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lightray/cli/config.hpp"
#include "lightray/fields.hpp"
#include "lightray/foliation.hpp"
#include "lightray/geometry.hpp"
#include "lightray/transform.hpp"

namespace lightray::cli {

// What a stage reports back: a verdict, a one-line summary and named numbers
// for the manifest.
struct StageOutcome {
  bool pass = true;
  std::string summary;
  std::vector<std::pair<std::string, double>> metrics;
};

// State shared by the stages of one invocation. Intermediate products are
// built on first use, so any stage can run on its own.
class Context {
 public:
  Context(Settings settings, std::filesystem::path output_dir);

  [[nodiscard]] const Settings& settings() const { return settings_; }
  [[nodiscard]] int n() const;

  [[nodiscard]] MetricPtr metric() const;
  [[nodiscard]] PhantomPtr phantom() const;
  [[nodiscard]] WeightPtr weight() const;
  [[nodiscard]] SurfacePtr surface() const;
  [[nodiscard]] GridSpec grid() const;

  const ScalarField& field();
  const Sinogram& sino();
  const ScalarField& normal_field();

  // Path for an output file; the file is listed in the manifest.
  std::filesystem::path output(const std::string& name);
  [[nodiscard]] const std::vector<std::filesystem::path>& outputs() const { return outputs_; }
  [[nodiscard]] const std::filesystem::path& output_dir() const { return dir_; }

 private:
  Settings settings_;
  std::filesystem::path dir_;
  std::vector<std::filesystem::path> outputs_;
  std::optional<ScalarField> field_;
  std::optional<Sinogram> sino_;
  std::optional<ScalarField> normal_;
};

using StageFn = StageOutcome (*)(Context&);

struct StageDef {
  std::string name;
  std::string help;
  unsigned groups = 0;  // parameter groups the stage reads
  StageFn run = nullptr;
};

const std::vector<StageDef>& stage_table();
const StageDef* find_stage(const std::string& name);

// Cubic x-grid with spacing hx centred at 0 that contains the shadow
// {x - t theta} of the box for every unit theta.
GridSpec shadow_grid(const Box& box, double hx);

// Registry parameters for the configured surface: surface.params, with the
// named keys (R, c, C, ...) overriding their registry positions.
std::vector<double> surface_params(const Settings& settings);

}  // namespace lightray::cli
