#include "lightray/cli/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "CLI11.hpp"

namespace lightray::cli {

const std::vector<ParamDef>& param_table() {
  static const std::vector<ParamDef> table{
      // experiment
      {"output", "experiment", "output", "lightray-out", "output directory", kIo},
      {"seed", "experiment", "seed", "1", "seed for randomized sampling", kIo},
      {"threads", "experiment", "threads", "",
       "worker thread cap (falls back to LIGHTRAY_THREADS)", kIo},
      {"stages", "experiment", "stages", "", "stage list for `run`, in order", 0},

      // model
      {"n", "model", "n", "2", "spatial dimension", kModel},
      {"metric", "metric", "id", "minkowski",
       "metric id: minkowski, product-stretch, product-lens, perturbed", kModel},
      {"metric-params", "metric", "params", "", "metric parameters", kModel},
      {"phantom", "phantom", "id", "gaussian", "phantom id", kModel},
      {"phantom-params", "phantom", "params", "0.5", "phantom parameters", kModel},
      {"weight", "weight", "id", "one", "weight id: one, sine", kModel},

      // field grid
      {"grid-lo", "grid", "lo", "-3", "lower corner of the cubic field grid", kGrid},
      {"grid-hi", "grid", "hi", "3", "upper corner of the cubic field grid", kGrid},
      {"grid-samples", "grid", "samples", "48", "samples per axis of the field grid", kGrid},

      // sinogram
      {"directions", "sinogram", "directions", "32",
       "number of directions (circle for n = 2, Fibonacci for n = 3)", kSinogram},
      {"x-refine", "sinogram", "x_refine", "1",
       "sinogram x spacing is the grid spacing divided by this", kSinogram},
      {"step-refine", "sinogram", "step_refine", "2",
       "ray quadrature step is the grid spacing divided by this", kSinogram},
      {"source", "sinogram", "source", "field",
       "integrate the sampled field (field) or the closed-form phantom (phantom)", kSinogram},

      // filters
      {"eps-lc", "tolerances", "eps_lc", "1e-3", "light-cone clamp", kFilter | kVisibility},
      {"eps-band", "tolerances", "eps_band", "0.2", "spacelike band margin", kFilter},
      {"pad", "filter", "pad", "1", "zero-padding factor for FFT filters", kFilter},
      {"filter-variant", "filter", "variant", "abs-xi", "abs-xi or abs-zeta", kFilter},

      // slice check
      {"slice-samples", "slice_check", "samples", "20", "random (theta, xi) pairs", kSlice},
      {"xi-min", "slice_check", "xi_min", "0.5", "smallest |xi|", kSlice},
      {"xi-max", "slice_check", "xi_max", "4", "largest |xi|", kSlice},
      {"slice-tolerance", "slice_check", "tolerance", "1e-2", "max relative error", kSlice},

      // radon check
      {"radon-p", "radon", "p", "-1 -0.5 0 0.5 1", "plane offsets", kRadon},
      {"radon-q", "radon", "q", "-0.16 -0.08 0 0.08 0.16", "direction parameters", kRadon},
      {"radon-rotation", "radon", "rotation", "-0.08 -0.04 0 0.04 0.08",
       "rotations of xi away from the reference axis", kRadon},
      {"radon-weights", "radon", "weights", "one sine", "weights to sweep", kRadon},
      {"radon-x-spacing", "radon", "x_spacing", "0.025", "sinogram x spacing", kRadon},
      {"radon-step", "radon", "step", "0.01", "ray quadrature step", kRadon},
      {"radon-tolerance", "radon", "tolerance", "1e-2", "max relative error", kRadon},

      // phase check
      {"phase-h", "phase", "h", "1e-4", "finite-difference step", kPhase},
      {"phase-points", "phase", "points", "5", "random points for the slice derivative", kPhase},
      {"det-tolerance", "phase", "det_tolerance", "1e-3", "bound on |det + 1|", kPhase},
      {"deriv-tolerance", "phase", "deriv_tolerance", "1e-6",
       "bound on the slice derivative error", kPhase},

      // surfaces
      {"surface", "surface", "id", "cylinder",
       "surface id: cylinder, double-cone, hyperboloid, plane, quadric", kSurface},
      {"surface-params", "surface", "params", "", "surface parameters in registry order",
       kSurface},
      {"R", "surface", "R", "", "cylinder radius", kSurface},
      {"c", "surface", "c", "", "cone or hyperboloid slope", kSurface},
      {"C", "surface", "C", "", "hyperboloid constant", kSurface},
      {"t-min", "surface", "t_min", "", "double-cone smoothness cutoff", kSurface},
      {"axis", "surface", "axis", "", "plane axis", kSurface},
      {"offset", "surface", "offset", "", "plane offset", kSurface},
      {"c-tilde", "surface", "c_tilde", "", "quadric slope", kSurface},
      {"a-min", "surface", "a_min", "", "quadric innermost level", kSurface},
      {"a-max", "surface", "a_max", "", "quadric outermost level", kSurface},

      // foliation check
      {"points", "foliation", "points", "8", "random points on a single surface", kFoliation},
      {"box", "foliation", "box", "3", "half extent of the check box", kFoliation},
      {"levels", "foliation", "levels", "11", "sigma samples in [0, 1] for a family",
       kFoliation},
      {"tol-conv", "tolerances", "tol_conv", "1e-8", "strict convexity margin", kFoliation},

      // shrink check
      {"region", "shrink", "region", "4", "half extent of the ray region", kShrink},
      {"shrink-x-samples", "shrink", "x_samples", "81", "x samples per axis", kShrink},
      {"shrink-directions", "shrink", "directions", "48", "number of directions", kShrink},
      {"shrink-step", "shrink", "step", "0.01", "ray sampling step", kShrink},
      {"noise-floor", "shrink", "noise_floor", "1e-10", "largest harmless |Lf|", kShrink},
      {"expect", "shrink", "expect", "consistent",
       "verdict wanted: consistent, violating or any", kShrink},

      // visibility
      {"vis-grid-points", "visibility", "grid_points", "96", "samples per axis", kVisibility},
      {"vis-half-extent", "visibility", "half_extent", "3", "grid half extent", kVisibility},
      {"vis-directions", "visibility", "directions", "256", "number of directions",
       kVisibility},
      {"vis-x-refine", "visibility", "x_refine", "2", "sinogram x refinement", kVisibility},
      {"vis-step-refine", "visibility", "step_refine", "2", "quadrature refinement",
       kVisibility},
      {"edge-cells", "visibility", "edge_cells", "2", "edge ramp width in cells", kVisibility},
      {"vis-region", "visibility", "region", "0.6", "edge energy cube half extent",
       kVisibility},
      {"min-ordering", "visibility", "min_ordering", "5", "required ratio ordering",
       kVisibility},
      {"max-timelike", "visibility", "max_timelike", "0.1", "largest timelike ratio",
       kVisibility},
  };
  return table;
}

IniData parse_ini(std::istream& in) {
  IniData out;
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigINI().from_config(in);
  } catch (const CLI::Error& e) {
    throw UsageError(std::string("config: ") + e.what());
  }
  for (const auto& item : items) {
    if (item.name == "++" || item.name == "--") continue;
    std::string section;
    for (const auto& p : item.parents) section += (section.empty() ? "" : ".") + p;
    if (section.empty()) section = "experiment";
    std::string value;
    for (const auto& v : item.inputs) value += (value.empty() ? "" : " ") + v;
    out[section][item.name] = value;
  }
  return out;
}

IniData read_ini(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file " + path.string());
  return parse_ini(in);
}

Settings Settings::resolve(const IniData& config,
                           const std::map<std::string, std::string>& flags) {
  Settings s;
  for (const auto& p : param_table()) s.set(p.qualified(), p.fallback, Source::Default);
  for (const auto& [section, keys] : config) {
    for (const auto& [key, value] : keys) {
      const std::string q = section + "." + key;
      if (!s.entries_.count(q)) throw UsageError("unknown config key [" + section + "] " + key);
      s.set(q, value, Source::Config);
    }
  }
  for (const auto& [flag, value] : flags) {
    const ParamDef* def = nullptr;
    for (const auto& p : param_table()) {
      if (p.flag == flag) def = &p;
    }
    if (!def) throw UsageError("unknown flag --" + flag);
    s.set(def->qualified(), value, Source::Flag);
  }
  return s;
}

void Settings::set(const std::string& qualified, std::string value, Source source) {
  entries_[qualified] = Entry{std::move(value), source};
}

const std::string& Settings::str(const std::string& qualified) const {
  const auto it = entries_.find(qualified);
  if (it == entries_.end()) throw UsageError("no parameter " + qualified);
  return it->second.value;
}

namespace {

double to_real(const std::string& word, const std::string& key) {
  double v = 0.0;
  const char* end = word.data() + word.size();
  const auto [ptr, ec] = std::from_chars(word.data(), end, v);
  if (ec != std::errc() || ptr != end) throw UsageError(key + ": not a number: '" + word + "'");
  return v;
}

}  // namespace

double Settings::real(const std::string& qualified) const {
  const auto v = reals(qualified);
  if (v.size() != 1) throw UsageError(qualified + ": expected one number");
  return v[0];
}

long Settings::integer(const std::string& qualified) const {
  const std::string& w = str(qualified);
  long v = 0;
  const char* end = w.data() + w.size();
  const auto [ptr, ec] = std::from_chars(w.data(), end, v);
  if (ec != std::errc() || ptr != end) throw UsageError(qualified + ": not an integer: '" + w + "'");
  return v;
}

std::size_t Settings::count(const std::string& qualified) const {
  const long v = integer(qualified);
  if (v <= 0) throw UsageError(qualified + ": must be positive");
  return static_cast<std::size_t>(v);
}

std::vector<std::string> Settings::words(const std::string& qualified) const {
  std::string text = str(qualified);
  for (char& ch : text) {
    if (ch == ',') ch = ' ';
  }
  std::istringstream in(text);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

std::vector<double> Settings::reals(const std::string& qualified) const {
  std::vector<double> out;
  for (const auto& w : words(qualified)) out.push_back(to_real(w, qualified));
  return out;
}

}  // namespace lightray::cli
