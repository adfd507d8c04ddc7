#include "xpci/config.hpp"

#include "xpci/errors.hpp"

#include <fstream>
#include <set>

namespace xpci::config {

using nlohmann::json;

namespace {

// Reads one JSON object, remembering which keys were consumed.
class Reader {
public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw SchemaError(label(), "must be an object");
  }

  std::string key_path(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  template <class T>
  T get(const std::string& key) {
    if (!j_.contains(key)) throw SchemaError(key_path(key), "required key is missing");
    return convert<T>(key);
  }

  template <class T>
  T get_or(const std::string& key, T fallback) {
    return j_.contains(key) ? convert<T>(key) : fallback;
  }

  double positive(const std::string& key) {
    const double v = get<double>(key);
    if (!(v > 0.0)) throw SchemaError(key_path(key), "must be > 0");
    return v;
  }

  double non_negative(const std::string& key, double fallback) {
    const double v = get_or<double>(key, fallback);
    if (!(v >= 0.0)) throw SchemaError(key_path(key), "must be >= 0");
    return v;
  }

  const json& child(const std::string& key) {
    used_.insert(key);
    return j_.at(key);
  }

  void finish() const {
    for (const auto& item : j_.items())
      if (!used_.count(item.key())) throw SchemaError(key_path(item.key()), "unknown key");
  }

private:
  std::string label() const { return path_.empty() ? "<root>" : path_; }

  template <class T>
  T convert(const std::string& key) {
    used_.insert(key);
    try {
      return j_.at(key).get<T>();
    } catch (const json::exception&) {
      throw SchemaError(key_path(key), "has the wrong type");
    }
  }

  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

GridSpec parse_grid(const json& j) {
  Reader r(j, "grid");
  GridSpec g;
  g.nx = r.get<std::size_t>("nx");
  g.ny = r.get<std::size_t>("ny");
  if (g.nx < 2) throw SchemaError("grid.nx", "must be >= 2");
  if (g.ny < 2) throw SchemaError("grid.ny", "must be >= 2");
  g.dx_m = r.positive("dx_m");
  g.dy_m = r.has("dy_m") ? r.positive("dy_m") : g.dx_m;
  r.finish();
  return g;
}

SourceSpec parse_source(const json& j) {
  Reader r(j, "source");
  SourceSpec s;
  s.model = r.get_or<std::string>("model", "plane_wave");
  if (s.model != "plane_wave" && s.model != "tilted_plane_waves" &&
      s.model != "random_phase_screen")
    throw SchemaError("source.model",
                      "must be plane_wave, tilted_plane_waves or random_phase_screen");
  s.cone_half_angle_rad = r.non_negative("cone_half_angle_rad", 0.0);
  s.correlation_length_m = r.non_negative("correlation_length_m", 0.0);
  s.rms_phase_rad = r.non_negative("rms_phase_rad", 0.0);
  s.modes = r.get_or<std::size_t>("modes", 1);
  if (s.modes == 0) throw SchemaError("source.modes", "must be >= 1");
  if (s.model == "random_phase_screen" && s.rms_phase_rad > 0.0 && s.correlation_length_m == 0.0)
    throw SchemaError("source.correlation_length_m", "required for a random phase screen");
  if (r.has("wavelength_m") == r.has("bins"))
    throw SchemaError("source.wavelength_m", "give exactly one of wavelength_m or bins");
  if (r.has("wavelength_m")) {
    s.bins.push_back({r.positive("wavelength_m"), 1.0, 1.0});
  } else {
    const json& bins = r.child("bins");
    if (!bins.is_array() || bins.empty())
      throw SchemaError("source.bins", "must be a nonempty array");
    for (std::size_t i = 0; i < bins.size(); ++i) {
      Reader b(bins[i], "source.bins[" + std::to_string(i) + "]");
      SpectralBin bin;
      bin.wavelength_m = b.positive("wavelength_m");
      bin.efficiency = b.non_negative("efficiency", 1.0);
      bin.amplitude = b.non_negative("amplitude", 1.0);
      b.finish();
      s.bins.push_back(bin);
    }
  }
  r.finish();
  return s;
}

PhantomSpec parse_phantom(const json& j) {
  Reader r(j, "phantom");
  if (r.get<std::string>("kind") != "sphere") throw SchemaError("phantom.kind", "must be sphere");
  PhantomSpec p;
  p.diameter_m = r.positive("diameter_m");
  p.delta = r.non_negative("delta", 0.0);
  p.beta = r.non_negative("beta", 0.0);
  p.centre_x_m = r.get_or<double>("centre_x_m", 0.0);
  p.centre_y_m = r.get_or<double>("centre_y_m", 0.0);
  r.finish();
  return p;
}

std::vector<StageSpec> parse_stages(const json& j) {
  if (!j.is_array()) throw SchemaError("stages", "must be an array");
  std::vector<StageSpec> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string path = "stages[" + std::to_string(i) + "]";
    Reader r(j[i], path);
    StageSpec s;
    s.type = r.get<std::string>("type");
    if (s.type == "free_space") {
      s.distance_m = r.get<double>("distance_m");
    } else if (s.type == "analyser") {
      s.profile_file = r.get<std::string>("profile_file");
      s.axis = r.get_or<std::string>("axis", "x");
      if (s.axis != "x" && s.axis != "y") throw SchemaError(path + ".axis", "must be x or y");
    } else if (s.type != "sample") {
      throw SchemaError(path + ".type", "must be sample, free_space or analyser");
    }
    r.finish();
    out.push_back(std::move(s));
  }
  return out;
}

BlurSpec parse_blur(const json& j) {
  Reader r(j, "blur");
  BlurSpec b;
  b.source_diameter_m = r.non_negative("source_diameter_m", 0.0);
  b.r1_m = r.positive("r1_m");
  b.r2_m = r.non_negative("r2_m", 0.0);
  b.shape = r.get_or<std::string>("shape", "disc");
  if (b.shape != "disc" && b.shape != "gaussian")
    throw SchemaError("blur.shape", "must be disc or gaussian");
  r.finish();
  return b;
}

RetrievalSpec parse_retrieval(const json& j) {
  Reader r(j, "retrieval");
  RetrievalSpec s;
  s.delta = r.non_negative("delta", 0.0);
  s.mu_per_m = r.positive("mu_per_m");
  s.distance_m = r.non_negative("distance_m", 0.0);
  s.regularization = r.non_negative("regularization", 0.0);
  r.finish();
  return s;
}

std::vector<double> positive_list(Reader& r, const std::string& key, bool allow_zero) {
  auto v = r.get<std::vector<double>>(key);
  if (v.empty()) throw SchemaError(r.key_path(key), "must be a nonempty array");
  for (std::size_t i = 0; i < v.size(); ++i)
    if (!(allow_zero ? v[i] >= 0.0 : v[i] > 0.0))
      throw SchemaError(r.key_path(key) + "[" + std::to_string(i) + "]",
                        allow_zero ? "must be >= 0" : "must be > 0");
  return v;
}

SweepSpec parse_sweep(const json& j) {
  Reader r(j, "sweep");
  SweepSpec s;
  s.source_diameters_m = positive_list(r, "source_diameters_m", true);
  s.r2_m = positive_list(r, "r2_m", true);
  s.r1_m = r.positive("r1_m");
  if (r.has("fringe_threshold")) s.fringe_threshold = r.positive("fringe_threshold");
  if (r.has("rim_window_m")) s.rim_window_m = r.positive("rim_window_m");
  s.shape = r.get_or<std::string>("shape", "disc");
  if (s.shape != "disc" && s.shape != "gaussian")
    throw SchemaError("sweep.shape", "must be disc or gaussian");
  r.finish();
  return s;
}

} // namespace

ExperimentConfig parse(const json& j) {
  Reader r(j, "");
  ExperimentConfig c;
  c.seed = r.get_or<std::uint64_t>("seed", 0);
  c.grid = parse_grid(r.child("grid"));
  if (!r.has("source")) throw SchemaError("source", "required key is missing");
  c.source = parse_source(r.child("source"));
  if (r.has("phantom")) c.phantom = parse_phantom(r.child("phantom"));
  if (r.has("stages")) c.stages = parse_stages(r.child("stages"));
  if (r.has("blur")) c.blur = parse_blur(r.child("blur"));
  if (r.has("retrieval")) c.retrieval = parse_retrieval(r.child("retrieval"));
  if (r.has("sweep")) c.sweep = parse_sweep(r.child("sweep"));
  if (r.has("output")) {
    Reader o(r.child("output"), "output");
    c.output_directory = o.get_or<std::string>("directory", ".");
    c.output_prefix = o.get_or<std::string>("prefix", "run");
    o.finish();
  }
  if (c.sweep && !c.phantom) throw SchemaError("phantom", "required by sweep");
  for (std::size_t i = 0; i < c.stages.size(); ++i)
    if (c.stages[i].type == "sample" && !c.phantom)
      throw SchemaError("stages[" + std::to_string(i) + "]", "sample stage needs a phantom");
  r.finish();
  return c;
}

ExperimentConfig load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaError("<root>", std::string("invalid JSON: ") + e.what());
  }
  return parse(j);
}

json to_json(const ExperimentConfig& c) {
  json j;
  j["seed"] = c.seed;
  j["grid"] = {{"nx", c.grid.nx}, {"ny", c.grid.ny}, {"dx_m", c.grid.dx_m}, {"dy_m", c.grid.dy_m}};
  json src = {{"model", c.source.model},
              {"cone_half_angle_rad", c.source.cone_half_angle_rad},
              {"correlation_length_m", c.source.correlation_length_m},
              {"rms_phase_rad", c.source.rms_phase_rad},
              {"modes", c.source.modes}};
  src["bins"] = json::array();
  for (const auto& b : c.source.bins)
    src["bins"].push_back(
        {{"wavelength_m", b.wavelength_m}, {"efficiency", b.efficiency}, {"amplitude", b.amplitude}});
  j["source"] = src;
  if (c.phantom)
    j["phantom"] = {{"kind", "sphere"},
                    {"diameter_m", c.phantom->diameter_m},
                    {"delta", c.phantom->delta},
                    {"beta", c.phantom->beta},
                    {"centre_x_m", c.phantom->centre_x_m},
                    {"centre_y_m", c.phantom->centre_y_m}};
  j["stages"] = json::array();
  for (const auto& s : c.stages) {
    json st = {{"type", s.type}};
    if (s.type == "free_space") st["distance_m"] = s.distance_m;
    if (s.type == "analyser") {
      st["profile_file"] = s.profile_file;
      st["axis"] = s.axis;
    }
    j["stages"].push_back(st);
  }
  if (c.blur)
    j["blur"] = {{"source_diameter_m", c.blur->source_diameter_m},
                 {"r1_m", c.blur->r1_m},
                 {"r2_m", c.blur->r2_m},
                 {"shape", c.blur->shape}};
  if (c.retrieval)
    j["retrieval"] = {{"delta", c.retrieval->delta},
                      {"mu_per_m", c.retrieval->mu_per_m},
                      {"distance_m", c.retrieval->distance_m},
                      {"regularization", c.retrieval->regularization}};
  if (c.sweep)
    j["sweep"] = {{"source_diameters_m", c.sweep->source_diameters_m},
                  {"r2_m", c.sweep->r2_m},
                  {"r1_m", c.sweep->r1_m},
                  {"fringe_threshold", c.sweep->fringe_threshold},
                  {"rim_window_m", c.sweep->rim_window_m},
                  {"shape", c.sweep->shape}};
  j["output"] = {{"directory", c.output_directory}, {"prefix", c.output_prefix}};
  return j;
}

} // namespace xpci::config
