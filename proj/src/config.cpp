#include "dcesim/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace dcesim {

using nlohmann::json;

std::string to_string(Method m) {
  switch (m) {
    case Method::msa: return "msa";
    case Method::direct: return "direct";
    case Method::both: return "both";
  }
  return "?";
}

namespace {

const std::set<std::string> kSweepParameters = {"tau_e", "T",  "V0", "Vmax", "Lx",
                                                "Ly",    "Lz", "omega_j_tau_e", "detuning"};

// Locates the line of "key" inside "block" by scanning the raw text.
class LineFinder {
 public:
  explicit LineFinder(const std::string& text) : text_(text) {}

  int line_of(const std::string& block, const std::string& key = {}) const {
    std::size_t pos = find_key(block, 0);
    if (pos == std::string::npos) return 0;
    if (!key.empty()) {
      const std::size_t k = find_key(key, pos + 1);
      if (k != std::string::npos) pos = k;
    }
    return 1 + static_cast<int>(std::count(text_.begin(), text_.begin() + pos, '\n'));
  }

 private:
  std::size_t find_key(const std::string& key, std::size_t from) const {
    return text_.find('"' + key + '"', from);
  }
  const std::string& text_;
};

class Reader {
 public:
  Reader(const json& doc, const LineFinder& lines) : doc_(doc), lines_(lines) {}

  [[noreturn]] void fail(const std::string& block, const std::string& key,
                         const std::string& what) const {
    const std::string name = key.empty() ? block : block + "." + key;
    throw ConfigError(name + ": " + what, lines_.line_of(block, key));
  }

  const json* block(const std::string& name, const std::set<std::string>& allowed) const {
    if (!doc_.contains(name)) return nullptr;
    const json& b = doc_.at(name);
    if (!b.is_object()) fail(name, "", "must be an object");
    for (auto it = b.begin(); it != b.end(); ++it)
      if (!allowed.count(it.key())) fail(name, it.key(), "unknown key");
    return &b;
  }

  double number(const json* b, const std::string& block, const std::string& key,
                double fallback) const {
    if (!b || !b->contains(key)) return fallback;
    const json& v = b->at(key);
    if (!v.is_number()) fail(block, key, "must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(block, key, "must be finite");
    return x;
  }

  // Number, or the string "auto" mapped to `auto_value`.
  double number_or_auto(const json* b, const std::string& block, const std::string& key,
                        double fallback, double auto_value) const {
    if (!b || !b->contains(key)) return fallback;
    const json& v = b->at(key);
    if (v.is_string() && v.get<std::string>() == "auto") return auto_value;
    if (!v.is_number()) fail(block, key, "must be a number or \"auto\"");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(block, key, "must be finite");
    return x;
  }

  int integer(const json* b, const std::string& block, const std::string& key, int fallback,
              bool allow_auto = false, int auto_value = 0) const {
    if (!b || !b->contains(key)) return fallback;
    const json& v = b->at(key);
    if (allow_auto && v.is_string() && v.get<std::string>() == "auto") return auto_value;
    if (!v.is_number_integer()) fail(block, key, allow_auto ? "must be an integer or \"auto\"" : "must be an integer");
    return v.get<int>();
  }

  std::string string(const json* b, const std::string& block, const std::string& key,
                     const std::string& fallback) const {
    if (!b || !b->contains(key)) return fallback;
    const json& v = b->at(key);
    if (!v.is_string()) fail(block, key, "must be a string");
    return v.get<std::string>();
  }

  bool boolean(const json* b, const std::string& block, const std::string& key, bool fallback) const {
    if (!b || !b->contains(key)) return fallback;
    const json& v = b->at(key);
    if (!v.is_boolean()) fail(block, key, "must be true or false");
    return v.get<bool>();
  }

  ModeIndex mode(const json* b, const std::string& block, const std::string& key,
                 ModeIndex fallback) const {
    if (!b || !b->contains(key)) return fallback;
    try {
      return ModeIndex::parse(string(b, block, key, ""));
    } catch (const DomainError& e) {
      fail(block, key, e.what());
    }
  }

 private:
  const json& doc_;
  const LineFinder& lines_;
};

struct Located : std::runtime_error {
  Located(std::string block_, std::string key_, const std::string& what)
      : std::runtime_error(what), block(std::move(block_)), key(std::move(key_)) {}
  std::string block, key;
};

void check_config(const RunConfig& c) {
  auto pos = [](double v) { return std::isfinite(v) && v > 0.0; };
  const auto& cv = c.cavity;
  if (!pos(cv.Lx)) throw Located("cavity", "Lx", "must be positive");
  if (!pos(cv.Ly)) throw Located("cavity", "Ly", "must be positive");
  if (!pos(cv.Lz)) throw Located("cavity", "Lz", "must be positive");
  if (!pos(cv.V0)) throw Located("cavity", "V0", "must be positive");
  if (!std::isfinite(cv.Vmax) || cv.Vmax < cv.V0) throw Located("cavity", "Vmax", "must be >= V0");
  if (c.cut.nx < 1) throw Located("modes", "nx", "must be >= 1");
  if (c.cut.ny < 1) throw Located("modes", "ny", "must be >= 1");
  if (c.cut.nz < 1) throw Located("modes", "nz", "must be >= 1");

  const auto& d = c.drive;
  if (!(d.T_s >= 0.0) || !std::isfinite(d.T_s)) throw Located("drive", "T", "must be positive or \"auto\"");
  if (d.tune_j < 1) throw Located("drive", "tune_j", "must be >= 1");
  if (d.tune_mode.mx > c.cut.nx || d.tune_mode.my > c.cut.ny || d.tune_mode.mz > c.cut.nz)
    throw Located("drive", "tune_mode", "is outside the mode cut");
  if (d.shape == DriveShape::linear_ramp) {
    if (!pos(d.tau_e_s)) throw Located("drive", "tau_e", "must be positive");
    if (d.T_s > 0.0 && !(d.tau_e_s < d.T_s)) throw Located("drive", "tau_e", "must be < T");
  }
  if (d.shape == DriveShape::sampled && d.samples_csv.empty())
    throw Located("drive", "samples_csv", "is required for the sampled shape");
  if (d.j_max < 0) throw Located("drive", "j_max", "must be >= 1 or \"auto\"");
  if (!(d.smoothing >= 0.0) || !std::isfinite(d.smoothing))
    throw Located("drive", "smoothing", "must be >= 0");

  const auto& e = c.evolution;
  if (e.observe.mx > c.cut.nx || e.observe.my > c.cut.ny || e.observe.mz > c.cut.nz)
    throw Located("evolution", "observe", "is outside the mode cut");
  if (e.harmonic < 0) throw Located("evolution", "harmonic", "must be >= 1 or \"auto\"");
  if (e.t_end_s != -1.0 && !(e.t_end_s >= 0.0)) throw Located("evolution", "t_end", "must be >= 0");
  if (e.tau_end != -1.0 && !(e.tau_end >= 0.0)) throw Located("evolution", "tau_end", "must be >= 0");
  if (!pos(e.growth_exponent)) throw Located("evolution", "growth_exponent", "must be positive");
  if (e.samples < 1) throw Located("evolution", "samples", "must be >= 1");
  if (!(e.dt_s >= 0.0)) throw Located("evolution", "dt", "must be positive or \"auto\"");
  if (!std::isfinite(e.tol) || (e.tol < 0.0 && e.tol != -1.0))
    throw Located("evolution", "tol", "must be a finite value >= 0 or \"auto\"");
  if (!std::isfinite(e.tol_scale) || e.tol_scale < 0.0)
    throw Located("evolution", "tol_scale", "must be finite and >= 0");
  if (!std::isfinite(e.detuning) || std::abs(e.detuning) >= 1.0)
    throw Located("evolution", "detuning", "must lie in (-1, 1)");
  if (!pos(e.max_steps)) throw Located("evolution", "max_steps", "must be positive");

  if (c.sweep) {
    const auto& s = *c.sweep;
    if (!is_sweep_parameter(s.parameter)) throw Located("sweep", "parameter", "unknown parameter");
    if (!std::isfinite(s.from)) throw Located("sweep", "from", "must be finite");
    if (!std::isfinite(s.to)) throw Located("sweep", "to", "must be finite");
    if (s.steps < 1) throw Located("sweep", "steps", "must be >= 1");
    if (s.log && !(s.from > 0.0 && s.to > 0.0))
      throw Located("sweep", "from", "log sweeps need positive end points");
  }
  if (c.output.prefix.empty()) throw Located("output", "prefix", "must not be empty");
  if (c.output.prefix.find('/') != std::string::npos)
    throw Located("output", "prefix", "must not contain '/'");
}

}  // namespace

bool is_sweep_parameter(const std::string& name) { return kSweepParameters.count(name) > 0; }

void RunConfig::validate() const {
  try {
    check_config(*this);
  } catch (const Located& e) {
    throw ConfigError(e.block + "." + e.key + ": " + e.what());
  }
}

RunConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t byte = std::min<std::size_t>(e.byte, text.size());
    const int line = 1 + static_cast<int>(std::count(text.begin(), text.begin() + byte, '\n'));
    throw ConfigError(std::string("malformed JSON: ") + e.what(), line);
  }
  if (!doc.is_object()) throw ConfigError("configuration must be a JSON object", 1);

  const LineFinder lines(text);
  const Reader r(doc, lines);
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    static const std::set<std::string> top = {"cavity", "modes", "drive", "evolution", "sweep", "output"};
    if (!top.count(it.key())) r.fail(it.key(), "", "unknown block");
  }

  RunConfig c;
  if (const json* b = r.block("cavity", {"Lx", "Ly", "Lz", "V0", "Vmax"})) {
    c.cavity.Lx = r.number(b, "cavity", "Lx", c.cavity.Lx);
    c.cavity.Ly = r.number(b, "cavity", "Ly", c.cavity.Ly);
    c.cavity.Lz = r.number(b, "cavity", "Lz", c.cavity.Lz);
    c.cavity.V0 = r.number(b, "cavity", "V0", c.cavity.V0);
    c.cavity.Vmax = r.number(b, "cavity", "Vmax", c.cavity.Vmax);
  }
  if (const json* b = r.block("modes", {"nx", "ny", "nz"})) {
    c.cut.nx = r.integer(b, "modes", "nx", c.cut.nx);
    c.cut.ny = r.integer(b, "modes", "ny", c.cut.ny);
    c.cut.nz = r.integer(b, "modes", "nz", c.cut.nz);
  }
  if (const json* b = r.block("drive", {"shape", "T", "tune_j", "tune_mode", "tau_e", "j_max",
                                        "samples_csv", "smoothing"})) {
    auto& d = c.drive;
    const std::string shape = r.string(b, "drive", "shape", to_string(d.shape));
    try {
      d.shape = parse_drive_shape(shape);
    } catch (const DomainError& e) {
      r.fail("drive", "shape", e.what());
    }
    d.T_s = r.number_or_auto(b, "drive", "T", d.T_s, 0.0);
    d.tune_j = r.integer(b, "drive", "tune_j", d.tune_j);
    d.tune_mode = r.mode(b, "drive", "tune_mode", d.tune_mode);
    d.tau_e_s = r.number(b, "drive", "tau_e", d.tau_e_s);
    d.j_max = r.integer(b, "drive", "j_max", d.j_max, true, 0);
    d.samples_csv = r.string(b, "drive", "samples_csv", d.samples_csv);
    d.smoothing = r.number(b, "drive", "smoothing", d.smoothing);
  }
  if (const json* b = r.block("evolution", {"method", "observe", "harmonic", "t_end", "tau_end",
                                            "growth_exponent", "samples", "dt", "tol", "tol_scale",
                                            "detuning", "k_model", "include_gB", "audit",
                                            "max_steps"})) {
    auto& e = c.evolution;
    const std::string method = r.string(b, "evolution", "method", to_string(e.method));
    if (method == "msa") e.method = Method::msa;
    else if (method == "direct") e.method = Method::direct;
    else if (method == "both") e.method = Method::both;
    else r.fail("evolution", "method", "must be msa, direct or both");
    e.observe = r.mode(b, "evolution", "observe", e.observe);
    e.harmonic = r.integer(b, "evolution", "harmonic", e.harmonic, true, 0);
    e.t_end_s = r.number_or_auto(b, "evolution", "t_end", e.t_end_s, -1.0);
    e.tau_end = r.number_or_auto(b, "evolution", "tau_end", e.tau_end, -1.0);
    e.growth_exponent = r.number(b, "evolution", "growth_exponent", e.growth_exponent);
    e.samples = r.integer(b, "evolution", "samples", e.samples);
    e.dt_s = r.number_or_auto(b, "evolution", "dt", e.dt_s, 0.0);
    e.tol = r.number_or_auto(b, "evolution", "tol", e.tol, -1.0);
    if (b->contains("tol") && b->at("tol").is_number() && e.tol < 0.0)
      r.fail("evolution", "tol", "must be >= 0");
    e.tol_scale = r.number(b, "evolution", "tol_scale", e.tol_scale);
    e.detuning = r.number(b, "evolution", "detuning", e.detuning);
    const std::string km = r.string(b, "evolution", "k_model", e.k_model == KModel::linear ? "linear" : "exact");
    if (km == "linear") e.k_model = KModel::linear;
    else if (km == "exact") e.k_model = KModel::exact;
    else r.fail("evolution", "k_model", "must be linear or exact");
    e.include_gB = r.boolean(b, "evolution", "include_gB", e.include_gB);
    e.audit = r.boolean(b, "evolution", "audit", e.audit);
    e.max_steps = r.number(b, "evolution", "max_steps", e.max_steps);
  }
  if (const json* b = r.block("sweep", {"parameter", "from", "to", "steps", "scale"})) {
    SweepBlock s;
    s.parameter = r.string(b, "sweep", "parameter", "");
    if (!b->contains("from")) r.fail("sweep", "", "needs \"from\"");
    if (!b->contains("to")) r.fail("sweep", "", "needs \"to\"");
    s.from = r.number(b, "sweep", "from", 0.0);
    s.to = r.number(b, "sweep", "to", 0.0);
    s.steps = r.integer(b, "sweep", "steps", 1);
    const std::string scale = r.string(b, "sweep", "scale", "linear");
    if (scale == "log") s.log = true;
    else if (scale != "linear") r.fail("sweep", "scale", "must be linear or log");
    c.sweep = s;
  }
  if (const json* b = r.block("output", {"directory", "prefix"})) {
    c.output.directory = r.string(b, "output", "directory", c.output.directory);
    c.output.prefix = r.string(b, "output", "prefix", c.output.prefix);
  }

  try {
    check_config(c);
  } catch (const Located& e) {
    throw ConfigError(e.block + "." + e.key + ": " + e.what(), lines.line_of(e.block, e.key));
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file \"" + path + "\"");
  std::ostringstream os;
  os << in.rdbuf();
  return parse_config(os.str());
}

namespace {

// Shortest decimal that reads back to the same double.
json exact(double x) {
  char buf[40];
  for (int p = 15; p <= 17; ++p) {
    std::snprintf(buf, sizeof buf, "%.*g", p, x);
    if (std::strtod(buf, nullptr) == x) break;
  }
  return json::parse(buf);
}

json or_auto(double x, double auto_value) { return x == auto_value ? json("auto") : exact(x); }

}  // namespace

std::string effective_config(const RunConfig& c) {
  json j;
  j["cavity"] = {{"Lx", exact(c.cavity.Lx)},
                 {"Ly", exact(c.cavity.Ly)},
                 {"Lz", exact(c.cavity.Lz)},
                 {"V0", exact(c.cavity.V0)},
                 {"Vmax", exact(c.cavity.Vmax)}};
  j["modes"] = {{"nx", c.cut.nx}, {"ny", c.cut.ny}, {"nz", c.cut.nz}};
  const auto& d = c.drive;
  j["drive"] = {{"shape", to_string(d.shape)},
                {"T", or_auto(d.T_s, 0.0)},
                {"tune_j", d.tune_j},
                {"tune_mode", d.tune_mode.str()},
                {"tau_e", exact(d.tau_e_s)},
                {"j_max", d.j_max == 0 ? json("auto") : json(d.j_max)},
                {"samples_csv", d.samples_csv},
                {"smoothing", exact(d.smoothing)}};
  const auto& e = c.evolution;
  j["evolution"] = {{"method", to_string(e.method)},
                    {"observe", e.observe.str()},
                    {"harmonic", e.harmonic == 0 ? json("auto") : json(e.harmonic)},
                    {"t_end", or_auto(e.t_end_s, -1.0)},
                    {"tau_end", or_auto(e.tau_end, -1.0)},
                    {"growth_exponent", exact(e.growth_exponent)},
                    {"samples", e.samples},
                    {"dt", or_auto(e.dt_s, 0.0)},
                    {"tol", or_auto(e.tol, -1.0)},
                    {"tol_scale", exact(e.tol_scale)},
                    {"detuning", exact(e.detuning)},
                    {"k_model", e.k_model == KModel::linear ? "linear" : "exact"},
                    {"include_gB", e.include_gB},
                    {"audit", e.audit},
                    {"max_steps", exact(e.max_steps)}};
  if (c.sweep)
    j["sweep"] = {{"parameter", c.sweep->parameter},
                  {"from", exact(c.sweep->from)},
                  {"to", exact(c.sweep->to)},
                  {"steps", c.sweep->steps},
                  {"scale", c.sweep->log ? "log" : "linear"}};
  j["output"] = {{"directory", c.output.directory}, {"prefix", c.output.prefix}};
  return j.dump(2) + "\n";
}

}  // namespace dcesim
