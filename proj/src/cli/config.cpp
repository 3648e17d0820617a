#include "cli/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "cli/format.hpp"

namespace eitsim::cli {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string current;
  std::istringstream in(s);
  while (std::getline(in, current, sep)) parts.push_back(trim(current));
  return parts;
}

[[noreturn]] void bad(const std::string& key, const std::string& why) {
  throw Error(ErrorCode::kConfig, key + ": " + why);
}

double to_double(const std::string& key, const std::string& text) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (text.empty() || ec != std::errc{} || ptr != end || !std::isfinite(v)) {
    bad(key, "expected a finite number, got '" + text + "'");
  }
  return v;
}

long to_int(const std::string& key, const std::string& text) {
  long v = 0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (text.empty() || ec != std::errc{} || ptr != end) bad(key, "expected an integer, got '" + text + "'");
  return v;
}

std::vector<double> to_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  if (trim(text).empty()) return out;
  for (const auto& part : split(text, ',')) out.push_back(to_double(key, part));
  return out;
}

std::string join(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    out += format_double(values[i]);
  }
  return out;
}

}  // namespace

void RunConfig::set(const std::string& raw_key, const std::string& raw_value) {
  const std::string key = trim(raw_key);
  const std::string value = trim(raw_value);
  if (key == "g_sqrt_n") g_sqrt_n = to_double(key, value);
  else if (key == "omega") omega = to_double(key, value);
  else if (key == "delta_c") delta_c = to_double(key, value);
  else if (key == "n_atoms") n_atoms = static_cast<int>(to_int(key, value));
  else if (key == "cutoff") cutoff = static_cast<int>(to_int(key, value));
  else if (key == "sector") sector = static_cast<int>(to_int(key, value));
  else if (key == "n") n = static_cast<int>(to_int(key, value));
  else if (key == "m") m = static_cast<int>(to_int(key, value));
  else if (key == "k") k = static_cast<int>(to_int(key, value));
  else if (key == "dt") dt = to_double(key, value);
  else if (key == "profile") {
    try {
      profile = profile_kind_from_string(value);
    } catch (const Error&) {
      bad(key, "expected linear, cosine or tanh, got '" + value + "'");
    }
  } else if (key == "duration") duration = to_double(key, value);
  else if (key == "omega_max") omega_max = to_double(key, value);
  else if (key == "omega_min") omega_min = to_double(key, value);
  else if (key == "steepness") steepness = to_double(key, value);
  else if (key == "durations") durations = to_list(key, value);
  else if (key == "delta_cs") delta_cs = to_list(key, value);
  else if (key == "seed") seed = static_cast<unsigned>(to_int(key, value));
  else if (key == "summary") summary = value;
  else if (key == "rho") {
    rho.clear();
    for (const auto& entry : split(value, ';')) {
      if (entry.empty()) continue;
      const auto fields = split(entry, ',');
      if (fields.size() != 4) bad(key, "each entry needs n,m,re,im");
      rho.push_back({static_cast<int>(to_int(key, fields[0])), static_cast<int>(to_int(key, fields[1])),
                     to_double(key, fields[2]), to_double(key, fields[3])});
    }
  } else if (key.rfind("tol.", 0) == 0 && key.size() > 4) {
    tolerances[key.substr(4)] = to_double(key, value);
  } else {
    bad(key, "unknown configuration key");
  }
}

std::string RunConfig::canonical() const {
  std::map<std::string, std::string> kv;
  kv["g_sqrt_n"] = format_double(g_sqrt_n);
  kv["omega"] = format_double(omega);
  kv["delta_c"] = format_double(delta_c);
  kv["n_atoms"] = std::to_string(n_atoms);
  kv["cutoff"] = std::to_string(cutoff);
  kv["sector"] = std::to_string(sector);
  kv["n"] = std::to_string(n);
  kv["m"] = std::to_string(m);
  kv["k"] = std::to_string(k);
  kv["dt"] = format_double(dt);
  kv["profile"] = std::string(to_string(profile));
  kv["duration"] = format_double(duration);
  kv["omega_max"] = format_double(omega_max);
  kv["omega_min"] = format_double(omega_min);
  kv["steepness"] = format_double(steepness);
  kv["durations"] = join(durations);
  kv["delta_cs"] = join(delta_cs);
  kv["seed"] = std::to_string(seed);
  kv["summary"] = summary;
  std::string rho_text;
  for (std::size_t i = 0; i < rho.size(); ++i) {
    if (i) rho_text += ';';
    rho_text += std::to_string(rho[i].n) + ',' + std::to_string(rho[i].m) + ',' + format_double(rho[i].re) + ',' +
                format_double(rho[i].im);
  }
  kv["rho"] = rho_text;
  for (const auto& [name, tol] : tolerances) kv["tol." + name] = format_double(tol);

  std::string out;
  for (const auto& [key, value] : kv) out += key + " = " + value + "\n";
  return out;
}

void RunConfig::validate() const {
  if (!(g_sqrt_n > 0.0)) bad("g_sqrt_n", "must be positive");
  if (omega < 0.0) bad("omega", "must be non-negative");
  if (n_atoms < 1) bad("n_atoms", "must be at least 1");
  if (cutoff < 0) bad("cutoff", "must be non-negative");
  if (sector < 0) bad("sector", "must be non-negative");
  if (n < 0 || m < 0 || k < 0) bad("n", "dressed-state labels must be non-negative");
  if (n > cutoff) {
    throw Error(ErrorCode::kCutoffTooSmall,
                "cutoff: dark state n=" + std::to_string(n) + " needs cutoff >= " + std::to_string(n) +
                    " (got " + std::to_string(cutoff) + ")");
  }
  if (sector > cutoff) {
    throw Error(ErrorCode::kCutoffTooSmall, "cutoff: sector " + std::to_string(sector) + " needs cutoff >= " +
                                                std::to_string(sector) + " (got " + std::to_string(cutoff) + ")");
  }
  if (dt < 0.0) bad("dt", "must be non-negative (0 selects the automatic step)");
  if (!(duration > 0.0)) bad("duration", "must be positive");
  if (!(omega_max >= 0.0)) bad("omega_max", "must be non-negative");
  if (!(omega_min >= 0.0)) bad("omega_min", "must be non-negative");
  if (!(steepness > 0.0)) bad("steepness", "must be positive");
  for (double d : durations)
    if (!(d > 0.0)) bad("durations", "every duration must be positive");
  for (const auto& e : rho)
    if (e.n < 0 || e.m < 0) bad("rho", "indices must be non-negative");
  for (const auto& [name, tol] : tolerances)
    if (!(tol >= 0.0)) bad("tol." + name, "must be non-negative");
  try {
    validate_density_matrix(density_matrix());
  } catch (const Error& e) {
    const std::string what = e.what();
    const auto colon = what.find(": ");
    throw Error(e.code(), "rho: " + (colon == std::string::npos ? what : what.substr(colon + 2)));
  }
}

ModelParams RunConfig::params() const { return ModelParams::make(g_sqrt_n, omega, delta_c); }

Drive RunConfig::write_drive(double duration_override, double delta_c_override) const {
  return Drive{g_sqrt_n, delta_c_override,
               SweepProfile(profile, 0.0, duration_override, omega_max * g_sqrt_n, omega_min * g_sqrt_n, steepness)};
}

DensityMatrix RunConfig::density_matrix() const {
  int dim = 0;
  for (const auto& e : rho) dim = std::max(dim, std::max(e.n, e.m) + 1);
  if (dim == 0) bad("rho", "no entries given");
  DensityMatrix out = DensityMatrix::Zero(dim, dim);
  for (const auto& e : rho) out(e.n, e.m) += Complex(e.re, e.im);
  return out;
}

RunConfig parse_config_text(const std::string& text, RunConfig base) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::kConfig, "line " + std::to_string(lineno) + ": expected key = value");
    }
    base.set(line.substr(0, eq), line.substr(eq + 1));
  }
  return base;
}

RunConfig load_config_file(const std::string& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kConfig, "config: cannot open '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config_text(text.str(), std::move(base));
}

}  // namespace eitsim::cli
