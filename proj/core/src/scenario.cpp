#include "mflab/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace mflab {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

double parse_number(const std::string& key, const std::string& text) {
  const std::string v = trim(text);
  double out = 0.0;
  const char* first = v.data();
  const char* last = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last)
    throw ValidationError(key + ": not a number: '" + v + "'");
  return out;
}

std::uint64_t parse_seed(const std::string& text) {
  const std::string v = trim(text);
  std::uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size())
    throw ValidationError("seed: not a non-negative integer: '" + v + "'");
  return out;
}

// "t:v, t:v, ..." with strictly increasing non-negative times.
std::vector<SetpointStep> parse_setpoints(const std::string& text) {
  std::vector<SetpointStep> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    const auto colon = item.find(':');
    if (colon == std::string::npos)
      throw ValidationError("setpoints: expected 'time:value', got '" + item +
                            "'");
    SetpointStep step;
    step.t = parse_number("setpoints", item.substr(0, colon));
    step.value = parse_number("setpoints", item.substr(colon + 1));
    out.push_back(step);
  }
  if (out.empty()) throw ValidationError("setpoints: empty schedule");
  if (out.front().t < 0.0)
    throw ValidationError("setpoints: times must be >= 0");
  for (std::size_t i = 1; i < out.size(); ++i)
    if (out[i].t <= out[i - 1].t)
      throw ValidationError("setpoints: times must be strictly increasing");
  return out;
}

std::vector<SetpointStep> default_setpoints(double duration) {
  // Alternating unit steps every 5 s.
  std::vector<SetpointStep> out;
  double value = 1.0;
  for (double t = 0.0; t < duration; t += 5.0) {
    out.push_back({t, value});
    value = -value;
  }
  if (out.empty()) out.push_back({0.0, 1.0});
  return out;
}

const char* const kKnownKeys[] = {
    "plant",      "controller",       "kp",    "ki",        "kd",
    "alpha",      "sample_period",    "delay", "noise_std", "duration",
    "setpoints",  "estimator_window", "seed",  "reference_tau", "nu"};

}  // namespace

double setpoint_at(const std::vector<SetpointStep>& schedule, double t) {
  if (schedule.empty()) return 0.0;
  double value = schedule.front().value;
  for (const auto& step : schedule) {
    if (step.t <= t)
      value = step.value;
    else
      break;
  }
  return value;
}

double setpoint_scale(const std::vector<SetpointStep>& schedule) {
  double scale = 0.0;
  for (const auto& step : schedule) scale = std::max(scale, std::abs(step.value));
  return scale;
}

Scenario parse_scenario(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::stringstream ss(text);
  std::string line;
  int line_no = 0;
  while (std::getline(ss, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[' && line.back() == ']') continue;  // section header
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ValidationError("line " + std::to_string(line_no) +
                            ": expected key = value, got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (std::find_if(std::begin(kKnownKeys), std::end(kKnownKeys),
                     [&](const char* k) { return key == k; }) ==
        std::end(kKnownKeys))
      throw ValidationError("unknown key '" + key + "'");
    if (kv.count(key)) throw ValidationError("duplicate key '" + key + "'");
    kv[key] = value;
  }

  std::string missing;
  for (const char* req : {"plant", "kp", "sample_period"})
    if (!kv.count(req)) missing += missing.empty() ? req : std::string(", ") + req;
  if (!missing.empty())
    throw ValidationError("missing required keys: " + missing);

  Scenario s;
  s.plant = plant_from_string(kv.at("plant"));
  s.controller = kv.count("controller")
                     ? controller_from_string(kv.at("controller"))
                     : ControllerKind::iP;
  s.gains.kp = parse_number("kp", kv.at("kp"));
  s.gains.ki = kv.count("ki") ? parse_number("ki", kv.at("ki")) : 0.0;
  s.gains.kd = kv.count("kd") ? parse_number("kd", kv.at("kd")) : 0.0;
  s.gains.alpha = kv.count("alpha") ? parse_number("alpha", kv.at("alpha")) : 1.0;
  s.gains.nu = controller_order(s.controller);
  if (kv.count("nu")) {
    const double nu = parse_number("nu", kv.at("nu"));
    if (nu != 1.0 && nu != 2.0) throw ValidationError("nu: must be 1 or 2");
    if (static_cast<int>(nu) != controller_order(s.controller))
      throw ValidationError("controller/order mismatch: " +
                            to_string(s.controller) + " requires nu = " +
                            std::to_string(controller_order(s.controller)));
  }
  s.sample_period = parse_number("sample_period", kv.at("sample_period"));
  s.estimator_window = kv.count("estimator_window")
                           ? parse_number("estimator_window",
                                          kv.at("estimator_window"))
                           : s.sample_period;
  s.delay = kv.count("delay") ? parse_number("delay", kv.at("delay")) : 0.0;
  s.noise_std =
      kv.count("noise_std") ? parse_number("noise_std", kv.at("noise_std")) : 0.0;
  s.duration =
      kv.count("duration") ? parse_number("duration", kv.at("duration")) : 30.0;
  s.setpoints = kv.count("setpoints") ? parse_setpoints(kv.at("setpoints"))
                                      : default_setpoints(s.duration);
  s.reference_tau = kv.count("reference_tau")
                        ? parse_number("reference_tau", kv.at("reference_tau"))
                        : 0.5;
  s.seed = kv.count("seed") ? parse_seed(kv.at("seed")) : 0;

  validate_gains(s.gains, s.controller);
  if (!(s.sample_period > 0.0))
    throw ValidationError("sample_period: must be > 0");
  if (s.estimator_window < s.sample_period)
    throw ValidationError("estimator_window: must be >= sample_period");
  if (!(s.duration > 0.0)) throw ValidationError("duration: must be > 0");
  if (s.delay < 0.0) throw ValidationError("delay: must be >= 0");
  if (s.noise_std < 0.0) throw ValidationError("noise_std: must be >= 0");
  if (s.reference_tau < 0.0)
    throw ValidationError("reference_tau: must be >= 0");
  return s;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string serialize_scenario(const Scenario& s) {
  std::ostringstream out;
  out << "plant = " << to_string(s.plant) << "\n";
  out << "controller = " << to_string(s.controller) << "\n";
  out << "kp = " << format_double(s.gains.kp) << "\n";
  out << "ki = " << format_double(s.gains.ki) << "\n";
  out << "kd = " << format_double(s.gains.kd) << "\n";
  out << "alpha = " << format_double(s.gains.alpha) << "\n";
  out << "sample_period = " << format_double(s.sample_period) << "\n";
  out << "estimator_window = " << format_double(s.estimator_window) << "\n";
  out << "delay = " << format_double(s.delay) << "\n";
  out << "noise_std = " << format_double(s.noise_std) << "\n";
  out << "duration = " << format_double(s.duration) << "\n";
  out << "setpoints = ";
  for (std::size_t i = 0; i < s.setpoints.size(); ++i) {
    if (i) out << ", ";
    out << format_double(s.setpoints[i].t) << ":"
        << format_double(s.setpoints[i].value);
  }
  out << "\n";
  out << "reference_tau = " << format_double(s.reference_tau) << "\n";
  out << "seed = " << s.seed << "\n";
  return out.str();
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open scenario file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_scenario(buf.str());
  } catch (const ValidationError& err) {
    throw ValidationError(path + ": " + err.what());
  }
}

}  // namespace mflab
