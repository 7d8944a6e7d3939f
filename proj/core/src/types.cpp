#include "mflab/types.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace mflab {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

}  // namespace

int controller_order(ControllerKind kind) {
  switch (kind) {
    case ControllerKind::iP:
    case ControllerKind::iPI:
      return 1;
    case ControllerKind::iPD:
    case ControllerKind::iPID:
      return 2;
  }
  return 1;
}

std::string to_string(ControllerKind kind) {
  switch (kind) {
    case ControllerKind::iP:
      return "ip";
    case ControllerKind::iPI:
      return "ipi";
    case ControllerKind::iPD:
      return "ipd";
    case ControllerKind::iPID:
      return "ipid";
  }
  return "ip";
}

std::string to_string(PlantId id) {
  switch (id) {
    case PlantId::Nonlinear:
      return "nonlinear";
    case PlantId::Linear:
      return "linear";
    case PlantId::LinearDelayed:
      return "linear-delayed";
  }
  return "linear";
}

ControllerKind controller_from_string(const std::string& name) {
  const std::string n = lower(name);
  if (n == "ip") return ControllerKind::iP;
  if (n == "ipi") return ControllerKind::iPI;
  if (n == "ipd") return ControllerKind::iPD;
  if (n == "ipid") return ControllerKind::iPID;
  throw ValidationError("unknown controller '" + name +
                        "' (expected ip, ipi, ipd or ipid)");
}

PlantId plant_from_string(const std::string& name) {
  const std::string n = lower(name);
  if (n == "nonlinear") return PlantId::Nonlinear;
  if (n == "linear") return PlantId::Linear;
  if (n == "linear-delayed" || n == "linear_delayed")
    return PlantId::LinearDelayed;
  throw ValidationError("unknown plant '" + name +
                        "' (expected nonlinear, linear or linear-delayed)");
}

void validate_gains(const Gains& gains, ControllerKind kind) {
  if (!(gains.kp > 0.0)) throw ValidationError("kp: must be > 0");
  if (gains.ki < 0.0) throw ValidationError("ki: must be >= 0");
  if (gains.kd < 0.0) throw ValidationError("kd: must be >= 0");
  if (gains.alpha == 0.0) throw ValidationError("alpha: must be nonzero");
  if (!std::isfinite(gains.kp) || !std::isfinite(gains.ki) ||
      !std::isfinite(gains.kd) || !std::isfinite(gains.alpha))
    throw ValidationError("gains: must be finite");
  if (gains.nu != 1 && gains.nu != 2)
    throw ValidationError("nu: must be 1 or 2");
  if (gains.nu != controller_order(kind))
    throw ValidationError("controller/order mismatch: " + to_string(kind) +
                          " requires nu = " +
                          std::to_string(controller_order(kind)));
  const bool wants_ki =
      kind == ControllerKind::iPI || kind == ControllerKind::iPID;
  const bool wants_kd =
      kind == ControllerKind::iPD || kind == ControllerKind::iPID;
  if (wants_ki && gains.ki == 0.0)
    throw ValidationError("ki: must be > 0 for " + to_string(kind));
  if (!wants_ki && gains.ki != 0.0)
    throw ValidationError("ki: must be 0 for " + to_string(kind));
  if (wants_kd && gains.kd == 0.0)
    throw ValidationError("kd: must be > 0 for " + to_string(kind));
  if (!wants_kd && gains.kd != 0.0)
    throw ValidationError("kd: must be 0 for " + to_string(kind));
}

}  // namespace mflab
