#include "sidewinder/cable.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sidewinder/errors.hpp"

namespace sidewinder {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

double CableGeometry::radius() const {
  return std::sqrt(attach_lateral * attach_lateral +
                   attach_longitudinal * attach_longitudinal);
}

double CableGeometry::phi() const {
  return std::atan2(attach_lateral, attach_longitudinal);
}

void CableGeometry::validate() const {
  if (attach_lateral <= 0.0 || attach_longitudinal <= 0.0)
    throw RangeError("cable attachment offsets must be > 0");
  if (slack_rate <= 0.0) throw RangeError("cable.slack_rate must be > 0");
  if (alpha_limit <= 0.0 || alpha_limit > kPi)
    throw RangeError("cable.alpha_limit_deg outside (0, 180]");
  // The closed-form interval inversion and the containment guarantee both
  // need monotone, nonnegative chord lengths across the stop range.
  if (alpha_limit > 2.0 * phi() + 1e-12)
    throw RangeError("cable.alpha_limit_deg exceeds 2*atan(l1/l2)");
  if (radius() >= slack_rate)
    throw RangeError("cable attachment radius must stay below slack_rate");
}

CablePair taut_lengths(const CableGeometry& geom, double alpha) {
  const double two_r = 2.0 * geom.radius();
  const double p = geom.phi();
  return {two_r * std::cos(-0.5 * alpha + p), two_r * std::cos(0.5 * alpha + p)};
}

void CompliancePolicy::validate() const {
  if (G < 0.0 || G > 1.5) throw RangeError("compliance.G outside [0, 1.5]");
}

CableCommand commanded_lengths(const CableGeometry& geom,
                               const CompliancePolicy& policy,
                               double amplitude, double alpha_cmd) {
  const double gamma = policy.gamma(amplitude);
  const double pull = std::min(amplitude, gamma);
  CableCommand c;
  if (alpha_cmd <= -gamma) {
    c.left = taut_lengths(geom, alpha_cmd).left;
    c.left_taut = true;
  } else {
    c.left = taut_lengths(geom, -pull).left + geom.slack_rate * (gamma + alpha_cmd);
  }
  if (alpha_cmd >= gamma) {
    c.right = taut_lengths(geom, alpha_cmd).right;
    c.right_taut = true;
  } else {
    c.right = taut_lengths(geom, pull).right + geom.slack_rate * (gamma - alpha_cmd);
  }
  return c;
}

AngleInterval admissible_interval(const CableGeometry& geom,
                                  const CableCommand& cmd) {
  const double two_r = 2.0 * geom.radius();
  const double p = geom.phi();
  AngleInterval iv{-geom.alpha_limit, geom.alpha_limit};
  // Left cable limits rightward bend (it lengthens with alpha), right cable
  // limits leftward bend. A spooled length >= 2R can never go taut.
  if (cmd.left < two_r)
    iv.hi = std::min(iv.hi, 2.0 * (p - std::acos(cmd.left / two_r)));
  if (cmd.right < two_r)
    iv.lo = std::max(iv.lo, 2.0 * (std::acos(cmd.right / two_r) - p));
  if (iv.lo > iv.hi) {
    if (iv.lo - iv.hi < 1e-9) {  // round-off on a pinned joint
      double mid = 0.5 * (iv.lo + iv.hi);
      iv.lo = iv.hi = mid;
    } else {
      throw InvertedInterval("cable commands admit no joint angle: [" +
                             std::to_string(iv.lo) + ", " +
                             std::to_string(iv.hi) + "]");
    }
  }
  return iv;
}

AngleInterval admissible_interval_for(const CableGeometry& geom,
                                      const CompliancePolicy& policy,
                                      double amplitude, double alpha_cmd) {
  return admissible_interval(geom,
                             commanded_lengths(geom, policy, amplitude, alpha_cmd));
}

}  // namespace sidewinder
