#pragma once

namespace sidewinder {

// Bilateral cable routing around one lateral joint. Both cables attach at
// lateral offset l1 and longitudinal offset l2 from the pivot on either
// module, so a taut cable traces a chord of the circle of radius
// R = sqrt(l1^2 + l2^2). alpha > 0 bends the joint rightward and shortens
// the right cable.
struct CableGeometry {
  double attach_lateral = 0.025;      // l1, m
  double attach_longitudinal = 0.025; // l2, m
  double slack_rate = 0.0418;         // l0, m of released cable per radian
  double alpha_limit = 90.0 * 3.14159265358979323846 / 180.0;  // hard stop

  double radius() const;  // R
  double phi() const;     // atan(l1 / l2)

  void validate() const;  // throws RangeError
};

// Spooled cable lengths commanded for one joint at one instant.
struct CableCommand {
  double left = 0.0;   // m
  double right = 0.0;  // m
  bool left_taut = false;
  bool right_taut = false;
};

// Joint angles reachable under a pair of commanded cable lengths, clamped to
// the mechanical stops. A degenerate interval (lo == hi) pins the joint.
struct AngleInterval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double a, double tol = 0.0) const {
    return a >= lo - tol && a <= hi + tol;
  }
  double clamp(double a) const { return a < lo ? lo : (a > hi ? hi : a); }
  double width() const { return hi - lo; }
};

// Slack share G in [0, 1.5]. gamma = (2G - 1) * A is the command angle beyond
// which a cable is held taut; below it the cable is paid out at slack_rate.
struct CompliancePolicy {
  double G = 0.0;
  double gamma(double amplitude) const { return (2.0 * G - 1.0) * amplitude; }
  void validate() const;  // throws RangeError
};

// Exact chord lengths of both cables at joint angle alpha.
// left = 2R cos(-alpha/2 + phi), right = 2R cos(alpha/2 + phi).
struct CablePair {
  double left;
  double right;
};
CablePair taut_lengths(const CableGeometry& geom, double alpha);

// Commanded lengths for a commanded angle under the compliance policy:
// the cable on the side being shortened is held at its taut length once the
// command passes gamma; otherwise it is paid out proportionally to the
// remaining command margin.
CableCommand commanded_lengths(const CableGeometry& geom,
                               const CompliancePolicy& policy,
                               double amplitude, double alpha_cmd);

// Inverts a pair of commanded lengths into the admissible angle interval.
// Monotone closed-form inversion; valid because alpha_limit <= 2*phi.
// Throws InvertedInterval if lo > hi beyond round-off.
AngleInterval admissible_interval(const CableGeometry& geom,
                                  const CableCommand& cmd);

// commanded_lengths + admissible_interval for one joint.
AngleInterval admissible_interval_for(const CableGeometry& geom,
                                      const CompliancePolicy& policy,
                                      double amplitude, double alpha_cmd);

}  // namespace sidewinder
