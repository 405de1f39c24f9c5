#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hcat/dopri5.hpp"
#include "hcat/prescribed.hpp"

namespace hcat {

enum class Branch { Upper, Lower };

inline const char* to_string(Branch b) { return b == Branch::Upper ? "upper" : "lower"; }

/// A point of the meridian curve. theta is the tangent angle measured from
/// the horizontal in the direction of increasing arc length s, so that
/// nu = cos(theta) is the vertical component of the normal (-sin, cos).
struct ProfileState {
  double s = 0.0;
  double x = 0.0;
  double z = 0.0;
  double theta = 0.0;
  double nu = 0.0;
};

struct IntegratorConfig {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  std::optional<double> x_max;  // defaults to 1e6 * r0
  long max_steps = 200000;
  int dense_spacing = 32;       // checkpoints per decade of radius
  double far_field_start = 1e3; // log-radius regime beyond this many necksizes

  double resolved_x_max(double r0) const { return x_max ? *x_max : 1e6 * r0; }
};

enum class Termination { ReachedXMax, StepFailure, TurningPoint };

inline const char* to_string(Termination t) {
  switch (t) {
    case Termination::ReachedXMax: return "reached_x_max";
    case Termination::StepFailure: return "step_failure";
    case Termination::TurningPoint: return "turning_point";
  }
  return "unknown";
}

struct BranchTermination {
  Termination reason = Termination::ReachedXMax;
  ProfileState where;
  std::string detail;
};

struct CurvatureSample {
  double x = 0.0;
  double kappa1 = 0.0;  // meridian curvature d(theta)/ds, from the ODE at the interpolated state
  double kappa1_dense = 0.0;  // same, differentiated from the dense output
  double kappa2 = 0.0;  // parallel curvature sin(theta)/x
  double sff_norm_sq = 0.0;          // kappa1^2 + kappa2^2
  double sff_norm_sq_formula = 0.0;  // from nu and H(nu) alone
  double nu = 0.0;
};

/// Everything the dense output knows at one radius of one branch.
struct BranchPoint {
  ProfileState state;
  double slope = 0.0;      // f'(x)
  double curvature = 0.0;  // f''(x), from the interpolant's derivative
  double kappa1 = 0.0;     // d(theta)/ds, from the interpolant's derivative
};

/// Squared norm of the second fundamental form of a rotational H-surface at
/// radius x in terms of the angle function: 4H^2 + 2k(k - 2H), k = sqrt(1-nu^2)/x.
double sff_norm_sq_from_angle(double h_of_nu, double nu, double x);
/// Same, with sqrt(1-nu^2) supplied directly (sin(theta)); avoids the
/// cancellation in 1-nu^2 when nu is within rounding of 1.
double sff_norm_sq_from_angle(double h_of_nu, double nu, double x, double sin_theta);

/// Integrated H-catenoid: the rotational H-surface through the waist circle of
/// radius r0 at height 0 with vertical tangent. Immutable once built.
class Catenoid {
 public:
  struct Data;

  const PrescribedFunction& prescription() const { return prescription_; }
  double necksize() const { return necksize_; }
  const IntegratorConfig& config() const { return config_; }

  /// Checkpoint states: the waist followed by a log-spaced ladder from
  /// 1.001 r0 to the end of the branch.
  const std::vector<ProfileState>& states(Branch b) const;
  const BranchTermination& termination(Branch b) const;
  /// Largest radius covered by the dense output of the branch.
  double max_radius(Branch b) const;

  /// Dense-output evaluation at radius x in (r0, max_radius].
  BranchPoint point_at(Branch b, double x) const;

  /// Radii of the checkpoint ladder (excluding the waist).
  std::vector<double> checkpoint_radii(Branch b) const;

  /// Same surface seen through the homothety x -> lambda x.
  Catenoid rescaled(double lambda, IntegratorConfig cfg) const {
    return Catenoid(scaled(prescription_, 1.0 / lambda), lambda * necksize_, cfg, data_, length_scale_ * lambda);
  }

  Catenoid(PrescribedFunction h, double r0, IntegratorConfig cfg, std::shared_ptr<const Data> data,
           double length_scale);

 private:
  PrescribedFunction prescription_;
  double necksize_;
  IntegratorConfig config_;
  std::shared_ptr<const Data> data_;
  double length_scale_;
  std::array<std::vector<ProfileState>, 2> states_;
  std::array<BranchTermination, 2> terminations_;
};

/// Integrates x' = cos(theta), z' = sin(theta), theta' = 2H(cos theta) - sin(theta)/x
/// from the waist, forward in s for the upper branch and backward for the lower
/// branch, until x reaches x_max, the curve turns back, or stepping fails.
/// Throws std::invalid_argument for r0 <= 0 and std::domain_error if H
/// yields a non-finite value.
Catenoid integrate_catenoid(const PrescribedFunction& h, double r0, const IntegratorConfig& cfg = {});

double height_at(const Catenoid& c, Branch b, double x);
/// f'(x); positive on the upper branch, negative on the lower one.
double slope_at(const Catenoid& c, Branch b, double x);
/// Tangent angle at radius x; pi/2 at the waist.
double angle_at(const Catenoid& c, Branch b, double x);
CurvatureSample curvature_at(const Catenoid& c, Branch b, double x);

/// |2H(nu) - kappa1 - kappa2| written through the graph z = f(x), with f''
/// taken from the dense output. Lower branch uses the flipped orientation.
double residual(const Catenoid& c, Branch b, double x);

/// Homothetic image lambda * c, which is the catenoid of H/lambda with
/// necksize lambda * r0.
Catenoid scale(const Catenoid& c, double lambda);

/// Necksize r for which the upper branch of Sigma_H(r) has angle function
/// nu_target at radius x_target, found by bisection in log r.
double necksize_for_angle(const PrescribedFunction& h, double x_target, double nu_target,
                          const IntegratorConfig& cfg = {});

struct SurfaceMesh {
  std::vector<std::array<double, 3>> vertices;
  std::vector<std::array<std::size_t, 4>> quads;  // counter-clockwise seen from the surface normal
};

/// Rotates both branches; `rings` radii per branch log-spaced from the waist
/// to x_hi (default: the shorter branch's max radius, capped at 10 r0).
SurfaceMesh mesh(const Catenoid& c, int rings, int segments, std::optional<double> x_hi = std::nullopt);

void write_obj(std::ostream& os, const SurfaceMesh& m);

/// CSV with header s,x,z,theta,nu,kappa1,kappa2,sff_norm_sq,branch; one row per
/// checkpoint of each requested branch, outward from the waist.
void write_profile_csv(std::ostream& os, const Catenoid& c, const std::vector<Branch>& branches);

/// Shortest round-trip decimal text of v.
std::string format_double(double v);

}  // namespace hcat
