#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hcat/prescribed.hpp"

namespace hcat {

using Vec3 = std::array<double, 3>;

/// A prescription on the unit sphere. The axisymmetric form evaluates
/// h(<x, e3>); the general form is an arbitrary function of the point.
class SphereFunction {
 public:
  static SphereFunction axisymmetric(PrescribedFunction h);
  static SphereFunction general(std::function<double(const Vec3&)> fn, std::string description);
  /// Expression in x1, x2, x3 (y is accepted for x3).
  static SphereFunction parse(std::string_view text);

  double operator()(const Vec3& x) const { return fn_(x); }
  bool is_axisymmetric() const { return axial_.has_value(); }
  const std::optional<PrescribedFunction>& axial() const { return axial_; }
  const std::string& describe() const { return description_; }

 private:
  std::function<double(const Vec3&)> fn_;
  std::optional<PrescribedFunction> axial_;
  std::string description_;
};

/// Point of the sphere at height y and azimuth phi.
Vec3 sphere_point(double y, double phi);

/// Closed hemisphere around the pole of `endpoint`: Fibonacci nodes, an
/// equator ring, a ladder y = +-(1 - 10^-k) (k = 1..12) at 8 azimuths, and
/// the pole itself.
std::vector<Vec3> hemisphere_grid(Endpoint endpoint, int nodes);

/// F(y) = -c (1 - y^2)^alpha used below the prescription on one hemisphere.
struct Minorant {
  double c = 0.0;
  double alpha = 0.0;
  Endpoint endpoint = Endpoint::Plus;
  double margin = 0.0;  // min over the grid of H(x) - F(<x, e3>)
  Vec3 margin_at{};

  double operator()(double y) const;
};

struct MinorantFit {
  std::optional<Minorant> minorant;
  double vanishing_order = 0.0;  // estimated order of the axial profile at the pole
  std::string failure;           // empty on success
};

/// Fits a minorant at the pole of `endpoint` on the hemisphere grid.
MinorantFit fit_minorant(const SphereFunction& hs, Endpoint endpoint, int nodes = 4096);

/// Margin of a given minorant on the hemisphere grid with `nodes` nodes.
Minorant verify_minorant(const SphereFunction& hs, Minorant m, int nodes);

struct PoleCheck {
  Endpoint endpoint = Endpoint::Plus;
  std::optional<Minorant> minorant;
  std::optional<EquivalenceReport> limit;  // F(y) / H_alpha(y) at the pole
  double reverify_margin = 0.0;            // margin on the doubled grid
  bool excluded = false;
  std::vector<std::string> notes;
};

struct CertifyOptions {
  int grid_nodes = 4096;
  double tol_margin = 1e-10;
  std::optional<Minorant> north;  // user-supplied minorants (c, alpha)
  std::optional<Minorant> south;
};

struct HalfSpaceCertificate {
  std::string prescription;
  std::vector<std::string> excluded;  // subset of {"lower", "upper"}
  PoleCheck north, south;             // north excludes lower half-spaces, south upper
  int grid_resolution = 0;
  double tol_margin = 0.0;
  std::vector<std::string> verdict_notes;
};

/// Grid-verified hypotheses of the half-space theorem, one pole at a time.
HalfSpaceCertificate certify(const SphereFunction& hs, const CertifyOptions& options = {});

}  // namespace hcat
