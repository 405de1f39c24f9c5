#pragma once

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hcat/expression.hpp"

namespace hcat {

/// Endpoints of the prescription domain [-1, 1].
enum class Endpoint { Minus = -1, Plus = 1 };

inline double endpoint_value(Endpoint e) { return e == Endpoint::Plus ? 1.0 : -1.0; }

/// The 1-dimensional prescription H: [-1, 1] -> R evaluated at the angle
/// function of a surface.
///
/// A cheap value type: copies share one immutable representation, so values
/// can be passed between threads freely.
class PrescribedFunction {
 public:
  enum class Kind { PowerLaw, Polynomial, Scaled, Expression, Table };

  struct Impl;

  /// H(y). Throws std::domain_error for |y| > 1.
  double operator()(double y) const;
  /// dH/dy, one-sided at the endpoints.
  double derivative(double y) const;

  Kind kind() const;
  std::string describe() const;

  /// Power-law exponent, when kind() == PowerLaw.
  std::optional<double> power_law_exponent() const;

  explicit PrescribedFunction(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

 private:
  std::shared_ptr<const Impl> impl_;
};

/// H_alpha(y) = -(1 - y^2)^alpha with analytic derivative. alpha > 0.
PrescribedFunction power_law(double alpha);

/// sum_k coeffs[k] y^k.
PrescribedFunction polynomial(std::vector<double> coeffs);

inline PrescribedFunction constant(double c) { return polynomial({c}); }

/// factor * base(y), evaluated as exactly that product. factor != 0.
PrescribedFunction scaled(PrescribedFunction base, double factor);

/// User expression in the variable `y`; checked finite on a grid of [-1, 1].
PrescribedFunction parsed_expression(std::string_view text);

/// Monotone cubic (Fritsch-Carlson) interpolation of samples; the grid must
/// be strictly increasing and span exactly [-1, 1].
PrescribedFunction sampled_table(std::vector<double> ys, std::vector<double> values);

/// A table file that cannot be opened or read.
struct TableFileError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Reads a two-column table (y, H) separated by commas or whitespace; lines
/// starting with '#' and a non-numeric header line are skipped. Throws
/// TableFileError for unreadable or malformed files.
PrescribedFunction load_table(const std::string& path);

inline double eval(const PrescribedFunction& h, double y) { return h(y); }

// ---------------------------------------------------------------------------
// Class membership and limit behavior at the endpoints.

inline constexpr double kEndpointTolerance = 1e-9;
inline constexpr double kNonzeroTolerance = 1e-6;
inline constexpr double kLimitRelTolerance = 1e-5;

struct ClassMembership {
  bool is_member = false;
  double interior_max = 0.0;
  double value_at_minus_one = 0.0;
  double value_at_plus_one = 0.0;
  int grid_size = 0;
};

/// Membership in the class of prescriptions negative on (-1, 1) and vanishing
/// at +-1, checked on a Chebyshev grid of `grid_size` interior nodes. A
/// positive verdict means "not falsified on the grid".
ClassMembership check_frakC1(const PrescribedFunction& h, int grid_size = 256);

struct PowerLawOrder {
  Endpoint endpoint = Endpoint::Plus;
  double alpha_hat = 0.0;
  double fit_residual = 0.0;
  bool converged = false;
  std::vector<double> window;
};

/// Least-squares slope of log(-H(y)) against log(1 - y^2) over the ladder
/// y = +-(1 - 10^-k), k = 2..8. Throws std::domain_error if H >= 0 at a node.
PowerLawOrder vanishing_order(const PrescribedFunction& h, Endpoint endpoint);

/// Same fit on caller-supplied (y, H(y)) samples.
PowerLawOrder fit_vanishing_order(const std::vector<std::pair<double, double>>& samples, Endpoint endpoint);

struct EquivalenceReport {
  Endpoint endpoint = Endpoint::Plus;
  double ratio_limit = 0.0;
  bool converged = false;
  std::vector<std::pair<double, double>> samples;  // (y, H(y)/F(y))
  std::vector<double> skipped;                     // y where F vanished
  std::vector<double> accelerated;
  double bound_low = 0.0;   // M: min ratio over the sampled window
  double bound_high = 0.0;  // M': max ratio over the sampled window
};

/// Estimates lim H(y)/F(y) as y -> endpoint from the ladder
/// y = +-(1 - 10^-k), k = 2..10, with Aitken acceleration.
EquivalenceReport limit_ratio(const PrescribedFunction& h, const PrescribedFunction& f, Endpoint endpoint);

}  // namespace hcat
