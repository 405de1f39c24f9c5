#include <charconv>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "hcat/numeric.hpp"
#include "hcat/profile.hpp"

namespace hcat {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

SurfaceMesh mesh(const Catenoid& c, int rings, int segments, std::optional<double> x_hi) {
  if (rings < 2) throw std::invalid_argument("mesh: rings must be at least 2");
  if (segments < 3) throw std::invalid_argument("mesh: segments must be at least 3");
  const double r0 = c.necksize();
  const double reach = std::min(c.max_radius(Branch::Upper), c.max_radius(Branch::Lower));
  if (!(reach > r0)) throw std::runtime_error("mesh: a branch is empty");
  double top = x_hi ? *x_hi : std::min(reach, 10.0 * r0);
  if (!(top > r0) || top > reach) throw std::invalid_argument("mesh: x_hi outside the integrated range");

  std::vector<double> radii(rings);
  for (int i = 0; i < rings; ++i) radii[i] = r0 * std::pow(top / r0, double(i) / (rings - 1));
  radii.back() = top;

  SurfaceMesh m;
  const double two_pi = 2.0 * std::acos(-1.0);
  for (Branch b : {Branch::Upper, Branch::Lower}) {
    const std::size_t base = m.vertices.size();
    for (int i = 0; i < rings; ++i) {
      const double x = radii[i];
      const double z = i == 0 ? 0.0 : height_at(c, b, x);
      for (int j = 0; j < segments; ++j) {
        const double phi = two_pi * j / segments;
        m.vertices.push_back({x * std::cos(phi), x * std::sin(phi), z});
      }
    }
    auto id = [&](int i, int j) { return base + std::size_t(i) * segments + std::size_t(j % segments); };
    for (int i = 0; i + 1 < rings; ++i)
      for (int j = 0; j < segments; ++j) {
        if (b == Branch::Upper)
          m.quads.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)});
        else
          m.quads.push_back({id(i, j), id(i, j + 1), id(i + 1, j + 1), id(i + 1, j)});
      }
  }
  return m;
}

void write_obj(std::ostream& os, const SurfaceMesh& m) {
  for (const auto& v : m.vertices)
    os << "v " << format_double(v[0]) << ' ' << format_double(v[1]) << ' ' << format_double(v[2]) << '\n';
  for (const auto& q : m.quads) os << "f " << q[0] + 1 << ' ' << q[1] + 1 << ' ' << q[2] + 1 << ' ' << q[3] + 1 << '\n';
}

void write_profile_csv(std::ostream& os, const Catenoid& c, const std::vector<Branch>& branches) {
  os << "s,x,z,theta,nu,kappa1,kappa2,sff_norm_sq,branch\n";
  const double r0 = c.necksize();
  for (Branch b : branches) {
    const auto& states = c.states(b);
    for (std::size_t i = 0; i < states.size(); ++i) {
      const auto& st = states[i];
      double k1, k2;
      if (i == 0) {
        k1 = 2.0 * c.prescription()(0.0) - 1.0 / r0;
        k2 = 1.0 / r0;
      } else {
        const auto cs = curvature_at(c, b, st.x);
        k1 = cs.kappa1;
        k2 = cs.kappa2;
      }
      os << format_double(st.s) << ',' << format_double(st.x) << ',' << format_double(st.z) << ','
         << format_double(st.theta) << ',' << format_double(st.nu) << ',' << format_double(k1) << ','
         << format_double(k2) << ',' << format_double(k1 * k1 + k2 * k2) << ',' << to_string(b) << '\n';
    }
  }
}

}  // namespace hcat
