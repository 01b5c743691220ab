#include "dmglue/m05.hpp"

#include <cmath>

namespace dmglue {
namespace {

constexpr double kDenTol = 1e-10;

Complex checked_div(Complex num, Complex den, const char* what) {
  if (std::abs(den) <= kDenTol)
    throw ChartDomainViolation(std::string("vanishing denominator in ") +
                               what);
  return num / den;
}

Complex finite(const ExtComplex& w, const char* what) {
  if (w.is_infinite())
    throw ChartDomainViolation(std::string(what) +
                               ": infinite value is outside the chart domain");
  return w.value();
}

double scaled_residual(Complex lhs, Complex rhs) {
  double scale = std::max({1.0, std::abs(lhs), std::abs(rhs)});
  return std::abs(lhs - rhs) / scale;
}

bool is_zero(const ExtComplex& w, double tol) {
  return w.is_finite() && std::abs(w.value()) <= tol;
}

bool is_nodal(const ExtComplex& w, double tol) {
  if (w.is_infinite()) return true;
  return std::abs(w.value()) <= tol || std::abs(w.value() - 1.0) <= tol;
}

}  // namespace

std::string coord_name(M05Coord c) {
  switch (c) {
    case M05Coord::X: return "x";
    case M05Coord::Y: return "y";
    case M05Coord::Z: return "z";
    case M05Coord::U: return "u";
    case M05Coord::V: return "v";
  }
  return "?";
}

const ExtComplex& get_coord(const M05Point& pt, M05Coord c) {
  switch (c) {
    case M05Coord::X: return pt.x;
    case M05Coord::Y: return pt.y;
    case M05Coord::Z: return pt.z;
    case M05Coord::U: return pt.u;
    case M05Coord::V: return pt.v;
  }
  return pt.x;
}

M05Point coords_from_xz(Complex x, Complex z) {
  Complex den = z * x - x + 1.0;
  if (std::abs(den) <= kDenTol)
    throw ChartDomainViolation("coords_from_xz: zx - x + 1 vanishes");
  Complex y = x - x * z;
  Complex u = z / den;
  Complex v = x * u;  // keeps v = xu exact in floating point
  return M05Point{ExtComplex(x), ExtComplex(y), ExtComplex(z), ExtComplex(u),
                  ExtComplex(v)};
}

RelationReport verify_relations(const M05Point& pt, double den_tol) {
  RelationReport rep{};
  rep.max_residual = 0.0;
  rep.num_skipped = 0;

  auto eval = [&](int idx, bool any_infinite, Complex den, Complex lhs,
                  Complex num) {
    if (any_infinite || std::abs(den) <= den_tol) {
      rep.skipped[idx] = true;
      rep.residual[idx] = 0.0;
      ++rep.num_skipped;
      return;
    }
    rep.residual[idx] = scaled_residual(lhs, num / den);
    rep.max_residual = std::max(rep.max_residual, rep.residual[idx]);
  };

  const bool xi = pt.x.is_infinite(), yi = pt.y.is_infinite(),
             zi = pt.z.is_infinite(), ui = pt.u.is_infinite(),
             vi = pt.v.is_infinite();
  Complex x = xi ? 0.0 : pt.x.value(), y = yi ? 0.0 : pt.y.value(),
          z = zi ? 0.0 : pt.z.value(), u = ui ? 0.0 : pt.u.value(),
          v = vi ? 0.0 : pt.v.value();

  // y = (v - vz)/(v - vz + z)
  eval(0, yi || vi || zi, v - v * z + z, y, v - v * z);
  // z = (xv - v)/(xv - x)
  eval(1, zi || xi || vi, x * v - x, z, x * v - v);
  // x = (z - u)/(zu - u)
  eval(2, xi || zi || ui, z * u - u, x, z - u);
  // u = (y - x)/(xy - x)
  eval(3, ui || xi || yi, x * y - x, u, y - x);
  // v = xu (always defined for finite values)
  if (vi || xi || ui) {
    rep.skipped[4] = true;
    rep.residual[4] = 0.0;
    ++rep.num_skipped;
  } else {
    rep.residual[4] = scaled_residual(v, x * u);
    rep.max_residual = std::max(rep.max_residual, rep.residual[4]);
  }
  return rep;
}

int node_count(Configuration c) {
  switch (c) {
    case Configuration::Config1: return 1;
    case Configuration::Config2: return 2;
    case Configuration::Config3: return 0;
  }
  return 0;
}

Configuration config_of(const M05Point& pt, double zero_tol) {
  const bool glue_zero = is_zero(pt.z, zero_tol) && is_zero(pt.u, zero_tol) &&
                         is_zero(pt.v, zero_tol);
  const bool xy_zero = is_zero(pt.x, zero_tol) && is_zero(pt.y, zero_tol);
  const bool xy_generic =
      !is_nodal(pt.x, zero_tol) && !is_nodal(pt.y, zero_tol);

  if (glue_zero && xy_zero) return Configuration::Config2;
  if (glue_zero && xy_generic) return Configuration::Config1;

  bool all_generic = true;
  for (const ExtComplex* w : {&pt.x, &pt.y, &pt.z, &pt.u, &pt.v})
    if (is_nodal(*w, zero_tol)) all_generic = false;
  if (all_generic) return Configuration::Config3;

  std::string pattern;
  for (const ExtComplex* w : {&pt.x, &pt.y, &pt.z, &pt.u, &pt.v})
    pattern += is_zero(*w, zero_tol) ? '0' : (is_nodal(*w, zero_tol) ? 'n' : '*');
  throw AmbiguousStratum("config_of: zero pattern '" + pattern +
                         "' (x y z u v) matches no configuration");
}

ChoiceValidation validate_knudsen_choice(const CoordPair& choice,
                                         Configuration config) {
  auto is_b = [](M05Coord c) { return c == M05Coord::X || c == M05Coord::Y; };
  auto is_glue = [](M05Coord c) {
    return c == M05Coord::Z || c == M05Coord::U || c == M05Coord::V;
  };
  const M05Coord a = choice.first, b = choice.second;

  if (a == b)
    return {false, "the two coordinates of a chart must be distinct"};

  switch (config) {
    case Configuration::Config3:
      return {true, "smooth configuration: any two distinct coordinates"};
    case Configuration::Config1: {
      if ((is_b(a) && is_glue(b)) || (is_b(b) && is_glue(a)))
        return {true,
                "one stratum coordinate plus one gluing parameter of the node"};
      if (is_b(a) && is_b(b))
        return {false,
                "x and y restrict to the same coordinate on the stratum; a "
                "gluing parameter from {z,u,v} is required"};
      return {false,
              "two gluing parameters cannot separate the stratum direction; "
              "one of {x,y} is required"};
    }
    case Configuration::Config2: {
      bool has_v = (a == M05Coord::V || b == M05Coord::V);
      if (has_v)
        return {false,
                "v = xu vanishes to second order at the two-node point and "
                "cannot serve as a coordinate"};
      if ((is_b(a) && is_glue(b)) || (is_b(b) && is_glue(a)))
        return {true, "one gluing parameter per node: one of {x,y} for the "
                      "first node, one of {z,u} for the second"};
      return {false,
              "need one gluing parameter per node: one of {x,y} and one of "
              "{z,u}"};
    }
  }
  return {false, "unknown configuration"};
}

M05Point point_from_pair(const CoordPair& pair, Complex first,
                         Complex second) {
  const M05Coord c1 = pair.first, c2 = pair.second;
  if (c1 == c2)
    throw InvalidChartChoice("point_from_pair: coordinates must be distinct");

  // normalize so the pair is in canonical (smaller enum, larger enum) order
  M05Coord a = c1, b = c2;
  Complex va = first, vb = second;
  if (static_cast<int>(a) > static_cast<int>(b)) {
    std::swap(a, b);
    std::swap(va, vb);
  }

  Complex x, y, z, u, v;
  const Complex one = 1.0;

  if (a == M05Coord::X && b == M05Coord::Z) {
    x = va, z = vb;
    y = x - x * z;
    u = checked_div(z, z * x - x + one, "u = z/(zx-x+1)");
    v = x * u;
  } else if (a == M05Coord::X && b == M05Coord::Y) {
    x = va, y = vb;
    z = checked_div(x - y, x, "z = (x-y)/x");
    u = checked_div(y - x, x * y - x, "u = (y-x)/(xy-x)");
    v = x * u;
  } else if (a == M05Coord::X && b == M05Coord::U) {
    x = va, u = vb;
    z = checked_div(u * (x - one), u * x - one, "z = u(x-1)/(ux-1)");
    y = x - x * z;
    v = x * u;
  } else if (a == M05Coord::X && b == M05Coord::V) {
    x = va, v = vb;
    u = checked_div(v, x, "u = v/x");
    z = checked_div(v * (x - one), x * (v - one), "z = v(x-1)/(x(v-1))");
    y = x - x * z;
  } else if (a == M05Coord::Y && b == M05Coord::Z) {
    y = va, z = vb;
    x = checked_div(y, one - z, "x = y/(1-z)");
    u = checked_div(z, z * x - x + one, "u = z/(zx-x+1)");
    v = x * u;
  } else if (a == M05Coord::Y && b == M05Coord::U) {
    y = va, u = vb;
    x = checked_div(y, u * y - u + one, "x = y/(uy-u+1)");
    // z = (x-y)/x is 0/0 at the two-node point; this form stays defined
    z = checked_div(u * (x - one), u * x - one, "z = u(x-1)/(ux-1)");
    v = x * u;
  } else if (a == M05Coord::Y && b == M05Coord::V) {
    y = va, v = vb;
    z = checked_div(v * (one - y), y + v - v * y, "z = v(1-y)/(y+v-vy)");
    x = checked_div(y, one - z, "x = y/(1-z)");
    u = checked_div(v, x, "u = v/x");
  } else if (a == M05Coord::Z && b == M05Coord::U) {
    z = va, u = vb;
    x = checked_div(z - u, z * u - u, "x = (z-u)/(zu-u)");
    y = x - x * z;
    v = x * u;
  } else if (a == M05Coord::Z && b == M05Coord::V) {
    z = va, v = vb;
    x = checked_div(v, v + z - v * z, "x = v/(v+z-vz)");
    y = x - x * z;
    u = checked_div(v, x, "u = v/x");
  } else {  // (U, V)
    u = va, v = vb;
    x = checked_div(v, u, "x = v/u");
    z = checked_div(v - u, v - one, "z = (v-u)/(v-1)");
    y = x - x * z;
  }

  return M05Point{ExtComplex(x), ExtComplex(y), ExtComplex(z), ExtComplex(u),
                  ExtComplex(v)};
}

TransitionResult chart_transition(const CoordPair& from, const CoordPair& to,
                                  const M05Point& pt) {
  const Configuration config = config_of(pt);
  for (const CoordPair* pair : {&from, &to}) {
    ChoiceValidation val = validate_knudsen_choice(*pair, config);
    if (!val.valid)
      throw InvalidChartChoice("chart_transition: (" +
                               coord_name(pair->first) + "," +
                               coord_name(pair->second) +
                               ") is not admissible here: " + val.diagnostics);
  }
  Complex v1 = finite(get_coord(pt, from.first), "chart_transition");
  Complex v2 = finite(get_coord(pt, from.second), "chart_transition");
  M05Point full = point_from_pair(from, v1, v2);
  return TransitionResult{
      {get_coord(full, to.first), get_coord(full, to.second)}, full};
}

}  // namespace dmglue
