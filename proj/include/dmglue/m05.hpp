#pragma once

#include <array>
#include <string>
#include <utility>

#include "dmglue/cross_ratio.hpp"
#include "dmglue/ext_complex.hpp"

namespace dmglue {

// Coordinates of a 5-point configuration: the five cross ratios
//   x = w1453, y = w2453, z = w1342, u = w1352, v = w1452.
// They satisfy
//   y = (v - vz)/(v - vz + z)    z = (xv - v)/(xv - x)
//   x = (z - u)/(zu - u)         u = (y - x)/(xy - x)
//   v = x u
// and the closed chart forms y = x - xz, u = z/(zx - x + 1), v = x u.
struct M05Point {
  ExtComplex x, y, z, u, v;
};

enum class M05Coord { X = 0, Y = 1, Z = 2, U = 3, V = 4 };

const ExtComplex& get_coord(const M05Point& pt, M05Coord c);

std::string coord_name(M05Coord c);

using CoordPair = std::pair<M05Coord, M05Coord>;

// Evaluates the chart parametrized by (x, z). Denominator zx - x + 1 must
// stay above 1e-10 in modulus or the point leaves the chart domain.
M05Point coords_from_xz(Complex x, Complex z);

// Residuals of the five defining relations. A relation whose denominator
// falls below den_tol, or that involves an infinite value, is skipped and
// flagged rather than evaluated.
struct RelationReport {
  std::array<double, 5> residual;  // scaled |lhs - rhs|; 0 when skipped
  std::array<bool, 5> skipped;
  double max_residual;             // over relations actually evaluated
  int num_skipped;
};

RelationReport verify_relations(const M05Point& pt, double den_tol = 1e-10);

// Degeneration pattern of the configuration:
//   Config1 - one node: z, u, v vanish; x, y stay away from {0, 1, inf}.
//   Config2 - two nodes: all five coordinates vanish.
//   Config3 - smooth: all five away from {0, 1, inf}.
enum class Configuration { Config1, Config2, Config3 };

int node_count(Configuration c);

// Classification by the zero pattern at tolerance zero_tol. Patterns that
// match none of the three configurations throw AmbiguousStratum.
Configuration config_of(const M05Point& pt, double zero_tol = 1e-9);

// A coordinate pair is an admissible chart choice when the gluing
// coordinates it contains vanish exactly on the stratum and the rest stay
// away from the nodal values:
//   Config1: one of {x,y} plus one of {z,u,v}
//   Config2: one of {x,y} plus one of {z,u}; v = xu is a product of gluing
//            parameters there and cannot serve as a coordinate
//   Config3: any two distinct coordinates
struct ChoiceValidation {
  bool valid;
  std::string diagnostics;
};

ChoiceValidation validate_knudsen_choice(const CoordPair& choice,
                                         Configuration config);

// Rebuilds all five coordinates from the values of one admissible pair,
// using the closed forms of the relations. Throws ChartDomainViolation when
// a denominator vanishes (below 1e-10) or an input is infinite.
M05Point point_from_pair(const CoordPair& pair, Complex first, Complex second);

// Transition between two charts at pt: reads the source coordinates off pt,
// rebuilds the full point, and reports the target coordinates. Both pairs
// must be admissible for pt's configuration (InvalidChartChoice otherwise).
struct TransitionResult {
  std::pair<ExtComplex, ExtComplex> target_values;
  M05Point reconstructed;
};

TransitionResult chart_transition(const CoordPair& from, const CoordPair& to,
                                  const M05Point& pt);

}  // namespace dmglue
