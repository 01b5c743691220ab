#include <doctest.h>

#include <cmath>
#include <vector>

#include "dmglue/m05.hpp"
#include "dmglue/rng.hpp"
#include "test_helpers.hpp"

using namespace dmglue;
using dmglue::testing::separated_points;

namespace {

// the five coordinates straight from their defining cross ratios
// (independent of the chart formulas under test)
M05Point oracle_point(const std::array<Complex, 5>& p) {
  auto w = [&](int i, int j, int k, int l) {
    return cross_ratio(ExtComplex(p[i - 1]), ExtComplex(p[j - 1]),
                       ExtComplex(p[k - 1]), ExtComplex(p[l - 1]));
  };
  return M05Point{w(1, 4, 5, 3), w(2, 4, 5, 3), w(1, 3, 4, 2), w(1, 3, 5, 2),
                  w(1, 4, 5, 2)};
}

bool all_finite(const M05Point& pt) {
  return pt.x.is_finite() && pt.y.is_finite() && pt.z.is_finite() &&
         pt.u.is_finite() && pt.v.is_finite();
}

double coord_diff(const M05Point& a, const M05Point& b) {
  double worst = 0.0;
  for (M05Coord c : {M05Coord::X, M05Coord::Y, M05Coord::Z, M05Coord::U,
                     M05Coord::V}) {
    const ExtComplex &va = get_coord(a, c), &vb = get_coord(b, c);
    if (va.is_infinite() || vb.is_infinite()) {
      if (!(va.is_infinite() && vb.is_infinite())) return 1.0;
      continue;
    }
    double scale = std::max({1.0, std::abs(va.value()), std::abs(vb.value())});
    worst = std::max(worst, std::abs(va.value() - vb.value()) / scale);
  }
  return worst;
}

const std::vector<CoordPair>& all_pairs() {
  static const std::vector<CoordPair> pairs = [] {
    std::vector<CoordPair> v;
    for (int i = 0; i < 5; ++i)
      for (int j = i + 1; j < 5; ++j)
        v.push_back({static_cast<M05Coord>(i), static_cast<M05Coord>(j)});
    return v;
  }();
  return pairs;
}

}  // namespace

TEST_CASE("pinned chart values") {
  M05Point pt = coords_from_xz(2.0, 0.1);
  CHECK(std::abs(pt.y.value() - 1.8) <= 1e-15);
  CHECK(std::abs(pt.u.value() - (-0.125)) <= 1e-15);
  CHECK(std::abs(pt.v.value() - (-0.25)) <= 1e-15);
  CHECK((pt.v.value() == pt.x.value() * pt.u.value()));  // exact product

  M05Point node = coords_from_xz(0.5, 0.0);
  CHECK(std::abs(node.y.value() - 0.5) <= 1e-15);
  CHECK((node.z.value() == Complex(0.0, 0.0)));
  CHECK((node.u.value() == Complex(0.0, 0.0)));
  CHECK((node.v.value() == Complex(0.0, 0.0)));

  CHECK(verify_relations(pt).max_residual <= 1e-12);
}

TEST_CASE("chart formulas agree with the cross-ratio definitions") {
  Rng rng(2024);
  int used = 0;
  while (used < 300) {
    auto p = separated_points<5>(rng);
    M05Point pt = oracle_point(p);
    if (!all_finite(pt)) continue;
    Complex x = pt.x.value(), z = pt.z.value();
    if (std::abs(z * x - x + 1.0) < 1e-3) continue;  // stay in the chart
    ++used;

    CHECK(verify_relations(pt).max_residual <= 1e-10);
    M05Point rebuilt = coords_from_xz(x, z);
    CHECK(coord_diff(pt, rebuilt) <= 1e-10);
  }
}

TEST_CASE("relation report skips vanishing denominators") {
  M05Point two_node{ExtComplex(0.0), ExtComplex(0.0), ExtComplex(0.0),
                    ExtComplex(0.0), ExtComplex(0.0)};
  RelationReport rep = verify_relations(two_node);
  CHECK(rep.num_skipped == 4);
  CHECK(!rep.skipped[4]);  // v = xu stays defined: 0 = 0
  CHECK(rep.max_residual == 0.0);

  M05Point bad = coords_from_xz(2.0, 0.1);
  bad.v = ExtComplex(bad.v.value() + 0.1);
  RelationReport rep2 = verify_relations(bad);
  CHECK(rep2.max_residual > 1e-2);
}

TEST_CASE("configuration classifier") {
  M05Point smooth = coords_from_xz(2.0, 0.1);
  CHECK(config_of(smooth) == Configuration::Config3);
  CHECK(node_count(Configuration::Config3) == 0);

  M05Point one_node = coords_from_xz(0.5, 0.0);
  CHECK(config_of(one_node) == Configuration::Config1);
  CHECK(node_count(Configuration::Config1) == 1);

  M05Point two_node{ExtComplex(0.0), ExtComplex(0.0), ExtComplex(0.0),
                    ExtComplex(0.0), ExtComplex(0.0)};
  CHECK(config_of(two_node) == Configuration::Config2);
  CHECK(node_count(Configuration::Config2) == 2);

  // z = 0 with u != 0 matches nothing
  M05Point broken{ExtComplex(2.0), ExtComplex(2.0), ExtComplex(0.0),
                  ExtComplex(0.3), ExtComplex(0.6)};
  CHECK_THROWS_AS(config_of(broken), AmbiguousStratum);

  // x at a nodal value with gluing zeros is neither Config1 nor Config2
  M05Point nodal_x{ExtComplex(1.0), ExtComplex(1.0), ExtComplex(0.0),
                   ExtComplex(0.0), ExtComplex(0.0)};
  CHECK_THROWS_AS(config_of(nodal_x), AmbiguousStratum);
}

TEST_CASE("chart choice validation per configuration") {
  using C = M05Coord;
  auto ok = [](Configuration cfg, C a, C b) {
    return validate_knudsen_choice({a, b}, cfg).valid;
  };
  // one node: one of {x,y} plus one of {z,u,v}
  CHECK(ok(Configuration::Config1, C::X, C::Z));
  CHECK(ok(Configuration::Config1, C::Y, C::V));
  CHECK(!ok(Configuration::Config1, C::X, C::Y));
  CHECK(!ok(Configuration::Config1, C::Z, C::U));
  // two nodes: v is forbidden
  CHECK(ok(Configuration::Config2, C::X, C::Z));
  CHECK(ok(Configuration::Config2, C::Y, C::U));
  CHECK(!ok(Configuration::Config2, C::X, C::V));
  CHECK(!ok(Configuration::Config2, C::V, C::U));
  CHECK(!ok(Configuration::Config2, C::X, C::Y));
  // smooth: any two distinct
  CHECK(ok(Configuration::Config3, C::U, C::V));
  CHECK(!ok(Configuration::Config3, C::U, C::U));
  // diagnostics name the offending rule
  auto val = validate_knudsen_choice({C::X, C::V}, Configuration::Config2);
  CHECK(val.diagnostics.find("v = xu") != std::string::npos);
}

TEST_CASE("every pair reconstructs the full point on smooth configurations") {
  Rng rng(515);
  int used = 0;
  while (used < 200) {
    auto p = separated_points<5>(rng);
    M05Point pt = oracle_point(p);
    if (!all_finite(pt)) continue;
    // keep away from all chart boundaries so every denominator is healthy
    bool healthy = true;
    for (M05Coord c :
         {M05Coord::X, M05Coord::Y, M05Coord::Z, M05Coord::U, M05Coord::V}) {
      Complex w = get_coord(pt, c).value();
      if (std::abs(w) < 0.05 || std::abs(w - 1.0) < 0.05 || std::abs(w) > 20.0)
        healthy = false;
    }
    if (!healthy) continue;
    ++used;

    for (const CoordPair& pair : all_pairs()) {
      Complex a = get_coord(pt, pair.first).value();
      Complex b = get_coord(pt, pair.second).value();
      M05Point rebuilt;
      try {
        rebuilt = point_from_pair(pair, a, b);
      } catch (const ChartDomainViolation&) {
        continue;  // an individual denominator may still be small
      }
      CHECK(coord_diff(pt, rebuilt) <= 1e-10);
    }
  }
  CHECK(used == 200);
}

TEST_CASE("transitions round-trip and compose") {
  Rng rng(616);
  int used = 0;
  while (used < 100) {
    auto p = separated_points<5>(rng);
    M05Point pt = oracle_point(p);
    if (!all_finite(pt)) continue;
    bool healthy = true;
    for (M05Coord c :
         {M05Coord::X, M05Coord::Y, M05Coord::Z, M05Coord::U, M05Coord::V}) {
      Complex w = get_coord(pt, c).value();
      if (std::abs(w) < 0.1 || std::abs(w - 1.0) < 0.1 || std::abs(w) > 10.0)
        healthy = false;
    }
    if (!healthy) continue;
    ++used;

    const auto& pairs = all_pairs();
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      for (std::size_t j = 0; j < pairs.size(); ++j) {
        if (i == j) continue;
        TransitionResult ab, ba;
        try {
          ab = chart_transition(pairs[i], pairs[j], pt);
          ba = chart_transition(pairs[j], pairs[i], ab.reconstructed);
        } catch (const ChartDomainViolation&) {
          continue;
        }
        CHECK(coord_diff(pt, ba.reconstructed) <= 1e-10);
      }
    }
  }
}

TEST_CASE("transitions at the nodal configurations are exact") {
  using C = M05Coord;
  M05Point one_node = coords_from_xz(0.7, 0.0);

  TransitionResult t = chart_transition({C::X, C::Z}, {C::Y, C::U}, one_node);
  CHECK((t.target_values.first.value() == Complex(0.7, 0.0)));  // y = x here
  CHECK((t.target_values.second.value() == Complex(0.0, 0.0)));
  TransitionResult back =
      chart_transition({C::Y, C::U}, {C::X, C::Z}, t.reconstructed);
  CHECK(coord_diff(one_node, back.reconstructed) <= 1e-14);

  CHECK_THROWS_AS(chart_transition({C::X, C::Y}, {C::X, C::Z}, one_node),
                  InvalidChartChoice);

  M05Point two_node{ExtComplex(0.0), ExtComplex(0.0), ExtComplex(0.0),
                    ExtComplex(0.0), ExtComplex(0.0)};
  TransitionResult t2 =
      chart_transition({C::X, C::Z}, {C::Y, C::U}, two_node);
  CHECK((t2.target_values.first.value() == Complex(0.0, 0.0)));
  CHECK((t2.target_values.second.value() == Complex(0.0, 0.0)));
  CHECK_THROWS_AS(chart_transition({C::X, C::V}, {C::X, C::Z}, two_node),
                  InvalidChartChoice);
}

TEST_CASE("chart domain violations are reported") {
  // zx - x + 1 = 0 at z = (x-1)/x
  double x = 2.0;
  CHECK_THROWS_AS(coords_from_xz(x, (x - 1.0) / x), ChartDomainViolation);
  CHECK_THROWS_AS(point_from_pair({M05Coord::X, M05Coord::V}, 0.0, 0.0),
                  ChartDomainViolation);
}

TEST_CASE("cluster degenerations flow to the nodal strata") {
  Rng rng(4242);
  // points 3,4,5 collapse at rate t: z,u,v -> 0 linearly and y -> x
  for (int trial = 0; trial < 50; ++trial) {
    auto base = separated_points<3>(rng);        // z1, z2, cluster center
    auto shape = separated_points<3>(rng, 0.3);  // cluster shape
    double t = 1e-4;
    std::array<Complex, 5> p{base[0], base[1], base[2] + t * shape[0],
                             base[2] + t * shape[1], base[2] + t * shape[2]};
    M05Point pt = oracle_point(p);
    if (!all_finite(pt)) continue;
    CHECK(std::abs(pt.z.value()) < 100 * t);
    CHECK(std::abs(pt.u.value()) < 100 * t);
    CHECK(std::abs(pt.v.value()) < 100 * t);
    CHECK(std::abs(pt.y.value() - pt.x.value()) <
          100 * t * std::max(1.0, std::abs(pt.x.value())));
  }
  // second scale: 4,5 collapse inside the cluster: all five -> 0
  for (int trial = 0; trial < 50; ++trial) {
    auto base = separated_points<3>(rng);
    auto shape = separated_points<2>(rng, 0.3);
    double t = 1e-3;
    std::array<Complex, 5> p{base[0], base[1], base[2],
                             base[2] + t * shape[0],
                             base[2] + t * shape[0] + t * t * shape[1]};
    M05Point pt = oracle_point(p);
    if (!all_finite(pt)) continue;
    for (M05Coord c :
         {M05Coord::X, M05Coord::Y, M05Coord::Z, M05Coord::U, M05Coord::V})
      CHECK(std::abs(get_coord(pt, c).value()) < 0.05);
  }
}
