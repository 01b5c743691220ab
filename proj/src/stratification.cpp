#include "dmglue/stratification.hpp"

#include <bit>
#include <cmath>
#include <map>
#include <sstream>

namespace dmglue {

StratumLabel::StratumLabel(std::uint64_t bits, int ambient)
    : bits_(bits), ambient_(ambient) {
  if (ambient < 0 || ambient > 64)
    throw BadParameters("ambient dimension must lie in [0, 64]");
  std::uint64_t mask =
      ambient == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << ambient) - 1;
  if (bits & ~mask)
    throw BadParameters("label names an index beyond the ambient dimension");
}

StratumLabel StratumLabel::from_indices(const std::vector<int>& indices,
                                        int ambient) {
  std::uint64_t bits = 0;
  for (int i : indices) {
    if (i < 1 || i > ambient)
      throw BadParameters("index " + std::to_string(i) + " outside 1.." +
                          std::to_string(ambient));
    bits |= std::uint64_t{1} << (i - 1);
  }
  return StratumLabel(bits, ambient);
}

StratumLabel StratumLabel::full(int ambient) {
  if (ambient < 0 || ambient > 64)
    throw BadParameters("ambient dimension must lie in [0, 64]");
  std::uint64_t mask =
      ambient == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << ambient) - 1;
  return StratumLabel(mask, ambient);
}

bool StratumLabel::contains(int index) const {
  if (index < 1 || index > ambient_) return false;
  return (bits_ >> (index - 1)) & 1;
}

int StratumLabel::size() const { return std::popcount(bits_); }

std::string StratumLabel::str() const {
  std::ostringstream out;
  out << '{';
  bool first = true;
  for (int i = 1; i <= ambient_; ++i) {
    if (!contains(i)) continue;
    if (!first) out << ',';
    out << i;
    first = false;
  }
  out << '}';
  return out.str();
}

bool leq(const StratumLabel& s, const StratumLabel& t) {
  if (s.ambient() != t.ambient())
    throw MismatchedAmbient("comparing labels over n=" +
                            std::to_string(s.ambient()) + " and n=" +
                            std::to_string(t.ambient()));
  return (s.bits() & ~t.bits()) == 0;
}

StratumLabel stratum_of(const StratifiedPoint& pt) {
  if (!(pt.zero_tol > 0.0)) throw BadParameters("zero_tol must be positive");
  if (pt.a.size() > 64)
    throw BadParameters("at most 64 gluing coordinates supported");
  std::uint64_t bits = 0;
  for (std::size_t i = 0; i < pt.a.size(); ++i) {
    double r = std::abs(pt.a[i]);
    if (r >= 0.5 * pt.zero_tol && r <= 2.0 * pt.zero_tol)
      throw AmbiguousCoordinate("component " + std::to_string(i + 1) +
                                " has modulus " + std::to_string(r) +
                                " in the ambiguous band");
    if (r > pt.zero_tol) bits |= std::uint64_t{1} << i;
  }
  return StratumLabel(bits, static_cast<int>(pt.a.size()));
}

StratifiedMapReport check_stratified_map(
    const StratifiedMapFn& f, const std::vector<StratifiedPoint>& samples) {
  StratifiedMapReport report;
  // keyed by (ambient, bits) so mixed ambients stay separate
  std::map<std::pair<int, std::uint64_t>, StratumLabel> image_of;

  for (const StratifiedPoint& sample : samples) {
    StratumLabel src = stratum_of(sample);
    StratumLabel img = StratumLabel::empty(0);
    try {
      img = stratum_of(f(sample));
    } catch (const AmbiguousCoordinate& e) {
      report.violations.push_back("image of a sample in " + src.str() +
                                  " is ambiguous: " + e.what());
      continue;
    }
    auto key = std::make_pair(src.ambient(), src.bits());
    auto [it, inserted] = image_of.emplace(key, img);
    if (inserted) {
      report.induced.push_back({src, img});
    } else if (!(it->second == img)) {
      report.violations.push_back("stratum " + src.str() + " maps to both " +
                                  it->second.str() + " and " + img.str());
    }
  }

  for (const InducedLabelPair& p : report.induced) {
    for (const InducedLabelPair& q : report.induced) {
      if (p.source.ambient() != q.source.ambient()) continue;
      if (p.image.ambient() != q.image.ambient()) continue;
      if (leq(p.source, q.source) && !leq(p.image, q.image))
        report.violations.push_back(
            "order broken: " + p.source.str() + " <= " + q.source.str() +
            " but " + p.image.str() + " !<= " + q.image.str());
    }
  }
  return report;
}

}  // namespace dmglue
