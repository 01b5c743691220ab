#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "dmglue/errors.hpp"
#include "dmglue/ext_complex.hpp"

namespace dmglue {

// Subset of {1..n} naming the nonzero gluing coordinates. The partial
// order is inclusion.
class StratumLabel {
 public:
  StratumLabel(std::uint64_t bits, int ambient);
  static StratumLabel from_indices(const std::vector<int>& indices,
                                   int ambient);  // 1-based
  static StratumLabel empty(int ambient) { return StratumLabel(0, ambient); }
  static StratumLabel full(int ambient);

  int ambient() const { return ambient_; }
  std::uint64_t bits() const { return bits_; }
  bool contains(int index) const;  // 1-based
  int size() const;
  std::string str() const;

  friend bool operator==(const StratumLabel& a, const StratumLabel& b) {
    return a.ambient_ == b.ambient_ && a.bits_ == b.bits_;
  }
  friend bool operator!=(const StratumLabel& a, const StratumLabel& b) {
    return !(a == b);
  }

 private:
  std::uint64_t bits_;
  int ambient_;
};

bool leq(const StratumLabel& s, const StratumLabel& t);

// Point of R^k x C^n; the zero pattern of a fixes the stratum.
struct StratifiedPoint {
  std::vector<double> x;
  std::vector<Complex> a;
  double zero_tol = 1e-9;
};

// Rejects components in [zero_tol/2, 2 zero_tol] rather than guessing.
StratumLabel stratum_of(const StratifiedPoint& pt);

using StratifiedMapFn = std::function<StratifiedPoint(const StratifiedPoint&)>;

struct InducedLabelPair {
  StratumLabel source;
  StratumLabel image;
};

struct StratifiedMapReport {
  std::vector<InducedLabelPair> induced;  // observed strata and their images
  std::vector<std::string> violations;
  bool consistent() const { return violations.empty(); }
};

// Checks that samples sharing a stratum land in a shared stratum and that
// the induced map on labels preserves the order. Diagnostic: failures are
// listed, not thrown.
StratifiedMapReport check_stratified_map(
    const StratifiedMapFn& f, const std::vector<StratifiedPoint>& samples);

}  // namespace dmglue
