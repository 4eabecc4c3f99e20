#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

namespace moscale::detail {

inline bool rises(double before, double after) {
  // relative slack absorbs the optimiser's convergence noise
  return after > before + 1e-7 * std::abs(before);
}

template <class LossFn>
EntryThreshold first_entry(LossFn&& loss, double target, std::uint64_t n_max) {
  EntryThreshold out;
  auto eval = [&](std::uint64_t n) {
    ++out.probes;
    return static_cast<double>(loss(n));
  };
  bool monotone = true;

  std::uint64_t lo = 0;  // loss(lo) > target; 0 is a sentinel
  double flo = kInfinity;
  std::uint64_t hi = 1;
  double fhi = eval(hi);
  while (!(fhi <= target)) {
    if (hi >= n_max)
      throw NumericError("entry threshold exceeds the search cap " +
                         std::to_string(n_max));
    lo = hi;
    flo = fhi;
    hi = std::min(hi * 2, n_max);
    fhi = eval(hi);
    if (rises(flo, fhi)) monotone = false;
  }
  while (hi - lo > 1) {
    const std::uint64_t mid = lo + (hi - lo) / 2;
    const double fm = eval(mid);
    if (rises(flo, fm) || rises(fm, fhi)) monotone = false;
    if (fm <= target) {
      hi = mid;
      fhi = fm;
    } else {
      lo = mid;
      flo = fm;
    }
  }
  if (monotone) {
    out.n = hi;
    return out;
  }
  out.scanned = true;
  for (std::uint64_t n = 1; n <= hi; ++n) {
    if (eval(n) <= target) {
      out.n = n;
      return out;
    }
  }
  out.n = hi;
  return out;
}

}  // namespace moscale::detail
