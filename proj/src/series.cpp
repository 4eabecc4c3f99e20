#include "series.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace moscale::detail {

namespace {

constexpr long double kTailRatio = 0.25L;

std::vector<std::size_t> make_checkpoints(std::size_t p) {
  std::vector<std::size_t> cps;
  for (std::size_t m = 0; m <= std::min<std::size_t>(32, p); ++m) cps.push_back(m);
  std::size_t m = 32;
  while (m < p) {
    m = std::min(p, static_cast<std::size_t>(std::ceil(m * 1.1)));
    cps.push_back(m);
  }
  return cps;
}

}  // namespace

PowerLawSeries::PowerLawSeries(double gamma, double delta, std::size_t p)
    : lam_(p), w_(p), checkpoints_(make_checkpoints(p)) {
  const long double eg = -1.0L - static_cast<long double>(gamma);
  const long double ed = -static_cast<long double>(delta);
  for (std::size_t i = 0; i < p; ++i) {
    const long double x = static_cast<long double>(i + 1);
    lam_[i] = std::pow(x, eg);
    w_[i] = std::pow(x, ed);
  }

  moments_.resize(checkpoints_.size());
  std::array<std::array<long double, kMaxPower + 1>, 2> run{};
  std::size_t c = checkpoints_.size();
  // Walk from the last mode inward so each suffix sum adds small terms first.
  for (std::size_t i = p + 1; i-- > 0;) {
    if (i < p) {
      long double pw = 1.0L;
      for (int k = 0; k <= kMaxPower; ++k) {
        run[0][k] += pw;
        run[1][k] += w_[i] * pw;
        pw *= lam_[i];
      }
    }
    while (c > 0 && checkpoints_[c - 1] == i) moments_[--c] = run;
  }
}

long double PowerLawSeries::plain(bool weighted, int q) const {
  return moments_.front()[weighted ? 1 : 0][q];
}

std::size_t PowerLawSeries::head_length(long double kappa) const {
  // smallest checkpoint M with lambda_{M+1} <= kappa/4 (0-based lam_[M])
  const long double bound = kappa * kTailRatio;
  auto it = std::partition_point(
      checkpoints_.begin(), checkpoints_.end(), [&](std::size_t m) {
        return m < lam_.size() && lam_[m] > bound;
      });
  return it == checkpoints_.end() ? lam_.size() : *it;
}

void PowerLawSeries::accumulate_head(const SeriesTerm* terms, std::size_t k,
                                     std::size_t head, long double kappa,
                                     long double* out) const {
  for (std::size_t i = head; i-- > 0;) {
    const long double l = lam_[i];
    const long double inv = 1.0L / (l + kappa);
    const long double pw[4] = {1.0L, l, l * l, l * l * l};
    const long double ib[3] = {1.0L, inv, inv * inv};
    for (std::size_t j = 0; j < k; ++j) {
      const SeriesTerm& t = terms[j];
      long double v = pw[t.q] * ib[t.b];
      if (t.weighted) v *= w_[i];
      out[j] += v;
    }
  }
}

long double PowerLawSeries::tail(SeriesTerm t, std::size_t head,
                                 long double kappa) const {
  if (head >= lam_.size()) return 0.0L;
  auto it = std::lower_bound(checkpoints_.begin(), checkpoints_.end(), head);
  const auto& mom = moments_[static_cast<std::size_t>(it - checkpoints_.begin())]
                            [t.weighted ? 1 : 0];
  if (t.b == 0) return mom[t.q];
  // (lambda + kappa)^{-b} = kappa^{-b} sum_j c_j (-lambda/kappa)^j
  const long double inv_k = 1.0L / kappa;
  std::array<long double, kTailOrder + 1> x;
  long double p = 1.0L;
  for (int j = 0; j <= kTailOrder; ++j) {
    const long double c = (t.b == 1) ? 1.0L : static_cast<long double>(j + 1);
    x[j] = ((j % 2 == 0) ? c : -c) * mom[t.q + j] * p;
    p *= inv_k;
  }
  long double acc = 0.0L;
  for (int j = kTailOrder; j >= 0; --j) acc += x[j];
  return t.b == 1 ? acc * inv_k : acc * inv_k * inv_k;
}

long double PowerLawSeries::direct(SeriesTerm t, long double kappa) const {
  long double acc = 0.0L;
  accumulate_head(&t, 1, lam_.size(), kappa, &acc);
  return acc;
}

}  // namespace moscale::detail
