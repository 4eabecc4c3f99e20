#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace moscale::detail {

// One summand family  w_i * lambda_i^q / (lambda_i + kappa)^b  with
// w_i = i^{-delta} when weighted, else 1.
struct SeriesTerm {
  bool weighted;
  int q;  // 0..3
  int b;  // 0..2
};

// Truncated power-law series with precomputed tail moments. Modes past a
// checkpoint M with lambda_{M+1} <= kappa/4 are summed through the expansion
// of (1 + lambda/kappa)^{-b}; the head is summed directly, smallest terms
// first, in long double.
class PowerLawSeries {
 public:
  static constexpr int kMaxQ = 3;
  static constexpr int kTailOrder = 30;
  static constexpr int kMaxPower = kMaxQ + kTailOrder;

  PowerLawSeries(double gamma, double delta, std::size_t p);

  std::size_t size() const { return lam_.size(); }
  long double eigen(std::size_t i) const { return lam_[i]; }
  long double weight(std::size_t i) const { return w_[i]; }

  // sum_i w_i lambda_i^q (no resolvent)
  long double plain(bool weighted, int q) const;

  template <std::size_t K>
  std::array<long double, K> sums(const std::array<SeriesTerm, K>& terms,
                                  long double kappa) const {
    std::array<long double, K> out{};
    std::size_t head = head_length(kappa);
    accumulate_head(terms.data(), K, head, kappa, out.data());
    for (std::size_t k = 0; k < K; ++k) out[k] += tail(terms[k], head, kappa);
    return out;
  }

  long double sum(SeriesTerm t, long double kappa) const {
    return sums<1>({t}, kappa)[0];
  }

  // Reference evaluation over every mode, no tail expansion.
  long double direct(SeriesTerm t, long double kappa) const;

 private:
  std::size_t head_length(long double kappa) const;
  void accumulate_head(const SeriesTerm* terms, std::size_t k, std::size_t head,
                       long double kappa, long double* out) const;
  long double tail(SeriesTerm t, std::size_t head, long double kappa) const;

  std::vector<long double> lam_;
  std::vector<long double> w_;
  std::vector<std::size_t> checkpoints_;
  // moments_[c][weighted][p] = sum_{i >= checkpoints_[c]} w_i lambda_i^p
  std::vector<std::array<std::array<long double, kMaxPower + 1>, 2>> moments_;
};

}  // namespace moscale::detail
