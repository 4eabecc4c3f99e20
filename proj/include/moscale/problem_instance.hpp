#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace moscale {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();
inline constexpr std::size_t kDefaultTruncation = 100000;

class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Dataset size: a positive integer, or the infinite-data marker.
class SampleSize {
 public:
  static constexpr SampleSize infinite() { return SampleSize(0, true); }
  static SampleSize of(std::uint64_t n) {
    if (n == 0) throw ParameterError("sample size must be >= 1");
    return SampleSize(n, false);
  }

  constexpr bool is_infinite() const { return infinite_; }
  std::uint64_t count() const {
    if (infinite_) throw DomainError("sample size is infinite");
    return n_;
  }
  constexpr double as_double() const {
    return infinite_ ? kInfinity : static_cast<double>(n_);
  }

  friend constexpr bool operator==(SampleSize a, SampleSize b) {
    return a.infinite_ == b.infinite_ && a.n_ == b.n_;
  }

 private:
  constexpr SampleSize(std::uint64_t n, bool inf) : n_(n), infinite_(inf) {}
  std::uint64_t n_;
  bool infinite_;
};

namespace detail {
class PowerLawSeries;
}

// Power-law instance: lambda_i = i^{-1-gamma}, E<beta_j, v_i>^2 = i^{-delta},
// E<beta_1, v_i><beta_2, v_i> = rho * i^{-delta}, truncated at p_trunc modes.
class PowerLawProblem {
 public:
  double gamma() const { return gamma_; }
  double delta() const { return delta_; }
  double rho() const { return rho_; }
  std::size_t p_trunc() const { return p_trunc_; }
  double nu() const;
  double nu_prime() const;

  // Same exponents and correlation at a different truncation.
  PowerLawProblem with_truncation(std::size_t p) const;
  PowerLawProblem with_rho(double rho) const;

  // Built on first use and shared between copies.
  const detail::PowerLawSeries& series() const;

  std::map<std::string, std::string> to_config() const;
  static PowerLawProblem from_config(const std::map<std::string, std::string>& kv);

 private:
  friend PowerLawProblem make_power_law(double, double, double, std::size_t);
  struct Lazy;
  PowerLawProblem(double g, double d, double r, std::size_t p);

  double gamma_;
  double delta_;
  double rho_;
  std::size_t p_trunc_;
  std::shared_ptr<Lazy> lazy_;
};

PowerLawProblem make_power_law(double gamma, double delta, double rho,
                               std::size_t p_trunc = kDefaultTruncation);

// Diagonal instance described by per-mode moments:
//   a_i = E<beta_1, v_i>^2, d_i = E<beta_1 - beta_2, v_i>^2,
//   m_i = E<beta_1 - beta_2, v_i><beta_1, v_i>.
struct ExplicitInstance {
  std::vector<double> eigenvalues;
  std::vector<double> a;
  std::vector<double> d;
  std::vector<double> m;

  std::size_t size() const { return eigenvalues.size(); }
  void validate() const;
};

// Expected moments of the power-law model at its truncation.
ExplicitInstance expected_instance(const PowerLawProblem& problem);

// Moments with the roles of beta_1 and beta_2 exchanged.
ExplicitInstance swap_objectives(const ExplicitInstance& inst);

struct RidgeConfig {
  SampleSize n = SampleSize::infinite();
  double alpha = 1.0;
  double lambda = 0.0;

  void validate() const;
};

struct SeriesValue {
  double value;
  double tail_bound;  // integral bound on the omitted modes past p_trunc
};

SeriesValue lstar(const PowerLawProblem& problem);

// sum_{i=1}^{P} i^{-a_exp} / (i^{-1-gamma} + kappa)^{b_pow}
double resolvent_sum(const PowerLawProblem& problem, double a_exp, int b_pow,
                     double kappa);

// The eight sums whose growth in kappa is characterised in closed form.
enum class NamedSum {
  AlignSq,      // a = delta + 1 + gamma,     b = 2
  AlignCubeSq,  // a = delta + 3(1 + gamma),  b = 2
  AlignQuadLin, // a = delta + 2 + 2 gamma,   b = 1
  AlignQuadSq,  // a = delta + 2 + 2 gamma,   b = 2
  AlignLin,     // a = delta + 1 + gamma,     b = 1
  DofSq,        // a = 2 + 2 gamma,           b = 2
  DofLin,       // a = 1 + gamma,             b = 1
  SpectrumSq,   // a = 1 + gamma,             b = 2
};

inline constexpr NamedSum kAllNamedSums[] = {
    NamedSum::AlignSq,     NamedSum::AlignCubeSq, NamedSum::AlignQuadLin,
    NamedSum::AlignQuadSq, NamedSum::AlignLin,    NamedSum::DofSq,
    NamedSum::DofLin,      NamedSum::SpectrumSq};

struct SumShape {
  double a_exp;
  int b_pow;
};

SumShape named_sum_shape(const PowerLawProblem& problem, NamedSum which);
double named_sum(const PowerLawProblem& problem, NamedSum which, double kappa);
// Growth rate in kappa with unit constant.
double named_sum_theta(const PowerLawProblem& problem, NamedSum which,
                       double kappa);
const char* to_string(NamedSum which);

}  // namespace moscale
