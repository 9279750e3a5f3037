#pragma once

#include "betareg/iterctl.hpp"
#include "betareg/regop.hpp"
#include "betareg/signals.hpp"

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace betareg {

/// Kernel and semigroup norms at one time instant.
struct KernelSample {
  double K = 0.0;                 ///< -(1/beta) C A_beta^{-1} e^{A_beta t} B
  double K_d = 0.0;               ///< -C A_beta^{-1} e^{A_beta t} I0 b_d
  double H = 0.0;                 ///< dual norm of -C e^{A_beta t} I0
  double semigroup_B = 0.0;       ///< |e^{A_beta t} B|
  double semigroup_I0 = 0.0;      ///< |e^{A_beta t} I0| (operator norm)
  double semigroup_I0_bd = 0.0;   ///< |e^{A_beta t} I0 b_d|
  double semigroup = 0.0;         ///< |e^{A_beta t}| (operator norm)
};

/// Evaluates the error kernels through the eigenbasis of A_beta when it is
/// well conditioned, otherwise through a dense exponential per instant.
class KernelSet {
public:
  /// Throws when A_beta is not exponentially stable.
  explicit KernelSet(const RegularizedOperators& ops);

  KernelSample sample(double t) const;
  double K(double t) const { return sample(t).K; }
  double K_d(double t) const { return sample(t).K_d; }
  double H(double t) const { return sample(t).H; }

  bool modal() const { return modal_; }
  /// -abscissa(A_beta)
  double decay_rate() const { return decay_rate_; }
  /// Largest eigenvalue modulus of A_beta; sets the fastest time scale.
  double spectral_radius() const { return radius_; }

private:
  const RegularizedOperators* ops_;
  bool modal_ = false;
  double decay_rate_ = 0.0;
  double radius_ = 0.0;
  ComplexMatrix vectors_;
  ComplexVector values_;
  ComplexRowVector k_left_;
  ComplexVector k_right_;
  ComplexRowVector kd_left_;
  ComplexVector kd_right_;
  ComplexRowVector h_left_;
  ComplexMatrix i0_right_;
  ComplexMatrix inverse_;
  RowVector c_abeta_inv_;
  Vector i0_bd_;
};

struct QuadratureOptions {
  int subintervals = 32;       ///< Simpson subintervals per panel (even)
  double tail_fraction = 1e-8; ///< stop once every tail bound is below this share
};

struct QuadratureInfo {
  double truncation_time = 0.0;
  double max_tail = 0.0;       ///< largest tail bound relative to its integral
  std::size_t panels = 0;
  std::size_t nodes = 0;
};

/// Integrals of the kernel norms over [0, inf) plus the nonlinear
/// correction constants built from them.
struct ErrorConstants {
  double beta = 0.0;
  double epsilon = 0.0;
  double D = 0.0;
  double D_d = 0.0;
  double ratio = 0.0;     ///< D_d / D
  double D_H = 0.0;
  double D_B = 0.0;
  double D_Abeta = 0.0;
  double D_Bd = 0.0;
  /// D_H D_B eps / (1 - eps D_Abeta); unset when eps D_Abeta >= 1.
  std::optional<double> nl_D;
  /// D_H D_Bd eps / (1 - eps D_Abeta); unset when eps D_Abeta >= 1.
  std::optional<double> nl_D_d;
  double M_beta = 1.0;
  double omega_beta = 0.0;
  QuadratureInfo quadrature;

  bool nonlinear_defined() const { return nl_D.has_value(); }
  void write_csv(std::ostream& os) const;
};

ErrorConstants compute_constants(const RegularizedOperators& ops, double epsilon, const QuadratureOptions& opts = {});

/// Linear error bound D^n C_n, with C_n = max_j sup|r^(j)| + (D_d/D) max_j sup|d^(j)|,
/// and its harmonic specialization D^n (|A_r| a_r^n + |A_d| (D_d/D) a_d^n).
struct LinearBound {
  int n = 0;
  double C_n = 0.0;
  double general = 0.0;
  std::optional<double> harmonic;
  /// Largest tone frequency times D, when the tones are known.
  std::optional<double> alpha_D;
  bool non_informative() const { return alpha_D && *alpha_D >= 1.0; }
};

LinearBound linear_bound(int n, const ErrorConstants& constants, const SignalPair& signals);

enum class NonlinearLevel { e0, e1 };

/// e0: (D + nlD)|r|_1 + (D_d + nlD_d)|d|_1
/// e1: (D + nlD)^2 [ |r|_2 + (D_d + nlD_d)/(D + nlD) |d|_2 ]
double nonlinear_bound(NonlinearLevel level, const ErrorConstants& constants, const SignalPair& signals);

/// sup |trace| over the final 20% of the horizon.
double limsup_estimate(std::span<const double> trace, double dt, double decay_rate);

inline constexpr double kVerdictSlack = 0.05;

struct BoundVerdict {
  int n = 0;
  std::string formula;
  double bound = 0.0;
  double measured = 0.0;
  bool pass = false;
  std::string note;
  /// Harmonic specialization of a linear bound, reported alongside.
  std::optional<double> harmonic_bound;
};

/// One row per completed level n with the D^n C_n bound.
std::vector<BoundVerdict> linear_verdicts(const IterationStack& stack, const ErrorConstants& constants);
/// Rows for e_0 and e_1 against the nonlinear bounds.
std::vector<BoundVerdict> nonlinear_verdicts(const IterationStack& stack, const ErrorConstants& constants);
/// Linear rows for linear plants, nonlinear rows otherwise, plus a
/// "diverged" row when the iteration or the closed loop blew up.
std::vector<BoundVerdict> verdict_suite(const IterationStack& stack, const ErrorConstants& constants);
bool all_pass(const std::vector<BoundVerdict>& verdicts);

/// Measured limsup of e_0 .. e_n for every completed record.
std::vector<double> tail_sups(const IterationStack& stack, double decay_rate);

void write_verdicts_csv(std::ostream& os, const std::vector<BoundVerdict>& verdicts);
void write_report(std::ostream& os, const ErrorConstants& constants, const std::vector<BoundVerdict>& verdicts);

}  // namespace betareg
