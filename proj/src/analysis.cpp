#include "betareg/analysis.hpp"

#include "betareg/csv.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

namespace betareg {

namespace {

// Largest singular value of W^{1/2} M W^{-1/2}, through the symmetric
// eigenproblem of its Gram matrix.
double weighted_operator_norm(const Matrix& m, const Vector& sqrt_w, const Vector& inv_sqrt_w) {
  const Matrix scaled = sqrt_w.asDiagonal() * m * inv_sqrt_w.asDiagonal();
  const Matrix gram = scaled.transpose() * scaled;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(gram, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, eig.eigenvalues().maxCoeff()));
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << v;
  return os.str();
}

}  // namespace

KernelSet::KernelSet(const RegularizedOperators& ops) : ops_(&ops) {
  if (!(ops.abscissa() < 0.0)) throw Error("unstable A_beta: constants undefined");
  decay_rate_ = -ops.abscissa();
  c_abeta_inv_ = ops.solve_A_beta_left(ops.C());
  i0_bd_ = ops.I0() * ops.plant().b_d();

  const ModalDecomposition modes = modal_decomposition(ops.A_beta());
  radius_ = modes.values.cwiseAbs().maxCoeff();
  modal_ = modes.usable();
  if (!modal_) return;

  using cd = std::complex<double>;
  vectors_ = modes.vectors;
  inverse_ = modes.inverse;
  values_ = modes.values;
  const double beta = ops.beta();
  k_left_ = -(1.0 / beta) * (c_abeta_inv_.cast<cd>() * vectors_);
  k_right_ = inverse_ * ops.B().cast<cd>();
  kd_left_ = -(c_abeta_inv_.cast<cd>() * vectors_);
  kd_right_ = inverse_ * i0_bd_.cast<cd>();
  h_left_ = -(ops.C().cast<cd>() * vectors_);
  i0_right_ = inverse_ * ops.I0().cast<cd>();
}

KernelSample KernelSet::sample(double t) const {
  const auto& space = ops_->plant().space();
  const Vector sqrt_w = space.weights().cwiseSqrt();
  const Vector inv_sqrt_w = sqrt_w.cwiseInverse();
  KernelSample s;
  if (modal_) {
    const ComplexVector e = (values_ * t).array().exp().matrix();
    s.K = (k_left_.transpose().array() * e.array() * k_right_.array()).sum().real();
    s.K_d = (kd_left_.transpose().array() * e.array() * kd_right_.array()).sum().real();
    const ComplexRowVector h_scaled = h_left_.cwiseProduct(e.transpose());
    s.H = space.dual_norm((h_scaled * i0_right_).real());
    s.semigroup_B = space.norm((vectors_ * e.cwiseProduct(k_right_)).real());
    s.semigroup_I0_bd = space.norm((vectors_ * e.cwiseProduct(kd_right_)).real());
    const ComplexMatrix ve = vectors_ * e.asDiagonal();
    s.semigroup_I0 = weighted_operator_norm((ve * i0_right_).real(), sqrt_w, inv_sqrt_w);
    s.semigroup = weighted_operator_norm((ve * inverse_).real(), sqrt_w, inv_sqrt_w);
    return s;
  }
  const Matrix E = expm(ops_->A_beta() * t);
  const Vector EB = E * ops_->B();
  const Matrix EI0 = E * ops_->I0();
  s.K = -(1.0 / ops_->beta()) * c_abeta_inv_.dot(EB);
  s.K_d = -c_abeta_inv_.dot(E * i0_bd_);
  s.H = space.dual_norm(-(ops_->C() * EI0));
  s.semigroup_B = space.norm(EB);
  s.semigroup_I0_bd = space.norm(E * i0_bd_);
  s.semigroup_I0 = weighted_operator_norm(EI0, sqrt_w, inv_sqrt_w);
  s.semigroup = weighted_operator_norm(E, sqrt_w, inv_sqrt_w);
  return s;
}

ErrorConstants compute_constants(const RegularizedOperators& ops, double epsilon, const QuadratureOptions& opts) {
  if (opts.subintervals < 2 || opts.subintervals % 2 != 0) throw Error("Simpson subintervals must be even and >= 2");
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) throw Error("Lipschitz bound must be finite and nonnegative");
  const KernelSet kernels(ops);
  const double omega = kernels.decay_rate();
  const double slow = 1.0 / omega;
  const double fast = std::min(slow, 1.0 / kernels.spectral_radius());

  constexpr int kIntegrands = 6;
  auto values = [](const KernelSample& s) {
    return std::array<double, kIntegrands>{std::abs(s.K), std::abs(s.K_d), s.H,
                                           s.semigroup_B, s.semigroup_I0, s.semigroup_I0_bd};
  };

  std::array<double, kIntegrands> integral{};
  std::array<double, kIntegrands> peak{};  // sampled sup of g(t) e^{omega t}
  double m_beta = 0.0;
  std::size_t nodes = 0;

  auto observe = [&](double t, const KernelSample& s) {
    const auto g = values(s);
    const double growth = std::exp(omega * t);
    for (int i = 0; i < kIntegrands; ++i) peak[i] = std::max(peak[i], g[i] * growth);
    m_beta = std::max(m_beta, s.semigroup * growth);
    ++nodes;
  };

  KernelSample left = kernels.sample(0.0);
  observe(0.0, left);
  double t0 = 0.0;
  std::size_t panels = 0;
  const int m = opts.subintervals;
  const double t_cap = 2000.0 * slow;
  double max_tail = 0.0;

  while (true) {
    // graded panels resolve the fast initial decay, then uniform panels
    const double width = (t0 < fast) ? fast : std::min(slow, std::max(fast, t0));
    const double t1 = t0 + width;
    const double h = width / m;
    std::array<double, kIntegrands> acc{};
    auto add = [&](const KernelSample& s, double weight) {
      const auto g = values(s);
      for (int i = 0; i < kIntegrands; ++i) acc[i] += weight * g[i];
    };
    add(left, 1.0);
    KernelSample right;
    for (int k = 1; k <= m; ++k) {
      const double t = (k == m) ? t1 : t0 + h * k;
      const KernelSample s = kernels.sample(t);
      observe(t, s);
      add(s, k == m ? 1.0 : (k % 2 ? 4.0 : 2.0));
      if (k == m) right = s;
    }
    for (int i = 0; i < kIntegrands; ++i) integral[i] += acc[i] * h / 3.0;
    left = right;
    t0 = t1;
    ++panels;

    if (t0 < slow) continue;
    bool done = true;
    max_tail = 0.0;
    for (int i = 0; i < kIntegrands; ++i) {
      const double tail = peak[i] * std::exp(-omega * t0) / omega;
      const double rel = integral[i] > 0.0 ? tail / integral[i] : tail;
      max_tail = std::max(max_tail, rel);
      if (rel >= opts.tail_fraction) done = false;
    }
    if (done || t0 >= t_cap) break;
  }

  ErrorConstants c;
  c.beta = ops.beta();
  c.epsilon = epsilon;
  c.D = integral[0];
  c.D_d = integral[1];
  c.ratio = c.D > 0.0 ? c.D_d / c.D : 0.0;
  c.D_H = integral[2];
  c.D_B = integral[3];
  c.D_Abeta = integral[4];
  c.D_Bd = integral[5];
  const double denom = 1.0 - epsilon * c.D_Abeta;
  if (denom > 0.0) {
    c.nl_D = c.D_H * c.D_B * epsilon / denom;
    c.nl_D_d = c.D_H * c.D_Bd * epsilon / denom;
  }
  c.M_beta = m_beta;
  c.omega_beta = omega;
  c.quadrature.truncation_time = t0;
  c.quadrature.max_tail = max_tail;
  c.quadrature.panels = panels;
  c.quadrature.nodes = nodes;
  return c;
}

void ErrorConstants::write_csv(std::ostream& os) const {
  CsvWriter csv(os, {"name", "value"});
  auto put = [&](const std::string& name, double v) { csv.row({name, format_double(v)}); };
  auto put_opt = [&](const std::string& name, const std::optional<double>& v) {
    csv.row({name, v ? format_double(*v) : std::string("undefined")});
  };
  put("beta", beta);
  put("epsilon", epsilon);
  put("D", D);
  put("D_d", D_d);
  put("D_d_over_D", ratio);
  put("D_H", D_H);
  put("D_B", D_B);
  put("D_Abeta", D_Abeta);
  put("D_Bd", D_Bd);
  put_opt("nl_D", nl_D);
  put_opt("nl_D_d", nl_D_d);
  put("M_beta", M_beta);
  put("omega_beta", omega_beta);
  put("truncation_time", quadrature.truncation_time);
  put("tail_estimate", quadrature.max_tail);
  put("quadrature_nodes", static_cast<double>(quadrature.nodes));
}

namespace {

double required_norm(const Signal& s, int k, const char* which) {
  if (s.max_order() < k) throw Error("insufficient signal smoothness");
  const auto v = s.cb_norm(k);
  if (!v) throw Error(std::string("derivative sup-norms of ") + which + " are unknown");
  return *v;
}

}  // namespace

LinearBound linear_bound(int n, const ErrorConstants& constants, const SignalPair& signals) {
  if (n < 0) throw Error("iteration index must be nonnegative");
  LinearBound out;
  out.n = n;
  const double r_norm = required_norm(signals.r, n, "r");
  const double d_norm = required_norm(signals.d, n, "d");
  const double dn = std::pow(constants.D, n);
  out.C_n = r_norm + constants.ratio * d_norm;
  out.general = dn * out.C_n;

  const auto hr = signals.r.harmonic();
  const auto hd = signals.d.harmonic();
  if (hr && hd) {
    // the offset of a harmonic carries no derivative; it only enters at n = 0
    const double r_part = n == 0 ? std::abs(hr->offset) + std::abs(hr->amplitude)
                                 : std::abs(hr->amplitude) * std::pow(hr->frequency, n);
    const double d_part = n == 0 ? std::abs(hd->offset) + std::abs(hd->amplitude)
                                 : std::abs(hd->amplitude) * std::pow(hd->frequency, n);
    out.harmonic = dn * (r_part + constants.ratio * d_part);
  }

  std::vector<double> tones = signals.r.tones();
  if (constants.ratio > 0.0) {
    const auto td = signals.d.tones();
    tones.insert(tones.end(), td.begin(), td.end());
  }
  if (!tones.empty()) out.alpha_D = *std::max_element(tones.begin(), tones.end()) * constants.D;
  return out;
}

double nonlinear_bound(NonlinearLevel level, const ErrorConstants& constants, const SignalPair& signals) {
  if (!constants.nonlinear_defined()) throw Error("nonlinear constants undefined: eps * D_Abeta >= 1");
  const double total = constants.D + *constants.nl_D;
  const double total_d = constants.D_d + *constants.nl_D_d;
  if (level == NonlinearLevel::e0) {
    return total * required_norm(signals.r, 1, "r") + total_d * required_norm(signals.d, 1, "d");
  }
  const double r2 = required_norm(signals.r, 2, "r");
  const double d2 = required_norm(signals.d, 2, "d");
  return total * total * (r2 + (total > 0.0 ? total_d / total : 0.0) * d2);
}

double limsup_estimate(std::span<const double> trace, double dt, double decay_rate) {
  if (trace.size() < 2) throw Error("horizon too short");
  const double horizon = dt * static_cast<double>(trace.size() - 1);
  if (!(decay_rate > 0.0) || horizon < 10.0 / decay_rate * (1.0 - 1e-12)) throw Error("horizon too short");
  const std::size_t last = trace.size() - 1;
  const auto start = static_cast<std::size_t>(std::ceil(0.8 * static_cast<double>(last) - 1e-9));
  double sup = 0.0;
  for (std::size_t k = start; k <= last; ++k) sup = std::max(sup, std::abs(trace[k]));
  return sup;
}

std::vector<double> tail_sups(const IterationStack& stack, double decay_rate) {
  std::vector<double> out;
  for (const auto& rec : stack.records) out.push_back(limsup_estimate(rec.error, stack.dt(), decay_rate));
  return out;
}

namespace {

BoundVerdict make_verdict(int n, std::string formula, double bound, double measured) {
  BoundVerdict v;
  v.n = n;
  v.formula = std::move(formula);
  v.bound = bound;
  v.measured = measured;
  v.pass = std::isfinite(measured) && measured <= bound * (1.0 + kVerdictSlack);
  return v;
}

}  // namespace

std::vector<BoundVerdict> linear_verdicts(const IterationStack& stack, const ErrorConstants& constants) {
  std::vector<BoundVerdict> out;
  for (const auto& rec : stack.records) {
    const LinearBound lb = linear_bound(rec.index, constants, stack.signals);
    const double measured = limsup_estimate(rec.error, stack.dt(), constants.omega_beta);
    BoundVerdict v = make_verdict(rec.index, "linear-Cn", lb.general, measured);
    v.harmonic_bound = lb.harmonic;
    if (lb.non_informative()) v.note = "bound non-informative, divergence expected";
    out.push_back(std::move(v));
  }
  return out;
}

std::vector<BoundVerdict> nonlinear_verdicts(const IterationStack& stack, const ErrorConstants& constants) {
  std::vector<BoundVerdict> out;
  const NonlinearLevel levels[] = {NonlinearLevel::e0, NonlinearLevel::e1};
  const char* names[] = {"nonlinear-e0", "nonlinear-e1"};
  for (int j = 0; j < 2 && j < stack.levels(); ++j) {
    const double measured = limsup_estimate(stack.records[j].error, stack.dt(), constants.omega_beta);
    if (!constants.nonlinear_defined()) {
      BoundVerdict v = make_verdict(j, names[j], std::numeric_limits<double>::infinity(), measured);
      v.pass = false;
      v.note = "undefined: eps * D_Abeta >= 1";
      out.push_back(std::move(v));
      continue;
    }
    out.push_back(make_verdict(j, names[j], nonlinear_bound(levels[j], constants, stack.signals), measured));
  }
  return out;
}

std::vector<BoundVerdict> verdict_suite(const IterationStack& stack, const ErrorConstants& constants) {
  std::vector<BoundVerdict> out =
      stack.ops.plant().is_linear() ? linear_verdicts(stack, constants) : nonlinear_verdicts(stack, constants);
  if (stack.failure) {
    BoundVerdict v;
    v.n = stack.failure->index;
    v.formula = "diverged";
    v.bound = std::numeric_limits<double>::quiet_NaN();
    v.measured = std::numeric_limits<double>::infinity();
    v.pass = false;
    v.note = "blow-up at t = " + fmt(stack.failure->time);
    out.push_back(std::move(v));
  }
  return out;
}

bool all_pass(const std::vector<BoundVerdict>& verdicts) {
  return std::all_of(verdicts.begin(), verdicts.end(), [](const BoundVerdict& v) { return v.pass; });
}

void write_verdicts_csv(std::ostream& os, const std::vector<BoundVerdict>& verdicts) {
  CsvWriter csv(os, {"n", "formula", "bound", "harmonic_bound", "measured", "verdict", "note"});
  for (const auto& v : verdicts) {
    csv.row({std::to_string(v.n), v.formula, format_double(v.bound),
             v.harmonic_bound ? format_double(*v.harmonic_bound) : std::string(), format_double(v.measured),
             v.pass ? "pass" : "fail", v.note});
  }
}

void write_report(std::ostream& os, const ErrorConstants& c, const std::vector<BoundVerdict>& verdicts) {
  os << "constants (beta = " << fmt(c.beta) << ", eps = " << fmt(c.epsilon) << ")\n";
  os << "  D = " << fmt(c.D) << "  D_d = " << fmt(c.D_d) << "  D_d/D = " << fmt(c.ratio) << '\n';
  os << "  D_H = " << fmt(c.D_H) << "  D_B = " << fmt(c.D_B) << "  D_Abeta = " << fmt(c.D_Abeta)
     << "  D_Bd = " << fmt(c.D_Bd) << '\n';
  if (c.nonlinear_defined()) {
    os << "  nl_D = " << fmt(*c.nl_D) << "  nl_D_d = " << fmt(*c.nl_D_d) << '\n';
  } else {
    os << "  nl_D, nl_D_d undefined (eps * D_Abeta >= 1)\n";
  }
  os << "  M_beta = " << fmt(c.M_beta) << "  omega_beta = " << fmt(c.omega_beta) << "  T* = "
     << fmt(c.quadrature.truncation_time) << '\n';
  os << "verdicts\n";
  os << "  " << std::left << std::setw(4) << "n" << std::setw(15) << "formula" << std::setw(14) << "bound"
     << std::setw(14) << "measured" << "verdict\n";
  for (const auto& v : verdicts) {
    os << "  " << std::left << std::setw(4) << v.n << std::setw(15) << v.formula << std::setw(14) << fmt(v.bound)
       << std::setw(14) << fmt(v.measured) << (v.pass ? "pass" : "FAIL");
    if (!v.note.empty()) os << "  (" << v.note << ')';
    os << '\n';
  }
  os << std::right;
}

}  // namespace betareg
