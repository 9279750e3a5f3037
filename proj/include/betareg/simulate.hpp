#pragma once

#include "betareg/linalg.hpp"
#include "betareg/model.hpp"
#include "betareg/signals.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace betareg {

enum class Scheme {
  imex_cnab2,   ///< Crank-Nicolson on the linear part, AB2 on the rest
  imex_euler,   ///< backward Euler on the linear part, forward Euler on the rest
  dense_oracle  ///< exact exponential of the linear part, half steps
};

Scheme scheme_from_name(const std::string& name);
std::string scheme_name(Scheme s);

struct IntegratorConfig {
  double dt = 1e-3;
  Scheme scheme = Scheme::imex_cnab2;
  double horizon = 20.0;

  /// Throws unless dt > 0 and horizon >= 10 dt.
  void validate() const;
  std::size_t steps() const;
  double time(std::size_t k) const { return dt * static_cast<double>(k); }
};

/// States exceeding this norm abort an integration.
inline constexpr double kBlowUpThreshold = 1e6;

class BlowUpError : public Error {
public:
  BlowUpError(double time, double norm);
  double time() const { return time_; }

private:
  double time_;
};

/// Uniform-grid solution record; states are stored column-wise.
struct Trajectory {
  double dt = 0.0;
  Matrix states;  ///< n x (steps + 1)
  std::vector<double> outputs;
  std::vector<std::string> warnings;

  std::size_t size() const { return static_cast<std::size_t>(states.cols()); }
  double time(std::size_t k) const { return dt * static_cast<double>(k); }
  double horizon() const { return time(size() - 1); }
  Vector state(std::size_t k) const { return states.col(static_cast<Eigen::Index>(k)); }
  /// y_k = row * z_k for every node.
  void compute_outputs(const RowVector& row);
};

/// Scalar samples on a uniform grid, linearly interpolated between nodes
/// and exact at the nodes themselves.
class GridFunction {
public:
  GridFunction() = default;
  GridFunction(double dt, std::vector<double> values);

  double operator()(double t) const;
  double dt() const { return dt_; }
  const std::vector<double>& values() const { return values_; }

private:
  double dt_ = 1.0;
  std::vector<double> values_;
};

/// Same as GridFunction for vector-valued samples (columns of a matrix).
class GridVectorFunction {
public:
  GridVectorFunction(double dt, const Matrix& columns) : dt_(dt), columns_(&columns) {}
  Vector operator()(double t) const;

private:
  double dt_;
  const Matrix* columns_;
};

using ForcingFn = std::function<Vector(double t)>;
using StateMapFn = std::function<Vector(double t, const Vector& z)>;
using ScalarFn = std::function<double(double t)>;

/// Integrates dz/dt = A_lin z + forcing(t) + nl(t, z), z(0) = z0 on
/// [0, cfg.horizon]. Either callable may be empty (treated as zero).
/// The linear part is implicit (or exact for the dense oracle); forcing and
/// nonlinearity are explicit. Throws BlowUpError past kBlowUpThreshold.
Trajectory integrate_semilinear(const Matrix& a_lin, const ForcingFn& forcing, const StateMapFn& nl,
                                const Vector& z0, const IntegratorConfig& cfg);

/// dz/dt = A z + f(z) + b u(t) + b_d d(t); outputs populated.
Trajectory simulate_true_plant(const SemilinearPlant& plant, const ScalarFn& u, const ScalarFn& d, const Vector& z0,
                               const IntegratorConfig& cfg);

/// e_k = r(t_k) - y_k.
std::vector<double> error_trace(const Trajectory& traj, const ScalarFn& r);

double sup_abs(std::span<const double> values);

}  // namespace betareg
