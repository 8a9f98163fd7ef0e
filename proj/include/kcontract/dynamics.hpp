#pragma once

#include <json.hpp>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "kcontract/system_model.hpp"

namespace kcontract {

class IntegrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Stepper { AdaptiveDopri5, FixedRK4 };

struct IntegrationOptions {
  double rtol = 1e-10;
  double atol = 1e-10;
  double initial_step = 1e-3;
  Stepper stepper = Stepper::AdaptiveDopri5;
  double fixed_step = 1e-3;  // RK4 only
  std::size_t max_steps = 10'000'000;
  double invariant_slack = 1e-9;
};

struct TrajectoryRecord {
  std::vector<double> times;
  std::vector<Vector> states;
  std::vector<Matrix> flow;           // Phi(t_i)
  std::vector<Matrix> compound_flow;  // Psi(t_i), d/dt Psi = J^[k] Psi
  std::vector<double> volumes;
  int k = 0;
  std::vector<std::string> warnings;

  std::size_t size() const { return times.size(); }
  void validate() const;
};

/// count equally spaced times from t0 to t1 inclusive.
std::vector<double> linspace(double t0, double t1, std::size_t count);

/// Adaptive RK 4(5) with dense output at the requested (increasing) times;
/// sample_times.front() is the initial time. Leaving sys.invariant_box after
/// having been inside it adds a warning.
TrajectoryRecord integrate(const SystemModel& sys, const Vector& x0, const std::vector<double>& sample_times,
                           const IntegrationOptions& opts = {});

/// Re-integrates the trajectory's initial state together with
/// Phi' = J Phi, Phi(0) = I and Psi' = J^[k] Psi, Psi(0) = I_r.
TrajectoryRecord variational_flow(const SystemModel& sys, const TrajectoryRecord& trajectory, int k,
                                  const IntegrationOptions& opts = {});

struct Parallelotope {
  Matrix generators;  // n x k, columns x^1..x^k
};

/// |X^(k)|_2.
double parallelotope_volume(const Parallelotope& p);
/// sqrt(det(X^T X)), clamped at zero.
double gram_volume(const Parallelotope& p);

/// Volumes |Psi(t) X0^(k)|_2 of the image of X0 under the variational flow
/// along the trajectory from x0.
TrajectoryRecord volume_trajectory(const SystemModel& sys, const Vector& x0, const Parallelotope& x0_generators,
                                   const std::vector<double>& sample_times, const IntegrationOptions& opts = {});

struct RateFit {
  double rate = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // RMS of log-volume residuals
  std::size_t points_used = 0;
  bool truncated = false;  // series cut at the first volume below 1e-300
};

/// Least-squares slope of log(v) against t.
RateFit fit_log_rate(const std::vector<double>& times, const std::vector<double>& volumes);

RateFit volume_growth_rate(const SystemModel& sys, const Vector& x0, const Parallelotope& x0_generators,
                           double horizon, std::size_t samples = 201, const IntegrationOptions& opts = {});

struct ConvergenceResult {
  bool converged = false;
  double field_norm = 0.0;   // |f(T, x(T))|_2
  double last_change = 0.0;  // |x(T) - x(T - dt)|_2, dt the last output spacing
  int cluster = -1;          // index into equilibria when converged
};

struct ConvergenceSummary {
  std::vector<ConvergenceResult> results;
  std::vector<Vector> equilibria;  // one representative per cluster

  std::size_t converged_count() const;
  bool all_converged() const { return converged_count() == results.size(); }
  bool none_converged() const { return converged_count() == 0; }
};

/// Converged when both |f| and the last step change are <= tol. Final states
/// farther apart than 10 tol are distinct equilibria.
ConvergenceSummary detect_equilibrium_convergence(const std::vector<TrajectoryRecord>& records, const VectorField& f,
                                                  double tol = 1e-6);

/// First output index inside the box, or -1.
long first_entry_index(const TrajectoryRecord& rec, const Box& box, double slack = 1e-9);
/// True when no output state after the first entry lies outside the box.
bool stays_inside_after_entry(const TrajectoryRecord& rec, const Box& box, double slack = 1e-9);

/// Header t,x1..xn[,vol].
void write_trajectory_csv(std::ostream& out, const TrajectoryRecord& rec);
nlohmann::json trajectory_to_json(const TrajectoryRecord& rec);

}  // namespace kcontract
