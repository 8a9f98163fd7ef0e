#include "kcontract/dynamics.hpp"

#include <algorithm>
#include <boost/numeric/odeint.hpp>
#include <cmath>

#include "kcontract/matrix_io.hpp"

namespace odeint = boost::numeric::odeint;

namespace kcontract {

namespace {

using State = std::vector<double>;

constexpr double kVolumeFloor = 1e-300;

void check_times(const std::vector<double>& times) {
  if (times.size() < 2) throw DomainError("need at least two sample times");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!std::isfinite(times[i])) throw DomainError("sample times must be finite");
    if (i > 0 && !(times[i] > times[i - 1])) throw DomainError("sample times must be strictly increasing");
  }
}

template <class Rhs, class Observer>
void run(Rhs&& rhs, State& x, const std::vector<double>& times, const IntegrationOptions& opts, Observer&& obs) {
  try {
    if (opts.stepper == Stepper::FixedRK4) {
      if (!(opts.fixed_step > 0.0)) throw DomainError("fixed step must be positive");
      odeint::runge_kutta4<State> stepper;
      odeint::integrate_times(stepper, rhs, x, times.begin(), times.end(), opts.fixed_step, obs);
    } else {
      auto stepper = odeint::make_dense_output(opts.atol, opts.rtol, odeint::runge_kutta_dopri5<State>());
      odeint::integrate_times(stepper, rhs, x, times.begin(), times.end(), opts.initial_step, obs,
                              odeint::max_step_checker(opts.max_steps));
    }
  } catch (const odeint::step_adjustment_error& e) {
    throw IntegrationError(std::string("step-size underflow: ") + e.what());
  } catch (const odeint::no_progress_error& e) {
    throw IntegrationError(std::string("integration made no progress: ") + e.what());
  } catch (const odeint::odeint_error& e) {
    throw IntegrationError(std::string("integration failed: ") + e.what());
  }
}

Vector as_vector(const State& s, std::size_t offset, Eigen::Index n) {
  return Eigen::Map<const Vector>(s.data() + offset, n);
}

void check_finite_state(const State& s, double t) {
  for (double v : s) {
    if (!std::isfinite(v)) throw IntegrationError("non-finite state at t=" + format_double(t));
  }
}

void track_invariant_box(const SystemModel& sys, TrajectoryRecord& rec, const IntegrationOptions& opts) {
  if (!sys.invariant_box) return;
  if (!stays_inside_after_entry(rec, *sys.invariant_box, opts.invariant_slack)) {
    rec.warnings.push_back("state left the declared invariant box after entering it");
  }
}

}  // namespace

void TrajectoryRecord::validate() const {
  if (states.size() != times.size()) throw IntegrationError("states/times length mismatch");
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) throw IntegrationError("times not strictly increasing");
  }
  for (const auto& s : states) {
    if (!states.empty() && s.size() != states.front().size()) throw IntegrationError("state dimension varies");
  }
  if (!volumes.empty() && volumes.size() != times.size()) throw IntegrationError("volumes length mismatch");
  for (double v : volumes) {
    if (!(v >= 0.0)) throw IntegrationError("negative volume");
  }
}

std::vector<double> linspace(double t0, double t1, std::size_t count) {
  if (count < 2) throw DomainError("linspace needs at least two points");
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    out[i] = t0 + (t1 - t0) * static_cast<double>(i) / static_cast<double>(count - 1);
  }
  out.back() = t1;
  return out;
}

TrajectoryRecord integrate(const SystemModel& sys, const Vector& x0, const std::vector<double>& sample_times,
                           const IntegrationOptions& opts) {
  if (!sys.field) throw DomainError("system " + sys.name + " has no vector field");
  if (x0.size() != sys.dim) throw DomainError("initial state has wrong dimension");
  if (!x0.allFinite()) throw DomainError("initial state must be finite");
  check_times(sample_times);

  TrajectoryRecord rec;
  State x(x0.data(), x0.data() + x0.size());
  const auto n = static_cast<Eigen::Index>(sys.dim);
  auto rhs = [&](const State& s, State& ds, double t) {
    const Vector dx = sys.field(t, as_vector(s, 0, n));
    std::copy(dx.data(), dx.data() + n, ds.begin());
  };
  run(rhs, x, sample_times, opts, [&](const State& s, double t) {
    check_finite_state(s, t);
    rec.times.push_back(t);
    rec.states.push_back(as_vector(s, 0, n));
  });
  track_invariant_box(sys, rec, opts);
  return rec;
}

TrajectoryRecord variational_flow(const SystemModel& sys, const TrajectoryRecord& trajectory, int k,
                                  const IntegrationOptions& opts) {
  if (!sys.field || !sys.jacobian) throw DomainError("variational flow needs a field and a Jacobian");
  if (trajectory.states.empty()) throw DomainError("trajectory is empty");
  const int n = sys.dim;
  if (k < 1 || k > n) throw DomainError("compound order outside [1, n]");
  check_compound_dim(n, k);
  const auto r = static_cast<Eigen::Index>(binomial(n, k));
  const auto nn = static_cast<std::size_t>(n);
  const auto rr = static_cast<std::size_t>(r);
  check_times(trajectory.times);

  State s(nn + nn * nn + rr * rr, 0.0);
  const Vector& x0 = trajectory.states.front();
  std::copy(x0.data(), x0.data() + n, s.begin());
  for (std::size_t i = 0; i < nn; ++i) s[nn + i * nn + i] = 1.0;
  for (std::size_t i = 0; i < rr; ++i) s[nn + nn * nn + i * rr + i] = 1.0;

  auto rhs = [&](const State& y, State& dy, double t) {
    const Vector x = as_vector(y, 0, n);
    const Matrix j = sys.jacobian(t, x);
    const Matrix jk = add_compound(j, k).data;
    const Vector dx = sys.field(t, x);
    std::copy(dx.data(), dx.data() + n, dy.begin());
    Eigen::Map<const Matrix> phi(y.data() + nn, n, n);
    Eigen::Map<Matrix>(dy.data() + nn, n, n).noalias() = j * phi;
    Eigen::Map<const Matrix> psi(y.data() + nn + nn * nn, r, r);
    Eigen::Map<Matrix>(dy.data() + nn + nn * nn, r, r).noalias() = jk * psi;
  };

  TrajectoryRecord rec;
  rec.k = k;
  run(rhs, s, trajectory.times, opts, [&](const State& y, double t) {
    check_finite_state(y, t);
    rec.times.push_back(t);
    rec.states.push_back(as_vector(y, 0, n));
    rec.flow.push_back(Eigen::Map<const Matrix>(y.data() + nn, n, n));
    rec.compound_flow.push_back(Eigen::Map<const Matrix>(y.data() + nn + nn * nn, r, r));
  });
  track_invariant_box(sys, rec, opts);
  return rec;
}

double parallelotope_volume(const Parallelotope& p) {
  const Matrix& x = p.generators;
  require_finite(x, "generators");
  if (x.cols() == 0) return 1.0;
  if (x.cols() > x.rows()) return 0.0;
  return mult_compound(x, static_cast<int>(x.cols())).data.norm();
}

double gram_volume(const Parallelotope& p) {
  const Matrix& x = p.generators;
  require_finite(x, "generators");
  const double det = (x.transpose() * x).determinant();
  return std::sqrt(std::max(det, 0.0));
}

TrajectoryRecord volume_trajectory(const SystemModel& sys, const Vector& x0, const Parallelotope& x0_generators,
                                   const std::vector<double>& sample_times, const IntegrationOptions& opts) {
  const Matrix& g = x0_generators.generators;
  if (g.rows() != sys.dim || g.cols() < 1 || g.cols() > sys.dim) {
    throw DomainError("parallelotope generators must be n x k with 1 <= k <= n");
  }
  const int k = static_cast<int>(g.cols());
  TrajectoryRecord seed;
  seed.times = sample_times;
  seed.states.assign(1, x0);
  auto rec = variational_flow(sys, seed, k, opts);
  const Vector y0 = mult_compound(g, k).data.col(0);
  for (const auto& psi : rec.compound_flow) rec.volumes.push_back((psi * y0).norm());
  return rec;
}

RateFit fit_log_rate(const std::vector<double>& times, const std::vector<double>& volumes) {
  if (times.size() != volumes.size()) throw DomainError("times and volumes differ in length");
  RateFit fit;
  std::size_t n = 0;
  while (n < volumes.size() && volumes[n] >= kVolumeFloor && std::isfinite(volumes[n])) ++n;
  fit.truncated = n < volumes.size();
  if (n < 2) throw DomainError("fewer than two positive volumes to fit");
  double mt = 0.0;
  double ml = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mt += times[i];
    ml += std::log(volumes[i]);
  }
  mt /= static_cast<double>(n);
  ml /= static_cast<double>(n);
  double stt = 0.0;
  double stl = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dt = times[i] - mt;
    stt += dt * dt;
    stl += dt * (std::log(volumes[i]) - ml);
  }
  fit.rate = stl / stt;
  fit.intercept = ml - fit.rate * mt;
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = std::log(volumes[i]) - (fit.intercept + fit.rate * times[i]);
    ss += e * e;
  }
  fit.residual = std::sqrt(ss / static_cast<double>(n));
  fit.points_used = n;
  return fit;
}

RateFit volume_growth_rate(const SystemModel& sys, const Vector& x0, const Parallelotope& x0_generators,
                           double horizon, std::size_t samples, const IntegrationOptions& opts) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw DomainError("horizon must be positive and finite");
  const auto rec = volume_trajectory(sys, x0, x0_generators, linspace(0.0, horizon, samples), opts);
  return fit_log_rate(rec.times, rec.volumes);
}

std::size_t ConvergenceSummary::converged_count() const {
  return static_cast<std::size_t>(
      std::count_if(results.begin(), results.end(), [](const ConvergenceResult& r) { return r.converged; }));
}

ConvergenceSummary detect_equilibrium_convergence(const std::vector<TrajectoryRecord>& records, const VectorField& f,
                                                  double tol) {
  if (!(tol > 0.0)) throw DomainError("tolerance must be positive");
  ConvergenceSummary summary;
  for (const auto& rec : records) {
    ConvergenceResult res;
    if (rec.states.size() >= 2) {
      const Vector& xt = rec.states.back();
      res.field_norm = f(rec.times.back(), xt).norm();
      res.last_change = (xt - rec.states[rec.states.size() - 2]).norm();
      res.converged = res.field_norm <= tol && res.last_change <= tol;
      if (res.converged) {
        for (std::size_t c = 0; c < summary.equilibria.size(); ++c) {
          if ((summary.equilibria[c] - xt).norm() <= 10.0 * tol) {
            res.cluster = static_cast<int>(c);
            break;
          }
        }
        if (res.cluster < 0) {
          res.cluster = static_cast<int>(summary.equilibria.size());
          summary.equilibria.push_back(xt);
        }
      }
    }
    summary.results.push_back(res);
  }
  return summary;
}

long first_entry_index(const TrajectoryRecord& rec, const Box& box, double slack) {
  for (std::size_t i = 0; i < rec.states.size(); ++i) {
    if (box.contains(rec.states[i], slack)) return static_cast<long>(i);
  }
  return -1;
}

bool stays_inside_after_entry(const TrajectoryRecord& rec, const Box& box, double slack) {
  const long first = first_entry_index(rec, box, slack);
  if (first < 0) return true;
  for (auto i = static_cast<std::size_t>(first); i < rec.states.size(); ++i) {
    if (!box.contains(rec.states[i], slack)) return false;
  }
  return true;
}

void write_trajectory_csv(std::ostream& out, const TrajectoryRecord& rec) {
  const Eigen::Index n = rec.states.empty() ? 0 : rec.states.front().size();
  const bool vol = !rec.volumes.empty();
  out << "t";
  for (Eigen::Index j = 0; j < n; ++j) out << ",x" << j + 1;
  if (vol) out << ",vol";
  out << "\n";
  for (std::size_t i = 0; i < rec.times.size(); ++i) {
    out << format_double(rec.times[i]);
    for (Eigen::Index j = 0; j < n; ++j) out << "," << format_double(rec.states[i](j));
    if (vol) out << "," << format_double(rec.volumes[i]);
    out << "\n";
  }
}

nlohmann::json trajectory_to_json(const TrajectoryRecord& rec) {
  nlohmann::json j;
  j["times"] = rec.times;
  nlohmann::json states = nlohmann::json::array();
  for (const auto& s : rec.states) states.push_back(std::vector<double>(s.data(), s.data() + s.size()));
  j["states"] = states;
  if (!rec.volumes.empty()) j["volumes"] = rec.volumes;
  if (!rec.warnings.empty()) j["warnings"] = rec.warnings;
  return j;
}

}  // namespace kcontract
