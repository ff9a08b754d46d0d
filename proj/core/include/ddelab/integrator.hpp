#pragma once

#include "ddelab/history.hpp"
#include "ddelab/piecewise.hpp"
#include "ddelab/system.hpp"

#include <nlohmann/json.hpp>

#include <memory>
#include <optional>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

namespace ddelab {

class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, double t) : std::runtime_error(what), time(t) {}
  double time;
};

// Right-hand side of u'(s) = -decay u(s) + G(s, u(s-1)).
class DelayForcing {
 public:
  virtual ~DelayForcing() = default;
  virtual double value(double s, double delayed, int branch) const = 0;
  virtual int branch(double delayed) const {
    (void)delayed;
    return 0;
  }
  // True when G jumps as the delayed argument crosses `switch_level()`.
  virtual bool discontinuous() const { return false; }
  virtual double switch_level() const { return 1.0; }
};

class SystemForcing final : public DelayForcing {
 public:
  explicit SystemForcing(const SystemSpec& s) : gain_(s.gain), feedback_(s.feedback) {}
  double value(double, double delayed, int br) const override {
    return gain_ * feedback_.value_on_branch(delayed, br);
  }
  int branch(double delayed) const override { return feedback_.branch(delayed); }
  bool discontinuous() const override { return feedback_.discontinuous(); }

 private:
  double gain_;
  Feedback feedback_;
};

struct IntegratorOptions {
  int steps_per_delay = 200;     // N, step h = 1/N
  bool refine = true;            // adaptive dense-output subdivision
  double dense_tol = 1e-10;      // midpoint consistency tolerance (relative to max(1,|u|))
  int max_refine_depth = 12;
  double quad_tol = 1e-14;       // absolute quadrature tolerance per unit length and scale
  double level = 1.0;            // level whose crossings are logged
};

enum class EventKind { LevelUp, LevelDown, ForcingBreak, Graze };

struct Event {
  double t;
  EventKind kind;
};

std::string to_string(EventKind k);

class Trajectory {
 public:
  Trajectory() = default;

  const PiecewiseFunction& function() const { return fn_; }
  const std::optional<SystemSpec>& system() const { return system_; }
  const HistoryFunction& history() const { return history_; }
  double decay() const { return decay_; }
  int steps_per_delay() const { return steps_; }
  double t_end() const { return fn_.empty() ? 0.0 : fn_.t_end(); }
  double t_begin() const { return -1.0; }

  double value(double t) const;
  double operator()(double t) const { return value(t); }
  double slope(double t) const { return fn_.slope(t); }
  double delayed(double t) const { return value(t - 1.0); }

  const std::vector<Event>& events() const { return events_; }
  // Times where the derivative jumps (forcing breaks).
  std::vector<double> derivative_breaks() const;
  std::vector<Crossing> crossings(double level, double a, double b) const {
    return fn_.crossings(level, a, b);
  }
  double max_on(double a, double b) const { return fn_.max_on(a, b); }
  double min_on(double a, double b) const { return fn_.min_on(a, b); }

  nlohmann::json events_json() const;
  // Rows t, x(t), x(t-1), derivative-flag on the step grid (every `stride` steps) plus breaks.
  std::string to_csv(int stride = 1) const;

 private:
  friend class Integrator;
  PiecewiseFunction fn_;
  std::optional<SystemSpec> system_;
  HistoryFunction history_;
  double decay_ = 1.0;
  int steps_ = 200;
  std::vector<Event> events_;
};

// Method of steps with an integrating factor: on each step the forced part
// b * int exp(-a(t-s)) G(s) ds is computed by Gauss-Kronrod quadrature split at
// every delayed joint, and the dense output is a Hermite cubic of that part on
// top of the exact exponential. Resumable through advance_to.
class Integrator {
 public:
  Integrator(const SystemSpec& system, const HistoryFunction& history, IntegratorOptions opt = {});
  Integrator(double decay, std::shared_ptr<const DelayForcing> forcing, const HistoryFunction& history,
             IntegratorOptions opt = {});

  void advance_to(double t_end);
  double time() const { return t_; }
  const Trajectory& trajectory() const { return traj_; }
  Trajectory take() { return std::move(traj_); }

 private:
  struct Break {
    double t;
    int order;  // 0: forcing jump, 1: derivative kink at the next lag
    bool operator>(const Break& o) const { return t > o.t; }
  };

  void init(const HistoryFunction& history);
  void step(double ta, double tb);
  void advance_piece(double alpha, double beta, double u_alpha, int depth, const double* known_end,
                     int branch);
  double forced_part(double alpha, double beta, int branch) const;
  double forcing_at(double s, int branch) const;
  void after_piece(const Piece& p);

  double decay_;
  std::shared_ptr<const DelayForcing> forcing_;
  IntegratorOptions opt_;
  Trajectory traj_;
  double t_ = 0.0;
  long step_index_ = 0;
  std::priority_queue<Break, std::vector<Break>, std::greater<Break>> breaks_;
  int level_sign_ = 0;
  double level_last_t_ = -1.0;
  int switch_sign_ = 0;
  double switch_last_t_ = -1.0;
};

Trajectory integrate(const SystemSpec& system, const HistoryFunction& history, double T,
                     const IntegratorOptions& opt = {});

// s -> traj(t + s) on [-1, 0].
HistoryFunction segment_at(const Trajectory& traj, double t);

struct BoundsReport {
  double max_value = 0.0;
  double min_value = 0.0;
  double lipschitz = 0.0;  // sup |x'| over [1, T]
  double band_upper = 0.0;
  double lipschitz_bound = 0.0;
  bool start_in_band = true;
  bool in_band = true;
  bool lipschitz_ok = true;
};

BoundsReport check_bounds(const Trajectory& traj, double tol = 1e-9);

}  // namespace ddelab
