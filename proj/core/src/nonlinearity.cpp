#include "ddelab/nonlinearity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace ddelab {

namespace {

// Internal evaluations may see round-off negatives near zero; treat them as zero.
double clamp_domain(double xi) {
  if (xi >= 0.0) return xi;
  if (xi > -1e-9) return 0.0;
  throw std::domain_error("feedback evaluated at negative argument " + std::to_string(xi));
}

double power_derivative(double xi, double k) {
  if (xi == 0.0) {
    if (k > 1.0) return 0.0;
    if (k == 1.0) return 1.0;
    return std::numeric_limits<double>::infinity();
  }
  return k * std::pow(xi, k - 1.0);
}

double hill_value(double xi, double k, int n) {
  if (xi == 0.0) return 0.0;
  if (xi <= 1.0) return std::pow(xi, k) / (1.0 + std::pow(xi, n));
  double r = std::pow(xi, -n);
  return std::pow(xi, k) * r / (1.0 + r);
}

double hill_derivative(double xi, double k, int n) {
  if (xi == 0.0) return power_derivative(0.0, k);
  const double pk1 = std::pow(xi, k - 1.0);
  if (xi <= 1.0) {
    double p = std::pow(xi, n);
    return pk1 * (k + (k - n) * p) / ((1.0 + p) * (1.0 + p));
  }
  double r = std::pow(xi, -n);
  return pk1 * (k * r * r + (k - n) * r) / ((1.0 + r) * (1.0 + r));
}

}  // namespace

Feedback Feedback::power_cutoff(double k) {
  if (!(k > 0.0) || !std::isfinite(k)) throw std::invalid_argument("power-cutoff exponent must be positive");
  return Feedback(FeedbackKind::PowerCutoff, k, 0);
}

Feedback Feedback::hill(double k, int n) {
  if (!(k > 0.0) || !std::isfinite(k)) throw std::invalid_argument("hill exponent k must be positive");
  if (n < 1) throw std::invalid_argument("hill order n must be a positive integer");
  if (!(n > k)) throw std::invalid_argument("hill order n must exceed k");
  return Feedback(FeedbackKind::Hill, k, n);
}

double Feedback::value(double xi) const {
  if (xi < 0.0) throw std::domain_error("feedback evaluated at negative argument");
  return value_on_branch(xi, branch(xi));
}

double Feedback::derivative(double xi) const {
  if (xi < 0.0) throw std::domain_error("feedback derivative at negative argument");
  return derivative_on_branch(xi, branch(xi));
}

int Feedback::branch(double xi) const {
  if (kind_ == FeedbackKind::PowerCutoff) return xi <= 1.0 ? 0 : 1;
  return 0;
}

double Feedback::value_on_branch(double xi, int br) const {
  xi = clamp_domain(xi);
  if (kind_ == FeedbackKind::PowerCutoff) return br == 0 ? std::pow(xi, k_) : 0.0;
  return hill_value(xi, k_, n_);
}

double Feedback::derivative_on_branch(double xi, int br) const {
  xi = clamp_domain(xi);
  if (kind_ == FeedbackKind::PowerCutoff) return br == 0 ? power_derivative(xi, k_) : 0.0;
  return hill_derivative(xi, k_, n_);
}

std::string Feedback::describe() const {
  std::ostringstream os;
  if (kind_ == FeedbackKind::PowerCutoff) {
    os << "power-cutoff(k=" << k_ << ")";
  } else {
    os << "hill(k=" << k_ << ", n=" << n_ << ")";
  }
  return os.str();
}

nlohmann::json Feedback::to_json() const {
  if (kind_ == FeedbackKind::PowerCutoff) return {{"kind", "power-cutoff"}, {"k", k_}};
  return {{"kind", "hill"}, {"k", k_}, {"n", n_}};
}

Feedback Feedback::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("nonlinearity must be an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (it.key() != "kind" && it.key() != "k" && it.key() != "n")
      throw std::invalid_argument("unknown nonlinearity field '" + it.key() + "'");
  }
  if (!j.contains("kind") || !j["kind"].is_string())
    throw std::invalid_argument("nonlinearity.kind must be \"power-cutoff\" or \"hill\"");
  const std::string kind = j["kind"].get<std::string>();
  if (!j.contains("k") || !j["k"].is_number())
    throw std::invalid_argument("nonlinearity.k must be a number");
  const double k = j["k"].get<double>();
  if (kind == "power-cutoff") {
    if (j.contains("n")) throw std::invalid_argument("nonlinearity.n is not used by power-cutoff");
    return power_cutoff(k);
  }
  if (kind == "hill") {
    if (!j.contains("n") || !j["n"].is_number_integer())
      throw std::invalid_argument("nonlinearity.n must be an integer for hill");
    return hill(k, j["n"].get<int>());
  }
  throw std::invalid_argument("nonlinearity.kind must be \"power-cutoff\" or \"hill\"");
}

double eval_g(const Feedback& g, double xi) {
  if (g.kind() != FeedbackKind::PowerCutoff) throw std::invalid_argument("eval_g needs a power-cutoff");
  return g.value(xi);
}

double eval_fn(const Feedback& f, double xi) {
  if (f.kind() != FeedbackKind::Hill) throw std::invalid_argument("eval_fn needs a hill function");
  return f.value(xi);
}

ConditionReport check_cg_a(const Feedback& g, int samples) {
  ConditionReport rep;
  if (g.value(0.0) != 0.0) rep.violations.push_back("g(0) != 0");
  double d0 = g.derivative(0.0);
  if (!std::isfinite(d0)) {
    rep.violations.push_back("g'(0) is unbounded");
  } else if (d0 != 0.0) {
    rep.violations.push_back("g'(0) != 0");
  }
  if (std::abs(g.value(1.0) - 1.0) > 1e-15) rep.violations.push_back("g(1) != 1");
  double margin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < samples; ++i) {
    double xi = 1e-3 + (1.0 - 1e-3) * i / (samples - 1);
    margin = std::min(margin, g.derivative(xi) - g.value(xi) / xi);
  }
  rep.min_margin = margin;
  if (!(margin > 0.0)) rep.violations.push_back("g'(x) > g(x)/x fails on (0,1]");
  rep.pass = rep.violations.empty();
  return rep;
}

double ClosenessReport::product(int m) const {
  return sup_derivative_tail * std::pow(sup_derivative_all, m);
}

ClosenessReport check_cfn_closeness(const Feedback& g, const Feedback& f, double kappa,
                                    double truncation, int samples) {
  if (!(kappa > 0.0 && kappa < 1.0)) throw std::invalid_argument("kappa must lie in (0,1)");
  if (!(truncation > 1.0 + kappa)) throw std::invalid_argument("truncation must exceed 1+kappa");
  ClosenessReport rep;
  rep.kappa = kappa;
  rep.truncation = truncation;
  auto scan = [&](double lo, double hi, bool tail) {
    for (int i = 0; i < samples; ++i) {
      double xi = lo + (hi - lo) * i / (samples - 1);
      double fv = f.value(xi);
      double fd = f.derivative(xi);
      rep.sup_value_diff = std::max(rep.sup_value_diff, std::abs(fv - g.value(xi)));
      rep.sup_derivative_diff = std::max(rep.sup_derivative_diff, std::abs(fd - g.derivative(xi)));
      if (tail) rep.sup_derivative_tail = std::max(rep.sup_derivative_tail, std::abs(fd));
    }
  };
  scan(0.0, 1.0 - kappa, false);
  scan(1.0 + kappa, truncation, true);
  for (int i = 0; i < samples; ++i) {
    double xi = truncation * i / (samples - 1);
    rep.sup_derivative_all = std::max(rep.sup_derivative_all, std::abs(f.derivative(xi)));
  }
  // Beyond the truncation the hill tail obeys f <= x^(k-n) and |f'| <= n x^(k-1-n).
  auto tail_bounds = [&](const Feedback& h, double& v, double& d) {
    v = 0.0;
    d = 0.0;
    if (h.kind() == FeedbackKind::Hill) {
      v = std::pow(truncation, h.k() - h.n());
      d = h.n() * std::pow(truncation, h.k() - 1.0 - h.n());
    }
  };
  double fv, fd, gv, gd;
  tail_bounds(f, fv, fd);
  tail_bounds(g, gv, gd);
  rep.sup_value_diff = std::max(rep.sup_value_diff, fv + gv);
  rep.sup_derivative_diff = std::max(rep.sup_derivative_diff, fd + gd);
  rep.sup_derivative_tail = std::max(rep.sup_derivative_tail, fd);
  rep.sup_derivative_all = std::max(rep.sup_derivative_all, fd);
  return rep;
}

ShiftedFeedback::ShiftedFeedback(Feedback base, double shift, double splice)
    : base_(base), shift_(shift), splice_(splice) {
  if (!(shift > 0.0 && shift < splice)) throw std::invalid_argument("need 0 < shift < splice");
  if (base_.kind() == FeedbackKind::PowerCutoff && splice > 1.0)
    throw std::invalid_argument("cutoff extension must splice at or below 1");
  splice_value_ = base_.value_on_branch(splice, 0);
  double slope = base_.derivative_on_branch(splice, 0);
  if (!(splice_value_ > 0.0) || !(slope > 0.0))
    throw std::invalid_argument("base must be positive and increasing at the splice point");
  splice_rate_ = slope / splice_value_;
  base_shift_ = base_.value_on_branch(shift, 0);
}

double ShiftedFeedback::extended(double xi) const {
  if (xi < 0.0) return -extended(-xi);
  if (xi <= splice_) return base_.value_on_branch(xi, 0);
  return splice_value_ * (2.0 - std::exp(splice_rate_ * (splice_ - xi)));
}

double ShiftedFeedback::extended_derivative(double xi) const {
  if (xi < 0.0) return extended_derivative(-xi);
  if (xi <= splice_) return base_.derivative_on_branch(xi, 0);
  return splice_value_ * splice_rate_ * std::exp(splice_rate_ * (splice_ - xi));
}

double ShiftedFeedback::derivative(double x) const { return extended_derivative(shift_ + x); }

ShiftedFeedback build_shifted(const Feedback& base, double shift, double splice) {
  return ShiftedFeedback(base, shift, splice);
}

}  // namespace ddelab
