#pragma once

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

namespace ddelab {

enum class FeedbackKind { PowerCutoff, Hill };

// Unimodal feedback. PowerCutoff is g(x) = x^k on [0,1], 0 above 1 (g(1) = 1).
// Hill is f_n(x) = x^k / (1 + x^n).
class Feedback {
 public:
  static Feedback power_cutoff(double k);
  static Feedback hill(double k, int n);

  FeedbackKind kind() const { return kind_; }
  double k() const { return k_; }
  int n() const { return n_; }
  bool discontinuous() const { return kind_ == FeedbackKind::PowerCutoff; }

  double operator()(double xi) const { return value(xi); }
  double value(double xi) const;
  // Left derivative at the cutoff.
  double derivative(double xi) const;

  // Branch bookkeeping for the cutoff: 0 on [0,1], 1 on (1, inf). Hill has one branch.
  int branch(double xi) const;
  double value_on_branch(double xi, int branch) const;
  double derivative_on_branch(double xi, int branch) const;

  std::string describe() const;
  nlohmann::json to_json() const;
  static Feedback from_json(const nlohmann::json& j);

  bool operator==(const Feedback& o) const {
    return kind_ == o.kind_ && k_ == o.k_ && n_ == o.n_;
  }

 private:
  Feedback(FeedbackKind kind, double k, int n) : kind_(kind), k_(k), n_(n) {}
  FeedbackKind kind_;
  double k_;
  int n_;
};

double eval_g(const Feedback& g, double xi);
double eval_fn(const Feedback& f, double xi);

struct ConditionReport {
  bool pass = true;
  std::vector<std::string> violations;
  double min_margin = 0.0;  // min of g'(x) - g(x)/x on the sample
};

ConditionReport check_cg_a(const Feedback& g, int samples = 10000);

struct ClosenessReport {
  double kappa = 0.0;
  double truncation = 100.0;
  double sup_value_diff = 0.0;       // |f - g| on [0,1-k] u [1+k,K] (+ tail bound)
  double sup_derivative_diff = 0.0;  // |f' - g'| on the same set
  double sup_derivative_tail = 0.0;  // sup |f'| on [1+k, K] (+ tail bound)
  double sup_derivative_all = 0.0;   // sup |f'| on [0, K]
  double product(int m) const;       // tail * all^m
};

ClosenessReport check_cfn_closeness(const Feedback& g, const Feedback& f, double kappa,
                                    double truncation = 100.0, int samples = 10000);

// Extension base^e spliced at eta (2 - exp form above eta, odd below 0), shifted so that
// h(x) = base^e(shift + x) - base(shift).
class ShiftedFeedback {
 public:
  ShiftedFeedback(Feedback base, double shift, double splice);

  double extended(double xi) const;  // base^e
  double operator()(double x) const { return extended(shift_ + x) - base_shift_; }
  double derivative(double x) const;

  const Feedback& base() const { return base_; }
  double shift() const { return shift_; }
  double splice() const { return splice_; }

 private:
  double extended_derivative(double xi) const;
  Feedback base_;
  double shift_;
  double splice_;
  double base_shift_;
  double splice_value_;
  double splice_rate_;
};

ShiftedFeedback build_shifted(const Feedback& base, double shift, double splice);

}  // namespace ddelab
