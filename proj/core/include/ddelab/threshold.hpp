#pragma once

#include "ddelab/integrator.hpp"

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

namespace ddelab {

enum class ZVerdict { InD, HitsOne, Unresolved };

std::string to_string(ZVerdict v);

struct ZClassification {
  double c = 0.0;
  double d = 0.0;
  ZVerdict verdict = ZVerdict::Unresolved;
  double horizon = 0.0;   // T_max used (z time)
  double evidence = 0.0;  // tau_0 for HitsOne, certificate time for InD, last time otherwise
  double max_value = 0.0; // sup z on (1, evidence]
  double min_value = 0.0;
  nlohmann::json to_json() const;
};

struct ThresholdOptions {
  double t_max = 400.0;
  int max_doublings = 2;
  IntegratorOptions integrator;
};

// z^d: z = e^{-ct} on [0, 1] continued by the limit system; times are z time (integration time + 1).
Trajectory z_trajectory(double c, double d, double k, double t_end, const IntegratorOptions& opt = {});
ZClassification classify_zd(double c, double d, double k = 2.0, const ThresholdOptions& opt = {});

struct BracketStep {
  double lo;
  double hi;
};

struct DStarResult {
  double c = 0.0;
  double dstar = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  std::vector<BracketStep> history;
  std::vector<ZClassification> unresolved;
  nlohmann::json to_json() const;
};

// Relative tolerance: stops when hi - lo < tol * lo.
DStarResult find_dstar(double c, double d_lo, double d_hi, double tol = 1e-6, double k = 2.0,
                       const ThresholdOptions& opt = {});
// Bracket search from (c, 2c) upward by doubling, then find_dstar.
DStarResult find_dstar_auto(double c, double tol = 1e-6, double k = 2.0, const ThresholdOptions& opt = {});

struct DeltaLedger {
  double k1 = 0.0;
  double k2 = 0.0;
  double Delta = 0.0;
  double bound1 = 0.0;  // (d-d0) g(m0/2) / k1
  double bound2 = 0.0;  // (d-d0) g(e^{-c Delta}) / (2 k1)
  double bound3 = 0.0;  // (d-d0)/k2 e^{-c(1+Delta)} int_1^{1+Delta} e^{cs} g(e^{-c(s-1)}) ds
  double bound4 = 0.0;  // min(d/c - 1, c/2), also m0/4
  double delta = 0.0;
  nlohmann::json to_json() const;
};

struct EnvelopeData {
  double c = 0.0;
  double d = 0.0;
  double d0 = 0.0;
  double d1 = 0.0;
  double k = 2.0;
  Trajectory w0;   // z^{d0}, integration time (z time - 1)
  double tau0 = 0.0;
  double tau1 = 0.0;
  double xi1 = 0.0;
  double m0 = 0.0;
  double m1 = 0.0;
  double sigma = 0.0;
  double nu1 = 0.0;
  double m0_tilde = 0.0;
  double m1_tilde = 0.0;
  double sigma_tilde = 0.0;
  DeltaLedger ledger;

  double w0_at(double t) const { return w0.value(t - 1.0); }
  double w1_at(double t) const;
  nlohmann::json to_json() const;
};

EnvelopeData envelopes(double c, double d, double d0, double k = 2.0, const ThresholdOptions& opt = {});
EnvelopeData envelopes(double c, double d, double d0, double d1, double k, const ThresholdOptions& opt);

double tau1_closed_form(double c, double d1);

struct LedgerItem {
  int index;
  bool pass;
  double lhs;
  double rhs;
  std::string what;
};

struct LedgerReport {
  int n = 0;
  double a_n = 0.0;
  double b_n = 0.0;
  double delta = 0.0;
  std::vector<LedgerItem> items;  // (1)-(9)
  bool all_pass() const;
  bool pass_5_to_9() const;
  nlohmann::json to_json() const;
};

LedgerReport check_n_ledger(const EnvelopeData& env, const Feedback& f, double a_n, double b_n);
LedgerReport check_n_ledger(const EnvelopeData& env, int n);

// Smallest n on the grid for which items (5)-(9) pass with (a_n, b_n) = (c, d); -1 if none.
int smallest_ledger_n(const EnvelopeData& env, const std::vector<int>& n_grid);

}  // namespace ddelab
