#pragma once

#include "secra/model.hpp"

namespace secra {

struct SolveResult {
  double p_star = 0.0;     // mW
  double rate_star = 0.0;  // bits/s/Hz
  double t_star = 0.0;     // outer search variable: eavesdropper-SINR level t
                           // for the perfect solver, epigraph tau for the
                           // robust one; 0 when a closed-form shortcut ran
  int iterations = 0;
  double wall_time = 0.0;  // seconds
};

// min(P_t, q / leak_gain), the largest power the budget and leakage
// constraints allow. q / 0 counts as +inf.
double power_cap(const EffectiveGains& g, const ScenarioParams& sc);

struct InnerSolution {
  double f_value = 1.0;  // 1 + a * P(t)
  double p_at_t = 0.0;   // maximizing power at this t, mW
};

// Inner problem at a fixed eavesdropper-SINR level t. The objective is linear
// in the scalar P_s, so the maximizer is the smallest of the three caps
// P_t, q/leak_gain, t/b (a cap with zero denominator drops out).
InnerSolution inner_f(double t, const EffectiveGains& g, const ScenarioParams& sc);

// Golden-section search over t of the two-level objective f(t)/(1+t).
// tol is relative to the initial bracket width; the returned point is the
// best of the evaluated probes and the bracket ends. Whenever no positive
// secrecy rate is achievable the solver reports zero power.
SolveResult golden_search(const EffectiveGains& g, const ScenarioParams& sc,
                          double tol = 1e-8);

// Analytic optimum from monotonicity of (1+aP)/(1+bP) in P: the full cap when
// a > b, zero power otherwise. Independent of the search path; the two are
// cross-checked in the test suite.
SolveResult closed_form(const EffectiveGains& g, const ScenarioParams& sc);

}  // namespace secra
