#include "secra/solver_perfect.hpp"

#include <chrono>
#include <cmath>
#include <initializer_list>
#include <limits>

namespace secra {

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

}  // namespace

double power_cap(const EffectiveGains& g, const ScenarioParams& sc) {
  double cap = sc.max_power;
  if (g.leak_gain > 0.0) cap = std::min(cap, sc.leakage_cap / g.leak_gain);
  return cap;
}

InnerSolution inner_f(double t, const EffectiveGains& g, const ScenarioParams& sc) {
  double p = power_cap(g, sc);
  if (g.b > 0.0) p = std::min(p, t / g.b);
  return {1.0 + g.a * p, p};
}

SolveResult closed_form(const EffectiveGains& g, const ScenarioParams& sc) {
  const auto t0 = clock_type::now();
  SolveResult r;
  if (g.a > g.b) {
    r.p_star = power_cap(g, sc);
    r.rate_star = secrecy_rate(r.p_star, g);
  }
  r.wall_time = seconds_since(t0);
  return r;
}

SolveResult golden_search(const EffectiveGains& g, const ScenarioParams& sc,
                          double tol) {
  const auto t0 = clock_type::now();

  // f(t) is constant in t when b = 0; nothing to search over.
  if (g.b == 0.0) return closed_form(g, sc);

  const double cap = power_cap(g, sc);
  const double t_max = g.b * cap;  // largest achievable eavesdropper SINR

  const auto ratio_at = [&](double t) {
    return inner_f(t, g, sc).f_value / (1.0 + t);
  };

  constexpr double golden = 0.6180339887498948482;  // (sqrt(5)-1)/2
  double lo = 0.0;
  double hi = t_max;
  double t1 = hi - golden * (hi - lo);
  double t2 = lo + golden * (hi - lo);
  double r1 = ratio_at(t1);
  double r2 = ratio_at(t2);

  int iterations = 0;
  const double width_tol = tol * t_max;
  while (hi - lo > width_tol) {
    if (r1 > r2) {
      hi = t2;
      t2 = t1;
      r2 = r1;
      t1 = hi - golden * (hi - lo);
      r1 = ratio_at(t1);
    } else {
      lo = t1;
      t1 = t2;
      r1 = r2;
      t2 = lo + golden * (hi - lo);
      r2 = ratio_at(t2);
    }
    ++iterations;
  }

  // Best evaluated point; the bracket ends count as candidates so a maximum
  // sitting on the boundary is returned exactly.
  double t_best = t1;
  double r_best = r1;
  for (const double t : {t2, lo, hi}) {
    const double r = ratio_at(t);
    if (r > r_best) {
      r_best = r;
      t_best = t;
    }
  }

  SolveResult res;
  res.iterations = iterations;
  if (r_best <= 1.0) {
    // No positive secrecy rate anywhere; zero power minimizes leakage.
    res.p_star = 0.0;
    res.rate_star = 0.0;
    res.t_star = 0.0;
  } else {
    res.t_star = t_best;
    res.p_star = inner_f(t_best, g, sc).p_at_t;
    res.rate_star = secrecy_rate(res.p_star, g);
  }
  res.wall_time = seconds_since(t0);
  return res;
}

}  // namespace secra
