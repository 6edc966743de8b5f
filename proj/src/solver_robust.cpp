#include "secra/solver_robust.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace secra {

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

constexpr double kPsdTol = 1e-9;

Sym2x2 with_lambda(const RobustBlock& block, double lambda) {
  return {block.base.m11 + lambda, block.base.m12,
          block.base.m22 - lambda * block.eps * block.eps};
}

// Witness verification: the PSD certificate for a genuine disk, the nominal
// trailing entry for a zero-radius one (where the matrix form degenerates).
bool block_certified(const RobustBlock& block, double lambda, double tol) {
  if (block.eps == 0.0) {
    const double scale =
        std::max({1.0, std::abs(block.base.m11), std::abs(block.base.m12)});
    return block.base.m22 >= -tol * scale;
  }
  return psd_2x2(with_lambda(block, lambda), tol);
}

}  // namespace

bool psd_2x2(const Sym2x2& m, double tol) {
  if (m.m11 < -tol || m.m22 < -tol) return false;
  const double prod = m.m11 * m.m22;
  const double det = prod - m.m12 * m.m12;
  return det >= -tol * std::max(1.0, std::abs(prod));
}

std::array<RobustBlock, 3> robust_blocks(double p_bar, double t_cc, double tau,
                                         const ChannelInstance& ch,
                                         const SystemParams& params,
                                         const ScenarioParams& sc) {
  const double den_s = params.primary_power * ch.g_s * ch.g_s + params.noise_su;
  const double den_e = params.primary_power * ch.g_e * ch.g_e + params.noise_eve;

  // Each block certifies a quadratic-in-error inequality over its disk:
  //   1: forall |e_s| <= eps_s,  t + p_bar (h_s + e_s)^2 / den_s >= tau
  //   2: forall |e_e| <= eps_e,  t + p_bar (h_e + e_e)^2 / den_e <= 1
  //   3: forall |e_p| <= eps_p,  p_bar (h_p + e_p)^2 <= t q
  std::array<RobustBlock, 3> blocks;
  blocks[0].base = {p_bar / den_s, p_bar * ch.h_s / den_s,
                    p_bar * ch.h_s * ch.h_s / den_s + t_cc - tau};
  blocks[0].eps = ch.eps_s;
  blocks[1].base = {-p_bar / den_e, -p_bar * ch.h_e / den_e,
                    1.0 - t_cc - p_bar * ch.h_e * ch.h_e / den_e};
  blocks[1].eps = ch.eps_e;
  blocks[2].base = {-p_bar, -p_bar * ch.h_p,
                    t_cc * sc.leakage_cap - p_bar * ch.h_p * ch.h_p};
  blocks[2].eps = ch.eps_p;
  return blocks;
}

std::array<Sym2x2, 3> build_lmis(const CertificateVars& v, const ChannelInstance& ch,
                                 const SystemParams& params, const ScenarioParams& sc) {
  const auto blocks = robust_blocks(v.p_bar, v.t_cc, v.tau, ch, params, sc);
  return {with_lambda(blocks[0], v.lambda1), with_lambda(blocks[1], v.lambda2),
          with_lambda(blocks[2], v.lambda3)};
}

std::optional<double> certificate_lambda(const RobustBlock& block, double tol) {
  const double alpha = block.base.m11;
  const double beta = block.base.m12;
  const double gamma = block.base.m22;
  const double eps_sq = block.eps * block.eps;

  if (eps_sq == 0.0) {
    // Zero-radius disk: there is no Slater point, so the matrix form is not
    // equivalent to the constraint. The constraint itself is the nominal
    // scalar inequality gamma >= 0; lambda is chosen to keep the block as
    // close to the cone as the geometry allows.
    const double scale = std::max({1.0, std::abs(alpha), std::abs(beta)});
    if (gamma < -tol * scale) return std::nullopt;
    double lambda = std::max(0.0, -alpha);
    if (gamma > 0.0) lambda = std::max(lambda, beta * beta / gamma - alpha);
    return lambda;
  }

  const double lo = std::max(0.0, -alpha);
  const double hi = gamma / eps_sq;
  if (hi < lo) return std::nullopt;
  // det(l) = (l+alpha)(gamma - l eps^2) - beta^2 is concave in l; its maximum
  // over [lo, hi] sits at the clamped vertex.
  const double vertex = (gamma - alpha * eps_sq) / (2.0 * eps_sq);
  const double lambda = std::clamp(vertex, lo, hi);
  return psd_2x2(with_lambda(block, lambda), tol) ? std::optional<double>(lambda)
                                                  : std::nullopt;
}

bool certificate_exists(const RobustBlock& block, double tol) {
  return certificate_lambda(block, tol).has_value();
}

TauFeasibility feasible_tau(double tau, const ChannelInstance& ch,
                            const SystemParams& params, const ScenarioParams& sc) {
  const EffectiveGains wc = effective_gains(ch, params, /*worst_case=*/true);
  const double cap = power_cap(wc, sc);

  // Interval reduction: with P_s = p_bar / t_cc the constraint set at fixed
  // tau is nonempty iff some P_s in [0, cap] reaches the worst-case ratio
  //   (1 + a_wc P_s) / (1 + b_wc P_s) >= tau.
  // The ratio is monotone in P_s, so only its value at one end matters.
  double p_s;
  if (tau <= 1.0) {
    p_s = 0.0;
  } else if (cap <= 0.0) {
    return {};
  } else {
    const double best = wc.a > wc.b ? cap : 0.0;
    const double ratio = (1.0 + wc.a * best) / (1.0 + wc.b * best);
    if (ratio < tau) return {};
    p_s = best;
  }

  // Witness reconstruction: the Charnes-Cooper scale is pinned by making the
  // eavesdropper constraint tight at the worst case.
  CertificateVars v;
  v.tau = tau;
  v.t_cc = 1.0 / (1.0 + wc.b * p_s);
  v.p_bar = p_s * v.t_cc;

  const auto blocks = robust_blocks(v.p_bar, v.t_cc, v.tau, ch, params, sc);
  double* lambdas[3] = {&v.lambda1, &v.lambda2, &v.lambda3};
  double tol = kPsdTol;
  for (int attempt = 0; attempt < 2; ++attempt) {
    bool ok = true;
    for (int i = 0; i < 3 && ok; ++i) {
      if (auto l = certificate_lambda(blocks[i], tol)) {
        *lambdas[i] = *l;
      } else {
        ok = false;
      }
    }
    if (ok) {
      ok = block_certified(blocks[0], v.lambda1, tol) &&
           block_certified(blocks[1], v.lambda2, tol) &&
           block_certified(blocks[2], v.lambda3, tol);
    }
    if (ok) return {true, v};
    tol *= 10.0;  // retry once with a widened cushion near tangency
  }
  return {};
}

SolveResult solve_robust(const ChannelInstance& ch, const SystemParams& params,
                         const ScenarioParams& sc, double tol) {
  const auto t0 = clock_type::now();
  ch.validate();

  const EffectiveGains wc = effective_gains(ch, params, /*worst_case=*/true);
  const double cap = power_cap(wc, sc);

  SolveResult res;
  res.t_star = 1.0;
  if (cap <= 0.0 || wc.a <= 0.0) {
    // Either no feasible power or no legitimate channel left at the worst
    // case; zero power is the only sensible answer.
    res.wall_time = seconds_since(t0);
    return res;
  }

  double lo = 1.0;
  double hi = 1.0 + wc.a * cap;  // unreachable ratio upper bound
  const double span = hi - lo;

  TauFeasibility best = feasible_tau(lo, ch, params, sc);
  int iterations = 0;
  // Stop once the bracket is small relative to the certified margin tau - 1
  // (the quantity whose log is the rate), with a floating-point floor.
  while (hi - lo > tol * std::max(lo - 1.0, 0.0) && hi - lo > 1e-15 * span &&
         iterations < 200) {
    const double mid = 0.5 * (lo + hi);
    TauFeasibility f = feasible_tau(mid, ch, params, sc);
    if (f.feasible) {
      lo = mid;
      best = std::move(f);
    } else {
      hi = mid;
    }
    ++iterations;
  }

  res.iterations = iterations;
  res.t_star = lo;
  if (best.witness) {
    const CertificateVars& v = *best.witness;
    res.p_star = v.t_cc > 0.0 ? v.p_bar / v.t_cc : 0.0;
  }
  res.rate_star = std::max(0.0, std::log2(lo));
  res.wall_time = seconds_since(t0);
  return res;
}

}  // namespace secra
