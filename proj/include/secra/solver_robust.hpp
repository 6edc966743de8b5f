#pragma once

#include <array>
#include <optional>

#include "secra/model.hpp"
#include "secra/solver_perfect.hpp"

namespace secra {

struct Sym2x2 {
  double m11 = 0.0;
  double m12 = 0.0;
  double m22 = 0.0;
};

// Positive-semidefiniteness with a tolerance cushion; the determinant test is
// scaled so that large well-conditioned blocks are not rejected for rounding.
bool psd_2x2(const Sym2x2& m, double tol);

// Variables of the transformed robust program: the scaled power
// p_bar = P_s * t_cc, the Charnes-Cooper scalar t_cc, the epigraph objective
// tau, and one multiplier per robust constraint.
struct CertificateVars {
  double p_bar = 0.0;
  double t_cc = 1.0;
  double tau = 1.0;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double lambda3 = 0.0;
};

// One robust constraint as a multiplier family:
//   block(lambda) = base + lambda * diag(1, -eps^2).
// PSD of block(lambda) for some lambda >= 0 certifies the constraint over the
// whole uncertainty disk of radius eps.
struct RobustBlock {
  Sym2x2 base;
  double eps = 0.0;
};

// The multiplier-free parts of the three constraint blocks at a given
// (p_bar, t_cc, tau): legitimate-rate floor, eavesdropper-SINR ceiling, and
// leakage ceiling, in that order.
std::array<RobustBlock, 3> robust_blocks(double p_bar, double t_cc, double tau,
                                         const ChannelInstance& ch,
                                         const SystemParams& params,
                                         const ScenarioParams& sc);

// The three blocks with the multipliers applied.
std::array<Sym2x2, 3> build_lmis(const CertificateVars& v, const ChannelInstance& ch,
                                 const SystemParams& params, const ScenarioParams& sc);

// A multiplier rendering the block PSD, if one exists. The determinant is
// concave in lambda, so evaluating it at the vertex of the quadratic, clamped
// to the interval where both diagonal entries are nonnegative, decides
// existence.
std::optional<double> certificate_lambda(const RobustBlock& block, double tol);
bool certificate_exists(const RobustBlock& block, double tol);

struct TauFeasibility {
  bool feasible = false;
  std::optional<CertificateVars> witness;  // re-verified via build_lmis + psd_2x2
};

// Feasibility of the robust constraint set at a fixed epigraph value tau.
// Internally reduced through P_s = p_bar / t_cc to an interval condition on
// the worst-case gains; the reconstructed witness is never trusted without
// passing the certificate check.
TauFeasibility feasible_tau(double tau, const ChannelInstance& ch,
                            const SystemParams& params, const ScenarioParams& sc);

// Robust secrecy-rate maximization under bounded channel uncertainty:
// bisection on tau over [1, 1 + a_wc * cap] with certificate-verified
// feasibility tests. rate_star = max(0, log2 tau*). tol is relative to the
// rate-bearing margin tau - 1.
SolveResult solve_robust(const ChannelInstance& ch, const SystemParams& params,
                         const ScenarioParams& sc, double tol = 1e-9);

}  // namespace secra
