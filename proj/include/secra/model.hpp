#pragma once

#include <cstdint>

namespace secra {

// Fixed physical constants of the network: primary transmit power, receiver
// noise variances, and the path-loss geometry. Powers in mW, distances in m.
struct SystemParams {
  double primary_power = 60.0;  // P_p
  double noise_su = 1e-3;       // sigma_s^2 at the SU-Rx
  double noise_eve = 1e-3;      // sigma_e^2 at the eavesdropper
  double path_loss_exp = 1.7;
  double dist_su = 10.0;   // SU-Tx -> SU-Rx
  double dist_eve = 20.0;  // SU-Tx -> EVE
  double dist_pu = 10.0;   // SU-Tx -> PU-Rx
  double cross_su = 20.0;  // PU-Tx -> SU-Rx
  double cross_eve = 20.0; // PU-Tx -> EVE

  void validate() const;  // throws ValidationError
};

// Per-experiment limits: secondary power budget and interference-leakage cap.
struct ScenarioParams {
  double max_power = 100.0;  // P_t, mW
  double leakage_cap = 6.0;  // q, mW

  void validate() const;
};

struct UncertaintyProfile {
  double eps_s = 0.0;
  double eps_e = 0.0;
  double eps_p = 0.0;

  bool is_zero() const { return eps_s == 0.0 && eps_e == 0.0 && eps_p == 0.0; }
  void validate() const;
};

// Estimated channel magnitudes of one realization plus the radii of the disks
// known to contain the true channels. Only magnitudes are kept: everything
// downstream depends on |h|^2, and the extremes over a disk |e| <= eps are
// plain magnitude shifts.
struct ChannelInstance {
  double h_s = 0.0;  // SU-Tx -> SU-Rx
  double h_p = 0.0;  // SU-Tx -> PU-Rx
  double h_e = 0.0;  // SU-Tx -> EVE
  double g_s = 0.0;  // PU-Tx -> SU-Rx
  double g_e = 0.0;  // PU-Tx -> EVE
  double eps_s = 0.0;
  double eps_e = 0.0;
  double eps_p = 0.0;

  bool perfect_csi() const { return eps_s == 0.0 && eps_e == 0.0 && eps_p == 0.0; }
  void validate() const;
};

// Per-unit-power SINR coefficients and the leakage gain:
//   gamma_s = a * P_s,   gamma_e = b * P_s,   P_in = leak_gain * P_s.
struct EffectiveGains {
  double a = 0.0;          // |h_s|^2 / (P_p |g_s|^2 + sigma_s^2), 1/mW
  double b = 0.0;          // |h_e|^2 / (P_p |g_e|^2 + sigma_e^2), 1/mW
  double leak_gain = 0.0;  // |h_p|^2
};

// One channel realization: each magnitude is |CN(0,1)| * sqrt(d^-alpha).
// Deterministic for a given seed; radii are copied from the profile.
ChannelInstance gen_channel(std::uint64_t seed, const SystemParams& params,
                            const UncertaintyProfile& profile);

// worst_case = true evaluates at the extremes of the uncertainty disks:
// legitimate magnitude max(h_s - eps_s, 0), eavesdropper h_e + eps_e,
// leakage h_p + eps_p.
EffectiveGains effective_gains(const ChannelInstance& ch, const SystemParams& params,
                               bool worst_case);

// [log2(1 + a P) - log2(1 + b P)]^+ in bits/s/Hz.
double secrecy_rate(double power, const EffectiveGains& g);

// Interference power P_s |h_p|^2 arriving at the PU-Rx, mW.
double leakage(double power, const EffectiveGains& g);

}  // namespace secra
