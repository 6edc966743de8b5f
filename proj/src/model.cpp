#include "secra/model.hpp"

#include <cmath>
#include <string>

#include "secra/errors.hpp"
#include "secra/rng.hpp"

namespace secra {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw ValidationError(what);
}

bool finite_nonneg(double v) { return std::isfinite(v) && v >= 0.0; }

}  // namespace

void SystemParams::validate() const {
  require(primary_power > 0.0, "primary_power must be > 0");
  require(noise_su > 0.0, "noise_su must be > 0");
  require(noise_eve > 0.0, "noise_eve must be > 0");
  require(path_loss_exp > 0.0, "path_loss_exp must be > 0");
  require(dist_su > 0.0 && dist_eve > 0.0 && dist_pu > 0.0,
          "SU-Tx distances must be > 0");
  require(cross_su > 0.0 && cross_eve > 0.0, "PU-Tx distances must be > 0");
}

void ScenarioParams::validate() const {
  require(max_power > 0.0, "max_power must be > 0");
  require(finite_nonneg(leakage_cap), "leakage_cap must be >= 0");
}

void UncertaintyProfile::validate() const {
  require(finite_nonneg(eps_s) && finite_nonneg(eps_e) && finite_nonneg(eps_p),
          "uncertainty radii must be >= 0");
}

void ChannelInstance::validate() const {
  require(finite_nonneg(h_s) && finite_nonneg(h_p) && finite_nonneg(h_e),
          "channel magnitudes must be >= 0 and finite");
  require(finite_nonneg(g_s) && finite_nonneg(g_e),
          "interference magnitudes must be >= 0 and finite");
  require(finite_nonneg(eps_s) && finite_nonneg(eps_e) && finite_nonneg(eps_p),
          "uncertainty radii must be >= 0 and finite");
}

ChannelInstance gen_channel(std::uint64_t seed, const SystemParams& params,
                            const UncertaintyProfile& profile) {
  params.validate();
  profile.validate();

  RandomStream rng(seed);
  const double alpha = params.path_loss_exp;
  auto draw = [&](double dist) {
    return rng.rayleigh_unit() * std::sqrt(std::pow(dist, -alpha));
  };

  ChannelInstance ch;
  // Fixed draw order; part of the reproducibility contract.
  ch.h_s = draw(params.dist_su);
  ch.h_p = draw(params.dist_pu);
  ch.h_e = draw(params.dist_eve);
  ch.g_s = draw(params.cross_su);
  ch.g_e = draw(params.cross_eve);
  ch.eps_s = profile.eps_s;
  ch.eps_e = profile.eps_e;
  ch.eps_p = profile.eps_p;
  return ch;
}

EffectiveGains effective_gains(const ChannelInstance& ch, const SystemParams& params,
                               bool worst_case) {
  double hs = ch.h_s;
  double he = ch.h_e;
  double hp = ch.h_p;
  if (worst_case) {
    hs = std::max(ch.h_s - ch.eps_s, 0.0);
    he = ch.h_e + ch.eps_e;
    hp = ch.h_p + ch.eps_p;
  }
  EffectiveGains g;
  g.a = hs * hs / (params.primary_power * ch.g_s * ch.g_s + params.noise_su);
  g.b = he * he / (params.primary_power * ch.g_e * ch.g_e + params.noise_eve);
  g.leak_gain = hp * hp;
  return g;
}

double secrecy_rate(double power, const EffectiveGains& g) {
  const double ratio = (1.0 + g.a * power) / (1.0 + g.b * power);
  return std::max(0.0, std::log2(ratio));
}

double leakage(double power, const EffectiveGains& g) {
  return power * g.leak_gain;
}

}  // namespace secra
