#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "secra/model.hpp"
#include "secra/rng.hpp"
#include "secra/solver_perfect.hpp"

using namespace secra;

namespace {

// Brute-force grid maximization of the secrecy rate over the feasible power
// interval; stays independent of the solver code paths it checks.
struct GridOpt {
  double p;
  double rate;
};

GridOpt grid_oracle(const EffectiveGains& g, const ScenarioParams& sc, int points) {
  const double cap = power_cap(g, sc);
  GridOpt best{0.0, secrecy_rate(0.0, g)};
  for (int i = 1; i <= points; ++i) {
    const double p = cap * static_cast<double>(i) / points;
    const double r = secrecy_rate(p, g);
    if (r > best.rate) best = {p, r};
  }
  return best;
}

EffectiveGains random_gains(RandomStream& rng, const SystemParams& params,
                            std::uint64_t seed) {
  const ChannelInstance ch = gen_channel(seed, params, {});
  (void)rng;
  return effective_gains(ch, params, false);
}

}  // namespace

TEST_CASE("inner problem pins power to zero at t = 0 when b > 0") {
  EffectiveGains g{0.05, 0.02, 0.1};
  ScenarioParams sc{100.0, 6.0};
  const InnerSolution s = inner_f(0.0, g, sc);
  CHECK(s.p_at_t == 0.0);
  CHECK(s.f_value == 1.0);
}

TEST_CASE("inner problem ignores t when b = 0") {
  EffectiveGains g{0.05, 0.0, 0.1};
  ScenarioParams sc{100.0, 6.0};
  const double cap = std::min(100.0, 6.0 / 0.1);
  for (double t : {0.0, 0.5, 3.0, 100.0}) {
    const InnerSolution s = inner_f(t, g, sc);
    CHECK(s.p_at_t == doctest::Approx(cap));
  }
}

TEST_CASE("inner problem takes the smallest of the three caps") {
  EffectiveGains g{0.05, 0.02, 1.0};
  ScenarioParams sc{100.0, 60.0};  // q / leak = 60
  const InnerSolution s = inner_f(1.0, g, sc);
  CHECK(s.p_at_t == doctest::Approx(50.0).epsilon(1e-12));
  CHECK(s.f_value == doctest::Approx(3.5).epsilon(1e-12));

  // Confirm against a dense grid over feasible powers.
  double best_f = 1.0;
  const int n = 1000000;
  for (int i = 0; i <= n; ++i) {
    const double p = 100.0 * static_cast<double>(i) / n;
    if (p > 100.0 || p * 1.0 > 60.0 || 0.02 * p > 1.0) continue;
    best_f = std::max(best_f, 1.0 + 0.05 * p);
  }
  CHECK(s.f_value == doctest::Approx(best_f).epsilon(1e-5));
}

TEST_CASE("closed form: no secrecy means zero power") {
  ScenarioParams sc{100.0, 6.0};
  for (auto [a, b] : {std::pair{0.1, 0.1}, std::pair{0.05, 0.2}}) {
    const SolveResult r = closed_form({a, b, 0.3}, sc);
    CHECK(r.p_star == 0.0);
    CHECK(r.rate_star == 0.0);
  }
}

TEST_CASE("closed form: vacuous leakage constraint gives the full budget") {
  ScenarioParams sc{100.0, 6.0};
  const SolveResult r = closed_form({0.2, 0.1, 0.0}, sc);
  CHECK(r.p_star == 100.0);
}

TEST_CASE("closed form matches a dense grid oracle") {
  SystemParams params;
  RandomStream rng(1001);
  for (int i = 0; i < 30; ++i) {
    const EffectiveGains g = random_gains(rng, params, substream_seed(1001, i));
    ScenarioParams sc{100.0, 1.0 + 8.0 * rng.uniform()};
    const double cap = power_cap(g, sc);
    const SolveResult r = closed_form(g, sc);
    const GridOpt o = grid_oracle(g, sc, 1000000);
    CHECK(std::abs(r.p_star - o.p) <= cap / 1e6 + 1e-12);
    CHECK(r.rate_star >= o.rate - 1e-12);
  }
}

TEST_CASE("golden search agrees with the closed form") {
  SystemParams params;
  RandomStream rng(2002);
  for (int i = 0; i < 2000; ++i) {
    const EffectiveGains g = random_gains(rng, params, substream_seed(2002, i));
    ScenarioParams sc{100.0, 1.0 + 8.0 * rng.uniform()};
    const SolveResult gs = golden_search(g, sc);
    const SolveResult cf = closed_form(g, sc);
    CHECK(std::abs(gs.p_star - cf.p_star) <= 1e-6 * sc.max_power);
    CHECK(std::abs(gs.rate_star - cf.rate_star) <= 1e-9);
  }
}

TEST_CASE("golden search result satisfies both constraints") {
  SystemParams params;
  RandomStream rng(3003);
  for (int i = 0; i < 500; ++i) {
    const EffectiveGains g = random_gains(rng, params, substream_seed(3003, i));
    ScenarioParams sc{100.0, 1.0 + 8.0 * rng.uniform()};
    const SolveResult r = golden_search(g, sc);
    CHECK(r.p_star >= 0.0);
    CHECK(r.p_star <= sc.max_power);
    CHECK(leakage(r.p_star, g) <= sc.leakage_cap + 1e-9);
    CHECK(r.rate_star == doctest::Approx(secrecy_rate(r.p_star, g)).epsilon(1e-9));
  }
}

TEST_CASE("degenerate cap: q = 0 with positive leak gain") {
  EffectiveGains g{0.3, 0.1, 0.2};
  ScenarioParams sc{100.0, 0.0};
  const SolveResult gs = golden_search(g, sc);
  CHECK(gs.p_star == 0.0);
  CHECK(gs.rate_star == 0.0);
  const SolveResult cf = closed_form(g, sc);
  CHECK(cf.p_star == 0.0);
  CHECK(cf.rate_star == 0.0);
}

TEST_CASE("no secrecy instances report zero rate through the search") {
  SystemParams params;
  ScenarioParams sc{100.0, 6.0};
  int seen = 0;
  for (int i = 0; i < 300; ++i) {
    const ChannelInstance ch = gen_channel(substream_seed(4004, i), params, {});
    const EffectiveGains g = effective_gains(ch, params, false);
    if (g.a > g.b) continue;
    ++seen;
    const SolveResult r = golden_search(g, sc);
    CHECK(r.rate_star == 0.0);
    CHECK(r.p_star == 0.0);
  }
  CHECK(seen > 0);  // the channel geometry must produce such cases
}

TEST_CASE("optimal rate is nondecreasing in q and in P_t") {
  SystemParams params;
  RandomStream rng(5005);
  for (int i = 0; i < 100; ++i) {
    const EffectiveGains g = random_gains(rng, params, substream_seed(5005, i));
    double prev = -1.0;
    for (double q : {1.0, 3.0, 5.0, 7.0, 9.0}) {
      const SolveResult r = golden_search(g, {100.0, q});
      CHECK(r.rate_star >= prev - 1e-12);
      prev = r.rate_star;
    }
    prev = -1.0;
    for (double pt : {20.0, 40.0, 60.0, 80.0, 100.0}) {
      const SolveResult r = golden_search(g, {pt, 6.0});
      CHECK(r.rate_star >= prev - 1e-12);
      prev = r.rate_star;
    }
  }
}
