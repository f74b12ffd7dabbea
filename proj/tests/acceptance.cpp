// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Every tolerance is pinned here; seeds are fixed so the whole run
// is reproducible bit for bit.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "lottery/analysis.hpp"
#include "lottery/evaluation.hpp"
#include "lottery/instance.hpp"
#include "lottery/mechanisms.hpp"
#include "lottery/report.hpp"

using namespace lottery;
namespace fs = std::filesystem;

namespace {

constexpr int kWorkers = 4;

struct Check {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      if (!detail.empty()) detail += "; ";
      detail += "FAILED: " + what;
    }
  }
  void note(const std::string& text) {
    if (!detail.empty()) detail += "; ";
    detail += text;
  }
};

int g_failures = 0;

void criterion(const std::string& id, const std::string& title,
               const std::function<void(Check&)>& body) {
  Check check;
  auto start = std::chrono::steady_clock::now();
  try {
    body(check);
  } catch (const std::exception& e) {
    check.ok = false;
    check.note(std::string("exception: ") + e.what());
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!check.ok) ++g_failures;
  std::printf("[%s] %s %s (%.1fs)%s%s\n", check.ok ? "PASS" : "FAIL", id.c_str(), title.c_str(),
              secs, check.detail.empty() ? "" : " -- ", check.detail.c_str());
  std::fflush(stdout);
}

Instance hamilton_like(int n, int k) {
  NamedConstruction spec;
  spec.tag = ConstructionTag::HamiltonLike;
  spec.n = n;
  spec.k = k;
  return generate_named(spec);
}

Instance il_bad(long long r, long long s) {
  NamedConstruction spec;
  spec.tag = ConstructionTag::IlBad;
  spec.r = r;
  spec.s = s;
  spec.alpha = parse_rational("1/4");
  return generate_named(spec);
}

// ------------------------------------------------------------ criteria ---

void c01_hamilton(Check& c) {
  BoundRecord rec = bounds(hamilton_like(10000, 21));
  c.require(std::abs(rec.gl_eff() - 0.9523809524) <= 1e-9, "gl_eff != 0.9523809524");
  c.require(std::abs(rec.gl_fair() - 0.9047619048) <= 1e-9, "gl_fair != 0.9047619048");

  Instance inst = hamilton_like(2000, 21);
  auto start = std::chrono::steady_clock::now();
  UtilityVector mc = monte_carlo(Mechanism::GroupLottery, inst,
                                 ActionProfile::group_declarations(inst), 100000, 20260809,
                                 kWorkers, 0, /*pool=*/true);
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  double util = utilization(mc, inst);
  double fair = fairness_ratio(mc);
  c.require(util >= rec.gl_eff(), "MC utilization below the bound");
  c.require(fair >= rec.gl_fair(), "MC fairness below the bound");
  c.require(secs < 30.0, "runtime exceeded 30 s");
  c.note("util=" + format_sig10(util) + " fair=" + format_sig10(fair));
}

void c02_big_sur(Check& c) {
  NamedConstruction spec;
  spec.tag = ConstructionTag::BigSurLike;
  BoundRecord rec = bounds(generate_named(spec));
  c.require(rec.iw_eff() >= 0.755 && rec.iw_eff() <= 0.760, "iw_eff outside [0.755, 0.760]");
  c.require(rec.iw_fair() >= 0.738 && rec.iw_fair() <= 0.744, "iw_fair outside [0.738, 0.744]");
  c.require(std::abs(rec.gl_eff() - 0.9801) <= 5e-5, "gl_eff not 0.9801 to 4 decimals");
  c.require(std::abs(rec.gl_fair() - 0.9601) <= 5e-5, "gl_fair not 0.9601 to 4 decimals");
  c.note("iw_eff=" + format_sig10(rec.iw_eff()) + " iw_fair=" + format_sig10(rec.iw_fair()));
}

void c03_gl_tightness(Check& c) {
  NamedConstruction big;
  big.tag = ConstructionTag::GlTight;
  big.r = 3;
  big.m = 500;
  Instance inst = generate_named(big);
  UtilityVector u = exact_gl_dp(inst);
  double ratio = u.u[1] / u.u[0];  // couple / single
  c.require(std::abs(ratio - 2.0 / 3.0) <= 0.005, "ratio not within 0.005 of 2/3");
  double kappa = instance_stats(inst).kappa_hat;
  c.require(ratio <= 1.0 - 2.0 * kappa + 0.07, "ratio not below 1-2k+eps, eps=0.07");
  c.note("ratio=" + format_sig10(ratio));

  NamedConstruction tiny;
  tiny.tag = ConstructionTag::GlTight;
  tiny.r = 2;
  tiny.m = 3;
  Instance small = generate_named(tiny);
  UtilityVector e = exact_enumerate(Mechanism::GroupLottery, small,
                                    ActionProfile::group_declarations(small));
  c.require(std::abs(e.u[0] - 2.0 / 3.0) <= 1e-9, "single utility != 2/3");
  c.require(std::abs(e.u[1] - 0.5) <= 1e-9, "first couple utility != 1/2");
  c.require(std::abs(e.u[2] - 0.5) <= 1e-9, "second couple utility != 1/2");
}

void c04_il_degradation(Check& c) {
  const long long R = 100000;
  std::vector<double> util_il;
  double fairness_at_24 = 0, util_se_last = 0;
  for (long long r : {8, 16, 24}) {
    Instance inst = il_bad(r, r * r);
    UtilityVector mc =
        monte_carlo(Mechanism::IndividualLottery, inst,
                    ActionProfile::group_requests(inst, inst.k), R, 97 + r, kWorkers, 0, true);
    util_il.push_back(utilization(mc, inst));
    if (r == 24) {
      fairness_at_24 = fairness_ratio(mc);
      // class-pooled utilization error for the stated 3*SE tolerance
      double acc = 0;
      SizeMultiset classes = to_multiset(inst.group_sizes);
      for (std::size_t cl = 0; cl < classes.sizes.size(); ++cl) {
        for (int g = 0; g < inst.m; ++g)
          if (inst.group_sizes[std::size_t(g)] == classes.sizes[cl]) {
            double term = double(classes.sizes[cl]) * double(classes.counts[cl]) *
                          mc.se[std::size_t(g)];
            acc += term * term;
            break;
          }
      }
      util_se_last = std::sqrt(acc) / double(inst.k);
    }
  }
  c.require(util_il[0] > util_il[1] && util_il[1] > util_il[2],
            "utilization not strictly decreasing in r");
  c.require(util_il[2] <= 0.30 + 3.0 * util_se_last, "utilization at r=24 above 0.30");
  c.require(fairness_at_24 <= 0.30, "fairness at r=24 above 0.30");

  Instance worst = il_bad(24, 576);
  UtilityVector gl = exact_gl_dp(worst);
  c.require(utilization(gl, worst) >= 0.80, "GL utilization below 0.80 on the same instance");
  c.note("il_util=" + format_sig10(util_il[0]) + "," + format_sig10(util_il[1]) + "," +
         format_sig10(util_il[2]) + " gl_util=" + format_sig10(utilization(gl, worst)));
}

void c05_dominance(Check& c) {
  auto start = std::chrono::steady_clock::now();
  SeedStream gen(1905);
  long long violations = 0, samples = 0;
  for (int t = 0; t < 20; ++t) {
    Instance inst = sample_bounded_instance(gen, 12, 4, false);
    for (int r = 0; r < 10000; ++r) {
      CoupledTriple triple = sample_coupled_triple(inst, gen);
      CoupledSuccess s = coupled_success(inst, triple);
      ++samples;
      for (int g = 0; g < inst.m; ++g) {
        if (s.glr[std::size_t(g)] > s.iw[std::size_t(g)]) ++violations;
        if (s.iw[std::size_t(g)] > s.gl[std::size_t(g)]) ++violations;
      }
    }
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  c.require(violations == 0, "pointwise dominance violated");
  c.require(secs < 60.0, "runtime exceeded 60 s");
  c.note("samples=" + std::to_string(samples));
}

void c06_hitting(Check& c) {
  SeedStream gen(8128);
  long long interval_failures = 0, subadd_failures = 0, checks = 0;
  for (int t = 0; t < 1000; ++t) {
    int n = 2 + gen.uniform_int(11);
    std::vector<int> sizes(static_cast<std::size_t>(n));
    long long total = 0;
    for (auto& s : sizes) {
      s = 1 + gen.uniform_int(4);
      total += s;
    }
    for (int k = 1; k <= total; ++k) {
      HittingCheck check = hitting_time_check(sizes, k, HittingMethod::Exact, 0);
      ++checks;
      if (!check.within) ++interval_failures;
      for (const auto& pair : check.subadditivity)
        if (!pair.holds) ++subadd_failures;
    }
  }
  c.require(interval_failures == 0, "expected hitting index escaped its interval");
  c.require(subadd_failures == 0, "subadditivity violated");
  c.note("budget_checks=" + std::to_string(checks));
}

void c07_oracle_agreement(Check& c) {
  SeedStream gen(660654);
  long long comparisons = 0;
  for (int t = 0; t < 50; ++t) {
    Instance inst = sample_bounded_instance(gen, 8, 4, true);
    for (Mechanism mech :
         {Mechanism::GroupLottery, Mechanism::IndividualLottery, Mechanism::IndividualLotteryLimit,
          Mechanism::WeightedIndividualLottery, Mechanism::GroupLotteryReplacement,
          Mechanism::FairGroupLottery}) {
      int limit = mech == Mechanism::IndividualLotteryLimit ? 2 : 0;
      ActionProfile profile = default_profile(mech, inst, limit);
      UtilityVector exact = exact_enumerate(mech, inst, profile, limit);
      UtilityVector mc = monte_carlo(mech, inst, profile, 100000, gen.next_u64(), kWorkers, limit);
      for (int g = 0; g < inst.m; ++g) {
        ++comparisons;
        double se = mc.se[std::size_t(g)];
        double diff = std::abs(mc.u[std::size_t(g)] - exact.u[std::size_t(g)]);
        if (se == 0.0) {
          c.require(diff <= 1e-9, "degenerate estimate off the exact value");
        } else {
          c.require(diff <= 3.0 * se, "MC further than 3 SE from enumeration (" +
                                          std::string(mechanism_token(mech)) + ")");
        }
      }
    }
    UtilityVector dp = exact_gl_dp(inst);
    UtilityVector enumerated = exact_enumerate(Mechanism::GroupLottery, inst,
                                               ActionProfile::group_declarations(inst));
    for (int g = 0; g < inst.m; ++g)
      c.require(std::abs(dp.u[std::size_t(g)] - enumerated.u[std::size_t(g)]) <= 1e-9,
                "DP and enumeration disagree");
  }
  c.note("comparisons=" + std::to_string(comparisons));
}

void c08_example1(Check& c) {
  for (int m = 4; m <= 13; ++m) {
    Example1ClosedForms cf = example1_closed_forms(m);
    c.require(cf.u_all_twos <= cf.u_group_request + 1e-12,
              "deviation should not win at m=" + std::to_string(m));
  }
  for (int m = 14; m <= 20; ++m) {
    Example1ClosedForms cf = example1_closed_forms(m);
    c.require(cf.u_all_twos > cf.u_group_request,
              "deviation should win at m=" + std::to_string(m));
  }

  NamedConstruction spec;
  spec.tag = ConstructionTag::SplExample;
  spec.n = 17;
  Instance inst = generate_named(spec);
  Example1ClosedForms cf = example1_closed_forms(14);

  ActionProfile truthful = ActionProfile::group_requests(inst, inst.k);
  UtilityVector mc_gr = monte_carlo(Mechanism::WeightedIndividualLottery, inst, truthful, 100000,
                                    3141, kWorkers);
  double se_gr = std::max(mc_gr.se[0], 1e-9);
  c.require(std::abs(mc_gr.u[0] - cf.u_group_request) <= 3.0 * se_gr,
            "group-request simulation misses 1 - 1/m");

  ActionProfile twos = truthful;
  for (int i = 0; i < 4; ++i) twos.requests[std::size_t(i)] = 2;
  UtilityVector mc_tw =
      monte_carlo(Mechanism::WeightedIndividualLottery, inst, twos, 100000, 2718, kWorkers);
  double se_tw = std::max(mc_tw.se[0], 1e-9);
  c.require(std::abs(mc_tw.u[0] - cf.u_all_twos) <= 3.0 * se_tw,
            "all-twos simulation misses the closed form");
  c.note("u_gr=" + format_sig10(mc_gr.u[0]) + " vs " + format_sig10(cf.u_group_request) +
         ", u_2s=" + format_sig10(mc_tw.u[0]) + " vs " + format_sig10(cf.u_all_twos));
}

void c09_iw_tightness(Check& c) {
  NamedConstruction spec;
  spec.tag = ConstructionTag::SplTight;
  spec.m = 200;
  spec.s = 100;
  spec.alpha = parse_rational("1/2");
  Instance inst = generate_named(spec);
  double closed = spl_tight_closed_form(200, 100, parse_rational("1/2"));
  UtilityVector mc = monte_carlo(Mechanism::WeightedIndividualLottery, inst,
                                 ActionProfile::group_requests(inst, inst.k), 1500, 46692,
                                 kWorkers, 0, true);
  double util = utilization(mc, inst);
  c.require(std::abs(util - closed) <= 0.02, "utilization off the closed form by > 0.02");
  c.require(std::abs(util - g_of(0.5)) <= 0.03, "utilization off g(1/2) by > 0.03");
  c.note("util=" + format_sig10(util) + " closed=" + format_sig10(closed) +
         " g=" + format_sig10(g_of(0.5)));
}

void c10_br_classes(Check& c) {
  long long strategies = 0;
  for (int s = 1; s <= 6; ++s)
    for (int r = 0; r < s; ++r)
      for (const auto& strat : enumerate_br(s, r)) {
        ++strategies;
        c.require(reciprocal_sum_within(strat, r), "reciprocal cap violated");
      }

  SeedStream seeder(1729);
  long long probes = 0;
  for (double threshold : {0.25, 0.5, 0.75, 1.0}) {
    for (int s = 1; s <= 5; ++s) {
      for (int r = 0; r < s; ++r) {
        for (const auto& strat : enumerate_br(s, r)) {
          ConjectureProbe probe = conjecture_probe(s, strat, threshold, 100000, seeder.next_u64());
          ++probes;
          c.require(probe.p_success <= probe.p_group_request + 3.0 * std::max(probe.se, 1e-12),
                    "restricted strategy beat the group request at T=" + format_sig10(threshold));
        }
      }
    }
  }
  c.note("strategies=" + std::to_string(strategies) + " probes=" + std::to_string(probes));
}

void c11_fair_lottery(Check& c) {
  SeedStream gen(5612);
  for (int t = 0; t < 30; ++t) {
    Instance inst = sample_bounded_instance(gen, 24, 4, true);
    if (inst.m > 12) {
      --t;
      continue;
    }
    FairLottery lot = build_fair_lottery(inst);
    auto marg = lot.marginals(inst.m);
    for (double u : marg)
      c.require(std::abs(u - lot.u_star) <= 1e-9, "marginal misses u*");
    for (const auto& e : lot.support) {
      long long sz = 0;
      for (int g : e.groups) sz += inst.group_sizes[std::size_t(g)];
      c.require(sz <= inst.k, "infeasible support subset");
    }
    UtilityVector u = exact_enumerate(Mechanism::FairGroupLottery, inst,
                                      ActionProfile::group_declarations(inst));
    InstanceStats st = instance_stats(inst);
    c.require(std::abs(utilization(u, inst) - (1.0 - st.kappa_hat)) <= 1e-9,
              "utilization not exactly 1 - (s_max-1)/k");
  }
}

void c12_il_limit(Check& c) {
  SeedStream gen(230923);
  for (int ell : {2, 3}) {
    for (int t = 0; t < 10; ++t) {
      // the limit guarantees presuppose that a whole group fits the supply
      Instance inst = sample_bounded_instance(gen, 8, ell, true);
      ActionProfile profile = ActionProfile::group_requests(inst, std::min(ell, inst.k));
      UtilityVector u =
          exact_enumerate(Mechanism::IndividualLotteryLimit, inst, profile, ell);
      c.require(utilization(u, inst) >= 1.0 / ell - 1e-9,
                "limit-ell utilization below 1/ell (ell=" + std::to_string(ell) + ")");
      c.require(fairness_ratio(u) >= 1.0 / ell - 1e-9,
                "limit-ell fairness below 1/ell (ell=" + std::to_string(ell) + ")");
    }
  }

  // the ell+1-sized family drives both metrics toward zero as n grows
  auto eval_bad = [&](long long m) {
    NamedConstruction spec;
    spec.tag = ConstructionTag::IlLimitBad;
    spec.ell = 2;
    spec.m = m;
    spec.k = 4;
    Instance inst = generate_named(spec);
    ActionProfile profile = ActionProfile::group_requests(inst, 2);
    UtilityVector u = monte_carlo(Mechanism::IndividualLotteryLimit, inst, profile, 100000, 777,
                                  kWorkers, 2, true);
    return std::make_pair(utilization(u, inst), fairness_ratio(u));
  };
  auto [util_small, fair_small] = eval_bad(34);    // n = 100
  auto [util_large, fair_large] = eval_bad(134);   // n = 400
  c.require(util_large < util_small, "utilization did not decrease with scale");
  c.require(fair_large < fair_small, "fairness did not decrease with scale");
  c.note("util " + format_sig10(util_small) + " -> " + format_sig10(util_large) + ", fair " +
         format_sig10(fair_small) + " -> " + format_sig10(fair_large));
}

void c13_determinism(Check& c) {
#ifndef LOTTERY_CLI_PATH
  c.require(false, "CLI path not configured");
#else
  fs::path dir = fs::temp_directory_path() / "lotteryctl_acceptance";
  fs::create_directories(dir);
  fs::path inst = dir / "inst.json";
  fs::path out1 = dir / "run1.csv";
  fs::path out8 = dir / "run8.csv";
  fs::path out1b = dir / "run1b.csv";
  std::string cli = LOTTERY_CLI_PATH;

  auto run = [&](const std::string& cmd) {
    int rc = std::system(cmd.c_str());
    c.require(rc == 0, "command failed: " + cmd);
  };
  run(cli + " gen --named hamilton_like --n 300 --k 21 -o " + inst.string() + " > /dev/null");
  std::string eval_base = cli + " eval -i " + inst.string() +
                          " --mech gl,iw,il --replicas 20000 --seed 5 --envy-replicas 5000";
  run(eval_base + " --workers 1 --out " + out1.string());
  run(eval_base + " --workers 8 --out " + out8.string());
  run(eval_base + " --workers 1 --out " + out1b.string());

  std::string a = read_text_file(out1.string());
  std::string b = read_text_file(out8.string());
  std::string a2 = read_text_file(out1b.string());
  c.require(!a.empty(), "empty CSV");
  c.require(a == b, "1-worker and 8-worker CSVs differ");
  c.require(a == a2, "repeated identical run differs");

  // stochastic evaluation without a seed must be refused (config error)
  int rc = std::system((cli + " eval -i " + inst.string() +
                        " --mech gl --method mc --replicas 10 --out " + (dir / "x.csv").string() +
                        " 2> /dev/null")
                           .c_str());
  c.require(rc != 0 && WEXITSTATUS(rc) == 2, "seedless stochastic eval was not refused");
#endif
}

}  // namespace

int main() {
  auto start = std::chrono::steady_clock::now();
  criterion("01", "hamilton-anchors", c01_hamilton);
  criterion("02", "big-sur-anchors", c02_big_sur);
  criterion("03", "gl-tightness", c03_gl_tightness);
  criterion("04", "il-degradation", c04_il_degradation);
  criterion("05", "dominance-coupling", c05_dominance);
  criterion("06", "hitting-time-theory", c06_hitting);
  criterion("07", "oracle-agreement", c07_oracle_agreement);
  criterion("08", "example1-crossover", c08_example1);
  criterion("09", "iw-tightness", c09_iw_tightness);
  criterion("10", "request-classes-and-restricted-optimality", c10_br_classes);
  criterion("11", "fair-group-lottery", c11_fair_lottery);
  criterion("12", "il-with-limit", c12_il_limit);
  criterion("13", "determinism", c13_determinism);
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("%d of 13 criteria passed (%.1fs total)\n", 13 - g_failures, secs);
  return g_failures == 0 ? 0 : 1;
}
