#include <algorithm>
#include <map>
#include <numeric>
#include <set>

#include "doctest.h"
#include "lottery/hitting.hpp"
#include "lottery/mechanisms.hpp"
#include "lottery/stats.hpp"

using namespace lottery;

TEST_SUITE("mechanisms") {

TEST_CASE("hitting index") {
  CHECK(hitting_index(5, {2, 2, 2}) == 3);
  CHECK(hitting_index(1, {3, 1}) == 1);
  // hand cumulative sums: (1,2,2) reaches 4 at the third entry, (2,2,1) at the second
  CHECK(hitting_index(4, {1, 2, 2}) == 3);
  CHECK(hitting_index(4, {2, 2, 1}) == 2);
  CHECK_THROWS_AS(hitting_index(6, {2, 2, 1}), Error);
  CHECK(hitting_index_clamped(6, {2, 2, 1}) == 4);
  CHECK(hitting_index_clamped(0, {2, 2, 1}) == 0);

  // expectation engine: exact values and the short-total clamp
  CHECK(expected_hitting_index(to_multiset({2, 2}), 3, false) == doctest::Approx(2.0));
  CHECK(expected_hitting_index(to_multiset({1, 2}), 2, false) == doctest::Approx(1.5));
  CHECK(expected_hitting_index(to_multiset({1, 2}), 9, true) == doctest::Approx(3.0));
  CHECK_THROWS_AS(expected_hitting_index(to_multiset({1, 2}), 9, false), Error);
}

TEST_CASE("valid groups from declarations") {
  ActionProfile p;
  p.kind = ActionProfile::Kind::GroupDeclaration;
  p.declarations = {{0, 1}, {0, 1}};
  auto v = valid_groups(p, 2);
  REQUIRE(v.size() == 1);
  CHECK(v[0] == std::vector<int>{0, 1});

  p.declarations = {{0, 1}, {1}};
  v = valid_groups(p, 2);
  REQUIRE(v.size() == 1);
  CHECK(v[0] == std::vector<int>{1});  // agent 0 stays unmatched

  Instance inst = make_instance(3, {1, 2, 2});
  auto gr = ActionProfile::group_declarations(inst);
  v = valid_groups(gr, inst.n);
  REQUIRE(v.size() == 3);
  CHECK(v[0] == std::vector<int>{0});
  CHECK(v[1] == std::vector<int>{1, 2});
  CHECK(v[2] == std::vector<int>{3, 4});
}

TEST_CASE("group lottery allocation") {
  // sizes (2,3), k=4: first group fully served, two tickets unallocated
  Allocation a = allocate_group_lottery({{0, 1}, {2, 3, 4}}, 4, 5);
  CHECK(a.x == std::vector<int>{1, 1, 0, 0, 0});
  CHECK(a.total() == 2);

  // sizes (3,2), k=4: only the size-3 group fits
  a = allocate_group_lottery({{2, 3, 4}, {0, 1}}, 4, 5);
  CHECK(a.x == std::vector<int>{0, 0, 1, 1, 1});

  // everything fits when total demand <= k
  a = allocate_group_lottery({{0}, {1, 2}}, 4, 3);
  CHECK(a.total() == 3);
}

TEST_CASE("individual lottery allocation follows the published rule") {
  CHECK(allocate_individual({0, 1}, {2, 2}, 3).x == std::vector<int>{2, 1});
  CHECK(allocate_individual({0, 1}, {3, 1}, 2).x == std::vector<int>{2, 0});
  CHECK(allocate_individual({0, 1}, {3, 1}, 4).x == std::vector<int>{3, 1});
}

TEST_CASE("individual lottery monotonicity on fixed orders") {
  // raising one agent's request never helps anyone else, order by order
  SeedStream stream(424242);
  for (int trial = 0; trial < 2000; ++trial) {
    int n = 2 + stream.uniform_int(6);
    int k = 1 + stream.uniform_int(2 * n);
    std::vector<int> req(static_cast<std::size_t>(n));
    for (auto& r : req) r = 1 + stream.uniform_int(std::max(1, k));
    DrawOrder order = sample_uniform_order(n, stream);
    int who = stream.uniform_int(n);
    std::vector<int> bumped = req;
    bumped[std::size_t(who)] = std::min(k, bumped[std::size_t(who)] + 1 + stream.uniform_int(3));
    Allocation lo = allocate_individual(order.elements, req, k);
    Allocation hi = allocate_individual(order.elements, bumped, k);
    for (int j = 0; j < n; ++j) {
      if (j == who) continue;
      CHECK(lo.x[std::size_t(j)] >= hi.x[std::size_t(j)]);
    }
  }
}

TEST_CASE("uniform order law, direct and split paths") {
  const long long draws = 60000;
  auto run = [&](bool split) {
    SeedStream stream(split ? 1001 : 1002);
    std::map<std::vector<int>, long long> freq;
    for (long long i = 0; i < draws; ++i) {
      DrawOrder d = split ? sample_uniform_order_split(3, {0, 1, 2}, stream)
                          : sample_uniform_order(3, stream);
      freq[d.elements]++;
    }
    REQUIRE(freq.size() == 6);
    std::vector<long long> counts;
    for (auto& [perm, c] : freq) counts.push_back(c);
    double stat = chi_square_stat(counts, std::vector<double>(6, 1.0 / 6.0), draws);
    CHECK(chi_square_pvalue(stat, 5) > 1e-3);
  };
  run(false);
  run(true);

  // proper subset through the insertion path
  SeedStream stream(1003);
  std::map<std::vector<int>, long long> freq;
  for (long long i = 0; i < draws; ++i) freq[sample_uniform_order_split(3, {1}, stream).elements]++;
  REQUIRE(freq.size() == 6);
  std::vector<long long> counts;
  for (auto& [perm, c] : freq) counts.push_back(c);
  double stat = chi_square_stat(counts, std::vector<double>(6, 1.0 / 6.0), draws);
  CHECK(chi_square_pvalue(stat, 5) > 1e-3);

  SeedStream single(5);
  CHECK(sample_uniform_order(1, single).elements == std::vector<int>{0});
}

TEST_CASE("weighted order law") {
  // requests (1,2): P(order = (0,1)) = (1/1)/(1/1 + 1/2) = 2/3
  {
    SeedStream stream(2001);
    long long first = 0;
    const long long draws = 60000;
    for (long long i = 0; i < draws; ++i)
      if (sample_weighted_order({1, 2}, stream).elements[0] == 0) ++first;
    double p = double(first) / double(draws);
    CHECK(std::abs(p - 2.0 / 3.0) < 3.0 * std::sqrt((2.0 / 3.0) * (1.0 / 3.0) / double(draws)));
  }
  // equal requests reduce to the uniform law
  {
    SeedStream stream(2002);
    std::map<std::vector<int>, long long> freq;
    const long long draws = 60000;
    for (long long i = 0; i < draws; ++i) freq[sample_weighted_order({2, 2, 2}, stream).elements]++;
    REQUIRE(freq.size() == 6);
    std::vector<long long> counts;
    for (auto& [perm, c] : freq) counts.push_back(c);
    double stat = chi_square_stat(counts, std::vector<double>(6, 1.0 / 6.0), draws);
    CHECK(chi_square_pvalue(stat, 5) > 1e-3);
  }
  // requests (1,2,2): first-element law (1/2, 1/4, 1/4)
  {
    SeedStream stream(2003);
    const long long draws = 90000;
    std::vector<long long> counts(3, 0);
    for (long long i = 0; i < draws; ++i)
      counts[std::size_t(sample_weighted_order({1, 2, 2}, stream).elements[0])]++;
    double stat = chi_square_stat(counts, {0.5, 0.25, 0.25}, draws);
    CHECK(chi_square_pvalue(stat, 2) > 1e-3);
  }
  // scores come back sorted and aligned
  {
    SeedStream stream(2004);
    DrawOrder d = sample_weighted_order({3, 1, 2}, stream);
    CHECK(std::is_sorted(d.scores.begin(), d.scores.end()));
  }
}

TEST_CASE("fair lottery decomposition") {
  {
    Instance inst = make_instance(1, {1, 1});
    FairLottery lot = build_fair_lottery(inst);
    CHECK(lot.u_star == doctest::Approx(0.5).epsilon(1e-12));
    auto marg = lot.marginals(inst.m);
    CHECK(marg[0] == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(marg[1] == doctest::Approx(0.5).epsilon(1e-9));
  }
  {
    Instance inst = make_instance(2, {1, 2});
    FairLottery lot = build_fair_lottery(inst);
    auto marg = lot.marginals(inst.m);
    CHECK(marg[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
    CHECK(marg[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
  }
  {
    // marginals must hit exactly 1/2, not the 2/3 of the naive pair rotation
    Instance inst = make_instance(4, {2, 2, 2});
    FairLottery lot = build_fair_lottery(inst);
    auto marg = lot.marginals(inst.m);
    for (double u : marg) CHECK(u == doctest::Approx(0.5).epsilon(1e-9));
  }
  {
    // the literal min-residual greedy stalls here; the budget-feasibility cap saves it
    Instance inst = make_instance(2, {1, 1, 1});
    FairLottery lot = build_fair_lottery(inst);
    auto marg = lot.marginals(inst.m);
    for (double u : marg) CHECK(u == doctest::Approx(2.0 / 3.0).epsilon(1e-9));
  }
  {
    Instance inst = make_instance(2, {3, 1});  // u* = 0
    CHECK_THROWS_AS(build_fair_lottery(inst), Error);
  }
}

TEST_CASE("fair lottery on random instances: exact marginals, feasible support") {
  SeedStream stream(771);
  for (int trial = 0; trial < 400; ++trial) {
    Instance inst = sample_bounded_instance(stream, 14, 4, true);
    FairLottery lot = build_fair_lottery(inst);
    double total_w = 0;
    for (const auto& e : lot.support) {
      CHECK(e.weight > 0);
      total_w += e.weight;
      long long sz = 0;
      for (int g : e.groups) sz += inst.group_sizes[std::size_t(g)];
      CHECK(sz <= inst.k);
    }
    CHECK(total_w == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(int(lot.support.size()) <= inst.m + 1);
    auto marg = lot.marginals(inst.m);
    for (double u : marg) CHECK(u == doctest::Approx(lot.u_star).epsilon(1e-9));
  }
}

TEST_CASE("master-sequence projection on a pinned sequence") {
  // groups {0,1} and {2}; master (0,2,0,1) replaces agents by groups, then
  // dedups agents and groups respectively
  Instance inst = make_instance(2, {2, 1});
  CoupledTriple t = project_master_sequence(inst, {0, 2, 0, 1});
  CHECK(t.glr_group_sequence == std::vector<int>{0, 1, 0, 0});
  CHECK(t.iw_agent_order == std::vector<int>{0, 2, 1});
  CHECK(t.gl_group_order == std::vector<int>{0, 1});
}

TEST_CASE("coupled triple projections") {
  // two groups {0,1} and {2}: a master prefix (0,2,0,1,...) projects as stated
  Instance inst = make_instance(2, {2, 1});
  SeedStream stream(31);
  CoupledTriple t = sample_coupled_triple(inst, stream);
  CHECK(t.master_agents.size() == t.glr_group_sequence.size());
  CHECK(int(t.iw_agent_order.size()) == inst.n);
  CHECK(int(t.gl_group_order.size()) == inst.m);
  // dedup orders contain each element exactly once
  std::set<int> agents(t.iw_agent_order.begin(), t.iw_agent_order.end());
  CHECK(int(agents.size()) == inst.n);
  std::set<int> groups(t.gl_group_order.begin(), t.gl_group_order.end());
  CHECK(int(groups.size()) == inst.m);

  // all singletons: the three sequences agree after dedup
  Instance singles = make_instance(2, {1, 1, 1});
  CoupledTriple ts = sample_coupled_triple(singles, stream);
  CHECK(ts.iw_agent_order == ts.gl_group_order);
}

TEST_CASE("coupled triple marginal laws") {
  Instance inst = make_instance(3, {1, 2, 2});
  const long long draws = 60000;

  // deduplicated group order is a uniform permutation of the groups
  {
    SeedStream stream(41);
    std::map<std::vector<int>, long long> freq;
    for (long long i = 0; i < draws; ++i)
      freq[sample_coupled_triple(inst, stream).gl_group_order]++;
    REQUIRE(freq.size() == 6);
    std::vector<long long> counts;
    for (auto& [perm, c] : freq) counts.push_back(c);
    double stat = chi_square_stat(counts, std::vector<double>(6, 1.0 / 6.0), draws);
    CHECK(chi_square_pvalue(stat, 5) > 1e-3);
  }

  // deduplicated agent order follows the request-weighted law under group request
  {
    SeedStream stream(42);
    std::map<std::vector<int>, long long> freq;
    for (long long i = 0; i < draws; ++i) freq[sample_coupled_triple(inst, stream).iw_agent_order]++;
    std::vector<int> req = {1, 2, 2, 2, 2};
    std::vector<long long> counts;
    std::vector<double> probs;
    std::vector<int> order = {0, 1, 2, 3, 4};
    std::sort(order.begin(), order.end());
    do {
      double w = 1.0, rem = 0;
      for (int r : req) rem += 1.0 / r;
      for (int id : order) {
        double inv = 1.0 / req[std::size_t(id)];
        w *= inv / rem;
        rem -= inv;
      }
      probs.push_back(w);
      counts.push_back(freq[order]);
    } while (std::next_permutation(order.begin(), order.end()));
    double stat = chi_square_stat(counts, probs, draws);
    CHECK(chi_square_pvalue(stat, int(probs.size()) - 1) > 1e-3);
  }
}

TEST_CASE("pointwise dominance along the coupling") {
  SeedStream gen(5150);
  long long violations = 0;
  for (int t = 0; t < 20; ++t) {
    Instance inst = sample_bounded_instance(gen, 12, 4, false);
    for (int rep = 0; rep < 500; ++rep) {
      CoupledTriple triple = sample_coupled_triple(inst, gen);
      CoupledSuccess s = coupled_success(inst, triple);
      for (int g = 0; g < inst.m; ++g) {
        if (s.glr[std::size_t(g)] > s.iw[std::size_t(g)]) ++violations;
        if (s.iw[std::size_t(g)] > s.gl[std::size_t(g)]) ++violations;
      }
    }
  }
  CHECK(violations == 0);
}

TEST_CASE("waste bound: group lottery never strands s_max-1 tickets or more") {
  SeedStream gen(616);
  for (int t = 0; t < 300; ++t) {
    Instance inst = sample_bounded_instance(gen, 12, 4, false);
    ActionProfile profile = ActionProfile::group_declarations(inst);
    Allocation a = run_mechanism(Mechanism::GroupLottery, inst, profile, gen);
    long long unallocated = inst.k - a.total();
    CHECK(unallocated <= inst.max_size() - 1);
    CHECK(a.total() <= inst.k);
  }
}

TEST_CASE("sampler fast path replays run_mechanism outcome for outcome") {
  SeedStream gen(8541);
  for (int t = 0; t < 120; ++t) {
    Instance inst = sample_bounded_instance(gen, 10, 3, true);
    for (Mechanism mech :
         {Mechanism::GroupLottery, Mechanism::IndividualLottery, Mechanism::IndividualLotteryLimit,
          Mechanism::WeightedIndividualLottery, Mechanism::GroupLotteryReplacement,
          Mechanism::FairGroupLottery}) {
      int limit = mech == Mechanism::IndividualLotteryLimit ? 2 : 0;
      ActionProfile profile = default_profile(mech, inst, limit);
      MechanismSampler sampler(mech, inst, profile, limit);
      std::uint64_t seed = gen.next_u64();

      SeedStream s1(seed);
      Allocation a = run_mechanism(mech, inst, profile, s1, limit);
      auto reference = group_ticket_counts(inst, a);

      SeedStream s2(seed);
      MechanismSampler::Scratch scratch;
      std::vector<int> fast;
      sampler.sample_group_tickets(s2, scratch, fast);

      // prefix-equal sampling implies identical group tallies up to agents
      // past the budget, who receive nothing either way
      CHECK(fast == reference);
      CHECK(a.total() <= inst.k);
    }
  }
}

TEST_CASE("request validation") {
  Instance inst = make_instance(3, {1, 2, 2});
  ActionProfile profile = ActionProfile::group_requests(inst, inst.k);
  profile.requests[0] = 9;  // outside {1..k}
  SeedStream stream(1);
  CHECK_THROWS_AS(run_mechanism(Mechanism::IndividualLottery, inst, profile, stream), Error);
  profile.requests[0] = 0;
  CHECK_THROWS_AS(run_mechanism(Mechanism::IndividualLottery, inst, profile, stream), Error);
  profile.requests[0] = 3;  // over an ell=2 limit
  CHECK_THROWS_AS(run_mechanism(Mechanism::IndividualLotteryLimit, inst, profile, stream, 2),
                  Error);
}

TEST_CASE("no valid groups yields the empty allocation") {
  Instance inst = make_instance(2, {1, 1, 1});
  ActionProfile profile;
  profile.kind = ActionProfile::Kind::GroupDeclaration;
  profile.declarations = {{1}, {2}, {0}};  // nobody agrees with anybody
  SeedStream stream(7);
  Allocation a = run_mechanism(Mechanism::GroupLottery, inst, profile, stream);
  CHECK(a.total() == 0);
}

}  // TEST_SUITE
