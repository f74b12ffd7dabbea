#include "lottery/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "lottery/hitting.hpp"

namespace lottery {

double g_of(double x) {
  require(x >= 0, Err::Domain, "g is used on nonnegative arguments only");
  if (x == 0) return 1.0;
  return -std::expm1(-x) / x;
}

static double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

double BoundRecord::gl_eff() const { return clamp01(gl_eff_raw); }
double BoundRecord::gl_fair() const { return clamp01(gl_fair_raw); }
double BoundRecord::iw_eff() const { return clamp01(iw_eff_raw); }
double BoundRecord::iw_fair() const { return clamp01(iw_fair_raw); }
double BoundRecord::benchmark_eff() const { return clamp01(benchmark_eff_raw); }
double BoundRecord::il_limit() const { return clamp01(il_limit_raw); }

BoundRecord bounds(const Instance& inst, std::optional<int> ell) {
  InstanceStats st = instance_stats(inst);
  BoundRecord rec;
  rec.kappa = st.kappa_hat;
  rec.alpha = st.alpha_hat;
  rec.g_alpha = g_of(st.alpha_hat);
  rec.gl_eff_raw = 1.0 - rec.kappa;
  rec.gl_fair_raw = 1.0 - 2.0 * rec.kappa;
  rec.iw_eff_raw = (1.0 - rec.kappa) * rec.g_alpha;
  rec.iw_fair_raw = (1.0 - 2.0 * rec.kappa) * rec.g_alpha;
  rec.benchmark_eff_raw = 1.0 - rec.kappa;
  if (ell) {
    require(*ell >= 1, Err::Config, "limit must be positive");
    rec.ell = *ell;
    rec.il_limit_applicable = st.s_max <= *ell;
    rec.il_limit_raw = 1.0 / double(*ell);
  }
  return rec;
}

HittingCheck hitting_time_check(const std::vector<int>& sizes, int k, HittingMethod method,
                                std::uint64_t seed, long long mc_samples) {
  require(!sizes.empty(), Err::EmptyGroups, "need at least one size");
  long long total = 0;
  int s_max = 0;
  for (int s : sizes) {
    require(s >= 1, Err::NonPositive, "sizes must be positive");
    total += s;
    s_max = std::max(s_max, s);
  }
  require(k >= 1 && k <= total, Err::InsufficientTotal,
          "budget must lie in [1, total sizes]");

  const double mu = double(total) / double(sizes.size());
  HittingCheck check;
  check.lower = 1.0 + double(k - s_max) / mu;
  check.upper = double(k + s_max - 1) / mu;

  SizeMultiset ms = to_multiset(sizes);
  double tolerance = 1e-9;
  if (method == HittingMethod::Exact) {
    check.e_tau = expected_hitting_index(ms, k, /*clamp_short=*/false);
  } else {
    require(mc_samples >= 1, Err::Config, "need at least one sample");
    SeedStream stream(seed);
    std::vector<int> order = sizes;
    double sum = 0, sum_sq = 0;
    for (long long r = 0; r < mc_samples; ++r) {
      stream.shuffle(order);
      double tau = hitting_index(k, order);
      sum += tau;
      sum_sq += tau * tau;
    }
    check.e_tau = sum / double(mc_samples);
    double var = std::max(0.0, sum_sq / double(mc_samples) - check.e_tau * check.e_tau);
    tolerance = 3.0 * std::sqrt(var / double(mc_samples)) + 1e-9;
  }
  check.within =
      check.e_tau >= check.lower - tolerance && check.e_tau <= check.upper + tolerance;

  // Subadditivity uses exact expectations for every compatible split.
  if (total <= 4096) {
    std::vector<double> e_at(std::size_t(total) + 1, 0.0);
    for (long long c = 1; c <= total; ++c)
      e_at[std::size_t(c)] = expected_hitting_index(ms, c, /*clamp_short=*/false);
    for (int k2 = 1; k + k2 <= total; ++k2) {
      HittingCheck::Pair pair;
      pair.k1 = k;
      pair.k2 = k2;
      pair.lhs = e_at[std::size_t(k)] + e_at[std::size_t(k2)];
      pair.rhs = e_at[std::size_t(k + k2)];
      pair.holds = pair.lhs >= pair.rhs - 1e-9;
      check.subadditivity.push_back(pair);
    }
  }
  return check;
}

ExtendedReal threshold_cutoff(int k, int group_size, std::vector<WeightedScore> outsiders) {
  require(group_size >= 1, Err::NonPositive, "group size must be positive");
  const long long slack = (long long)k - group_size;
  if (slack < 0) return ExtendedReal{0.0, false};  // success impossible, empty cut
  std::sort(outsiders.begin(), outsiders.end(),
            [](const WeightedScore& a, const WeightedScore& b) { return a.score < b.score; });
  long long acc = 0;
  for (const auto& o : outsiders) {
    require(o.request >= 1, Err::ActionOutOfRange, "outsider requests must be positive");
    acc += o.request;
    if (acc > slack) return ExtendedReal{o.score, false};
  }
  return ExtendedReal{0.0, true};  // outsiders can never exhaust the budget
}

bool threshold_success(const std::vector<WeightedScore>& members, int group_size,
                       const ExtendedReal& threshold) {
  long long covered = 0;
  for (const auto& ws : members)
    if (threshold.plus_infinity || ws.score < threshold.value) covered += ws.request;
  return covered >= group_size;
}

std::vector<std::vector<int>> enumerate_br(int s, int r) {
  require(s >= 1 && s <= 6, Err::TooLarge, "request-class enumeration is limited to s <= 6");
  require(r >= 0 && r < s, Err::Domain, "class index must lie in {0,...,s-1}");
  std::vector<std::vector<int>> out;
  std::vector<int> cur(static_cast<std::size_t>(s));
  // non-decreasing vectors over {1..s}
  auto emit = [&]() {
    long long head = 0;  // smallest r+1 entries
    for (int i = 0; i <= r; ++i) head += cur[std::size_t(i)];
    if (head < s) return;
    if (r >= 1) {
      long long tail = 0;  // largest r entries
      for (int i = s - r; i < s; ++i) tail += cur[std::size_t(i)];
      if (tail > s - 1) return;
    }
    out.push_back(cur);
  };
  auto rec = [&](auto&& self, int idx, int lo) -> void {
    if (idx == s) {
      emit();
      return;
    }
    for (int v = lo; v <= s; ++v) {
      cur[std::size_t(idx)] = v;
      self(self, idx + 1, v);
    }
  };
  rec(rec, 0, 1);
  return out;
}

bool reciprocal_sum_within(const std::vector<int>& requests, int r) {
  const long long scale = 60;  // lcm(1..6); requests here never exceed 6
  long long acc = 0;
  for (int a : requests) {
    require(a >= 1 && a <= 6, Err::Domain, "exact reciprocal check expects requests in 1..6");
    acc += scale / a;
  }
  return acc <= scale * (long long)(r + 1);
}

ConjectureProbe conjecture_probe(int s, const std::vector<int>& strategy, double threshold,
                                 long long replicas, std::uint64_t seed) {
  require(s >= 1, Err::NonPositive, "group size must be positive");
  require(int(strategy.size()) == s, Err::Config, "strategy must cover the whole group");
  for (int a : strategy) require(a >= 1, Err::ActionOutOfRange, "requests must be positive");
  require(threshold >= 0 && std::isfinite(threshold), Err::Domain,
          "probe needs a finite nonnegative threshold");
  require(replicas >= 1, Err::Config, "need at least one replica");

  SeedStream stream(seed);
  long long hits = 0;
  for (long long r = 0; r < replicas; ++r) {
    long long covered = 0;
    for (int i = 0; i < s; ++i) {
      double score = double(strategy[std::size_t(i)]) * stream.exponential();
      if (score < threshold) covered += strategy[std::size_t(i)];
    }
    if (covered >= s) ++hits;
  }
  ConjectureProbe probe;
  probe.p_success = double(hits) / double(replicas);
  probe.se = std::sqrt(probe.p_success * (1.0 - probe.p_success) / double(replicas));
  probe.p_group_request = -std::expm1(-threshold);
  return probe;
}

double poisson_tail_bound(double lambda, double x) {
  require(lambda >= 0, Err::Domain, "rate must be nonnegative");
  require(x > 0 && x >= lambda, Err::Domain, "bound holds for x >= lambda, x > 0");
  return -std::expm1(-lambda / x);
}

Example1ClosedForms example1_closed_forms(int m) {
  require(m >= 4, Err::Domain, "closed forms need m >= 4");
  Example1ClosedForms cf;
  cf.u_group_request = 1.0 - 1.0 / double(m);

  // sum over the step at which the first large-group member is drawn
  long double sum = 0.0L, comp = 0.0L;
  long double front = 1.0L;  // prob no member drawn in steps 1..t-1
  for (int t = 1; t <= m; ++t) {
    long double term = front * (2.0L / (long double)(m + 2 - t));
    long double back = 1.0L;  // remaining singles all beat the last three members
    for (int i = t; i <= m - 1; ++i)
      back *= (long double)(m - i) / ((long double)(m - i) + 1.5L);
    term *= back;
    long double y = term - comp;
    long double s2 = sum + y;
    comp = (s2 - sum) - y;
    sum = s2;
    front *= (long double)(m - t) / (long double)(m + 2 - t);
  }
  cf.u_all_twos = double(1.0L - sum);
  return cf;
}

double spl_tight_closed_form(long long m, long long s, const Rational& alpha) {
  require(m >= 1 && s >= 1, Err::ParamViolation, "need m, s >= 1");
  require(alpha.num > 0 && alpha.num < alpha.den, Err::ParamViolation,
          "alpha must lie strictly between 0 and 1");
  require(alpha.num * m % alpha.den == 0, Err::ParamViolation, "alpha*m must be integral");
  const long long draws = alpha.num * m / alpha.den;
  long double prod = 1.0L;
  for (long long i = 0; i < draws; ++i)
    prod *= 1.0L - 1.0L / ((long double)m - (long double)i / (long double)s);
  long double inv_alpha = (long double)alpha.den / (long double)alpha.num;
  return double(inv_alpha * (1.0L - prod));
}

namespace {

std::vector<int> group_members(const Instance& inst, int g) {
  auto off = inst.offsets();
  std::vector<int> members(std::size_t(inst.group_sizes[std::size_t(g)]));
  std::iota(members.begin(), members.end(), off[std::size_t(g)]);
  return members;
}

ActionProfile apply_action(const Instance& inst, int target, const ActionProfile& opponents,
                           const GroupAction& action, bool request_kind) {
  ActionProfile profile = opponents;
  auto members = group_members(inst, target);
  if (request_kind) {
    require(action.requests.size() == members.size(), Err::Config,
            "action must assign one request per member");
    for (std::size_t i = 0; i < members.size(); ++i)
      profile.requests[std::size_t(members[i])] = action.requests[i];
  } else {
    require(action.declarations.size() == members.size(), Err::Config,
            "action must assign one declaration per member");
    for (std::size_t i = 0; i < members.size(); ++i)
      profile.declarations[std::size_t(members[i])] = action.declarations[i];
  }
  return profile;
}

}  // namespace

BestResponseResult best_response_search(Mechanism mech, const Instance& inst, int target_group,
                                        const ActionProfile& opponents,
                                        const std::vector<GroupAction>& universe, int limit) {
  require(target_group >= 0 && target_group < inst.m, Err::Config, "target group out of range");
  require(!universe.empty(), Err::Config, "empty action universe");
  require(universe.size() <= 200000, Err::TooLarge, "action universe capped at 2e5 entries");
  const bool request_kind = mechanism_uses_requests(mech);

  BestResponseResult result;
  bool first = true;
  for (const auto& action : universe) {
    ActionProfile profile = apply_action(inst, target_group, opponents, action, request_kind);
    UtilityVector util = exact_enumerate(mech, inst, profile, limit);
    double u = util.u[std::size_t(target_group)];
    if (first || u > result.best_utility + 1e-12) {
      result.best_utility = u;
      result.maximizers.clear();
      result.maximizers.push_back(action);
    } else if (std::abs(u - result.best_utility) <= 1e-12) {
      result.maximizers.push_back(action);
    }
    first = false;
  }

  GroupAction truthful;
  const int size = inst.group_sizes[std::size_t(target_group)];
  if (request_kind) {
    int cap = mech == Mechanism::IndividualLotteryLimit ? std::min(limit, inst.k) : inst.k;
    truthful.requests.assign(std::size_t(size), std::min(size, cap));
  } else {
    auto members = group_members(inst, target_group);
    truthful.declarations.assign(std::size_t(size), members);
  }
  ActionProfile profile = apply_action(inst, target_group, opponents, truthful, request_kind);
  result.group_request_utility =
      exact_enumerate(mech, inst, profile, limit).u[std::size_t(target_group)];
  return result;
}

std::vector<GroupAction> request_action_universe(int group_size, int cap) {
  require(group_size >= 1 && cap >= 1, Err::Config, "need positive group size and cap");
  std::vector<GroupAction> universe;
  std::vector<int> cur(static_cast<std::size_t>(group_size));
  auto rec = [&](auto&& self, int idx, int lo) -> void {
    if (idx == group_size) {
      universe.push_back(GroupAction{cur, {}});
      return;
    }
    for (int v = lo; v <= cap; ++v) {
      cur[std::size_t(idx)] = v;
      self(self, idx + 1, v);
    }
  };
  rec(rec, 0, 1);
  return universe;
}

std::vector<GroupAction> gl_action_universe(const Instance& inst, int target_group) {
  auto members = group_members(inst, target_group);
  const int s = int(members.size());
  require(s <= 6, Err::TooLarge, "partition universe is limited to groups of size 6");

  std::vector<GroupAction> universe;
  std::vector<int> block_of(static_cast<std::size_t>(s));
  auto emit_partition = [&](int n_blocks) {
    std::vector<std::vector<int>> blocks(static_cast<std::size_t>(n_blocks));
    for (int i = 0; i < s; ++i) blocks[std::size_t(block_of[std::size_t(i)])].push_back(members[std::size_t(i)]);
    GroupAction base;
    base.declarations.resize(std::size_t(s));
    for (int i = 0; i < s; ++i)
      base.declarations[std::size_t(i)] = blocks[std::size_t(block_of[std::size_t(i)])];
    universe.push_back(base);
    // one-outsider variants: one block additionally names a non-member
    for (int b = 0; b < n_blocks; ++b) {
      for (int outsider = 0; outsider < inst.n; ++outsider) {
        if (std::binary_search(members.begin(), members.end(), outsider)) continue;
        GroupAction variant = base;
        std::vector<int> widened = blocks[std::size_t(b)];
        widened.push_back(outsider);
        std::sort(widened.begin(), widened.end());
        for (int i = 0; i < s; ++i)
          if (block_of[std::size_t(i)] == b) variant.declarations[std::size_t(i)] = widened;
        universe.push_back(std::move(variant));
      }
    }
  };
  // restricted growth strings enumerate set partitions once each
  auto rec = [&](auto&& self, int idx, int max_used) -> void {
    if (idx == s) {
      emit_partition(max_used + 1);
      return;
    }
    for (int b = 0; b <= max_used + 1; ++b) {
      block_of[std::size_t(idx)] = b;
      self(self, idx + 1, std::max(max_used, b));
    }
  };
  block_of[0] = 0;
  rec(rec, 1, 0);
  return universe;
}

}  // namespace lottery
