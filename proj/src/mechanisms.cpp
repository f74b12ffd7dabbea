#include "lottery/mechanisms.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <string>

namespace lottery {

const char* mechanism_token(Mechanism mech) {
  switch (mech) {
    case Mechanism::GroupLottery: return "gl";
    case Mechanism::IndividualLottery: return "il";
    case Mechanism::IndividualLotteryLimit: return "il_limit";
    case Mechanism::WeightedIndividualLottery: return "iw";
    case Mechanism::GroupLotteryReplacement: return "glr";
    case Mechanism::FairGroupLottery: return "fair_gl";
  }
  return "?";
}

std::optional<Mechanism> mechanism_from_token(std::string_view token) {
  for (Mechanism mech :
       {Mechanism::GroupLottery, Mechanism::IndividualLottery, Mechanism::IndividualLotteryLimit,
        Mechanism::WeightedIndividualLottery, Mechanism::GroupLotteryReplacement,
        Mechanism::FairGroupLottery}) {
    if (token == mechanism_token(mech)) return mech;
  }
  return std::nullopt;
}

bool mechanism_uses_requests(Mechanism mech) {
  return mech == Mechanism::IndividualLottery || mech == Mechanism::IndividualLotteryLimit ||
         mech == Mechanism::WeightedIndividualLottery;
}

ActionProfile ActionProfile::group_declarations(const Instance& inst) {
  ActionProfile p;
  p.kind = Kind::GroupDeclaration;
  p.declarations.resize(std::size_t(inst.n));
  auto off = inst.offsets();
  for (int g = 0; g < inst.m; ++g) {
    std::vector<int> members(std::size_t(inst.group_sizes[g]));
    std::iota(members.begin(), members.end(), off[g]);
    for (int j = 0; j < inst.group_sizes[g]; ++j) p.declarations[std::size_t(off[g] + j)] = members;
  }
  return p;
}

ActionProfile ActionProfile::group_requests(const Instance& inst, int cap) {
  ActionProfile p;
  p.kind = Kind::TicketRequest;
  p.requests.resize(std::size_t(inst.n));
  auto ag = inst.agent_group();
  for (int i = 0; i < inst.n; ++i)
    p.requests[std::size_t(i)] = std::min(inst.group_sizes[std::size_t(ag[std::size_t(i)])], cap);
  return p;
}

ActionProfile default_profile(Mechanism mech, const Instance& inst, int limit) {
  switch (mech) {
    case Mechanism::GroupLottery:
    case Mechanism::GroupLotteryReplacement:
    case Mechanism::FairGroupLottery:
      return ActionProfile::group_declarations(inst);
    case Mechanism::IndividualLottery:
    case Mechanism::WeightedIndividualLottery:
      return ActionProfile::group_requests(inst, inst.k);
    case Mechanism::IndividualLotteryLimit:
      require(limit >= 1, Err::Config, "il_limit needs a positive limit");
      return ActionProfile::group_requests(inst, std::min(limit, inst.k));
  }
  fail(Err::Internal, "unhandled mechanism");
}

long long Allocation::total() const {
  long long t = 0;
  for (int v : x) t += v;
  return t;
}

std::vector<int> group_ticket_counts(const Instance& inst, const Allocation& a) {
  std::vector<int> t(std::size_t(inst.m), 0);
  auto ag = inst.agent_group();
  for (int i = 0; i < inst.n; ++i) t[std::size_t(ag[std::size_t(i)])] += a.x[std::size_t(i)];
  return t;
}

std::vector<char> group_success(const Instance& inst, const std::vector<int>& group_tickets) {
  std::vector<char> ok(std::size_t(inst.m), 0);
  for (int g = 0; g < inst.m; ++g)
    ok[std::size_t(g)] = group_tickets[std::size_t(g)] >= inst.group_sizes[std::size_t(g)];
  return ok;
}

std::vector<std::vector<int>> valid_groups(const ActionProfile& profile, int n_agents) {
  require(profile.kind == ActionProfile::Kind::GroupDeclaration, Err::Config,
          "valid groups are defined for group-declaration profiles");
  require(int(profile.declarations.size()) == n_agents, Err::Config,
          "declaration profile must cover every agent");
  std::set<std::vector<int>> candidates;
  for (const auto& d : profile.declarations) {
    std::vector<int> s = d;
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    for (int id : s)
      require(id >= 0 && id < n_agents, Err::ActionOutOfRange,
              "declared agent id " + std::to_string(id) + " out of range");
    if (!s.empty()) candidates.insert(std::move(s));
  }
  std::vector<std::vector<int>> out;
  for (const auto& s : candidates) {
    bool valid = true;
    for (int j : s) {
      std::vector<int> dj = profile.declarations[std::size_t(j)];
      std::sort(dj.begin(), dj.end());
      dj.erase(std::unique(dj.begin(), dj.end()), dj.end());
      if (dj != s) {
        valid = false;
        break;
      }
    }
    if (valid) out.push_back(s);
  }
  return out;
}

Allocation allocate_group_lottery(const std::vector<std::vector<int>>& groups_in_order, int k,
                                  int n_agents) {
  Allocation a{std::vector<int>(std::size_t(n_agents), 0)};
  long long used = 0;
  for (const auto& g : groups_in_order) {
    if (used + (long long)g.size() > k) break;  // this group gets nothing, lottery ends
    for (int i : g) a.x[std::size_t(i)] += 1;
    used += (long long)g.size();
  }
  return a;
}

Allocation allocate_individual(const std::vector<int>& agents_in_order,
                               const std::vector<int>& requests, int k) {
  Allocation a{std::vector<int>(requests.size(), 0)};
  long long prior = 0;  // predecessors' full requests, not their clamped grants
  for (int id : agents_in_order) {
    long long budget = std::max<long long>((long long)k - prior, 0);
    a.x[std::size_t(id)] = int(std::min<long long>(requests[std::size_t(id)], budget));
    prior += requests[std::size_t(id)];
  }
  return a;
}

DrawOrder sample_uniform_order(int count, SeedStream& stream) {
  DrawOrder d;
  d.law = DrawOrder::Law::UniformPerm;
  d.elements.resize(std::size_t(count));
  std::iota(d.elements.begin(), d.elements.end(), 0);
  stream.shuffle(d.elements);
  return d;
}

DrawOrder sample_uniform_order_split(int count, const std::vector<int>& subset,
                                     SeedStream& stream) {
  std::vector<char> in_subset(std::size_t(count), 0);
  for (int id : subset) {
    require(id >= 0 && id < count, Err::ParamViolation, "subset element out of range");
    require(!in_subset[std::size_t(id)], Err::ParamViolation, "subset element repeated");
    in_subset[std::size_t(id)] = 1;
  }
  std::vector<int> rest;
  for (int i = 0; i < count; ++i)
    if (!in_subset[std::size_t(i)]) rest.push_back(i);

  std::vector<int> sub = subset;
  stream.shuffle(sub);
  stream.shuffle(rest);

  // Uniform |S|-subset of positions: prefix of a partial shuffle, sorted.
  std::vector<int> pos(static_cast<std::size_t>(count));
  std::iota(pos.begin(), pos.end(), 0);
  for (std::size_t t = 0; t < sub.size() && t + 1 < pos.size(); ++t) {
    int j = int(t) + stream.uniform_int(count - int(t));
    std::swap(pos[t], pos[std::size_t(j)]);
  }
  pos.resize(sub.size());
  std::sort(pos.begin(), pos.end());

  DrawOrder d;
  d.law = DrawOrder::Law::UniformPerm;
  d.elements.assign(std::size_t(count), -1);
  for (std::size_t t = 0; t < sub.size(); ++t) d.elements[std::size_t(pos[t])] = sub[t];
  std::size_t r = 0;
  for (int i = 0; i < count; ++i)
    if (d.elements[std::size_t(i)] < 0) d.elements[std::size_t(i)] = rest[r++];
  return d;
}

DrawOrder sample_weighted_order(const std::vector<int>& requests, SeedStream& stream) {
  const int n = int(requests.size());
  DrawOrder d;
  d.law = DrawOrder::Law::WeightedPerm;
  std::vector<double> key(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    require(requests[std::size_t(i)] >= 1, Err::ActionOutOfRange, "requests must be positive");
    key[std::size_t(i)] = double(requests[std::size_t(i)]) * stream.exponential();
  }
  d.elements.resize(std::size_t(n));
  std::iota(d.elements.begin(), d.elements.end(), 0);
  std::sort(d.elements.begin(), d.elements.end(), [&](int a, int b) {
    if (key[std::size_t(a)] != key[std::size_t(b)]) return key[std::size_t(a)] < key[std::size_t(b)];
    return a < b;
  });
  d.scores.resize(std::size_t(n));
  for (int t = 0; t < n; ++t) d.scores[std::size_t(t)] = key[std::size_t(d.elements[std::size_t(t)])];
  return d;
}

std::vector<double> FairLottery::marginals(int m) const {
  std::vector<double> p(std::size_t(m), 0.0);
  for (const auto& e : support)
    for (int g : e.groups) p[std::size_t(g)] += e.weight;
  return p;
}

FairLottery build_fair_lottery(const Instance& inst) {
  const int m = inst.m;
  const double u_star = instance_stats(inst).benchmark_u_star;
  require(u_star > 0, Err::ParamViolation,
          "fair lottery needs k - s_max + 1 > 0 (got u* <= 0)");
  const double tol = 1e-12;

  std::vector<double> residual(std::size_t(m), u_star);
  double weight_used = 0;
  FairLottery lot;
  lot.u_star = u_star;

  std::vector<int> order(static_cast<std::size_t>(m));
  const int max_steps = 4 * m + 4;
  for (int step = 0; step < max_steps; ++step) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      if (residual[std::size_t(a)] != residual[std::size_t(b)])
        return residual[std::size_t(a)] > residual[std::size_t(b)];
      return a < b;
    });
    if (residual[std::size_t(order[0])] <= tol) {
      // all marginals met
      if (weight_used < 1.0 - tol)
        lot.support.push_back({std::vector<int>{}, 1.0 - weight_used});
      return lot;
    }

    long long capacity = inst.k;
    std::vector<int> pack;
    double min_in = 0, max_out = 0;
    for (int g : order) {
      if (residual[std::size_t(g)] <= tol) continue;
      if (inst.group_sizes[std::size_t(g)] <= capacity) {
        pack.push_back(g);
        capacity -= inst.group_sizes[std::size_t(g)];
        min_in = pack.size() == 1 ? residual[std::size_t(g)]
                                  : std::min(min_in, residual[std::size_t(g)]);
      } else {
        max_out = std::max(max_out, residual[std::size_t(g)]);
      }
    }
    if (pack.empty())
      fail(Err::DecompositionFailed, "no positive-residual group fits the capacity");

    // Largest weight keeping residuals nonnegative and the remaining problem
    // budget-feasible (every uncovered marginal must fit in 1 - W).
    double w = std::min(min_in, (1.0 - weight_used) - max_out);
    if (w <= tol) {
      std::string res = "residuals:";
      for (double r : residual) res += " " + std::to_string(r);
      fail(Err::DecompositionFailed, "greedy packing stalled; " + res);
    }
    std::sort(pack.begin(), pack.end());
    for (int g : pack) residual[std::size_t(g)] -= w;
    weight_used += w;
    // merge duplicate subsets
    bool merged = false;
    for (auto& e : lot.support)
      if (e.groups == pack) {
        e.weight += w;
        merged = true;
        break;
      }
    if (!merged) lot.support.push_back({std::move(pack), w});
  }
  fail(Err::DecompositionFailed, "greedy packing did not terminate");
}

CoupledTriple project_master_sequence(const Instance& inst, std::vector<int> master) {
  auto ag = inst.agent_group();
  CoupledTriple t;
  std::vector<char> seen_agent(std::size_t(inst.n), 0);
  std::vector<char> seen_group(std::size_t(inst.m), 0);
  for (int i : master) {
    require(i >= 0 && i < inst.n, Err::ParamViolation, "master sequence agent out of range");
    int g = ag[std::size_t(i)];
    t.glr_group_sequence.push_back(g);
    if (!seen_agent[std::size_t(i)]) {
      seen_agent[std::size_t(i)] = 1;
      t.iw_agent_order.push_back(i);
    }
    if (!seen_group[std::size_t(g)]) {
      seen_group[std::size_t(g)] = 1;
      t.gl_group_order.push_back(g);
    }
  }
  t.master_agents = std::move(master);
  return t;
}

CoupledTriple sample_coupled_triple(const Instance& inst, SeedStream& stream) {
  auto ag = inst.agent_group();
  // cumulative weights 1/|G_i| per agent; total is exactly m group-units
  std::vector<double> cdf(std::size_t(inst.n));
  double acc = 0;
  for (int i = 0; i < inst.n; ++i) {
    acc += 1.0 / double(inst.group_sizes[std::size_t(ag[std::size_t(i)])]);
    cdf[std::size_t(i)] = acc;
  }

  std::vector<int> master;
  std::vector<char> seen_agent(std::size_t(inst.n), 0);
  int agents_seen = 0;
  while (agents_seen < inst.n) {
    double u = stream.uniform01() * acc;
    int i = int(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
    if (i >= inst.n) i = inst.n - 1;
    master.push_back(i);
    if (!seen_agent[std::size_t(i)]) {
      seen_agent[std::size_t(i)] = 1;
      ++agents_seen;
    }
  }
  return project_master_sequence(inst, std::move(master));
}

CoupledSuccess coupled_success(const Instance& inst, const CoupledTriple& triple) {
  CoupledSuccess s;
  s.glr.assign(std::size_t(inst.m), 0);
  s.iw.assign(std::size_t(inst.m), 0);
  s.gl.assign(std::size_t(inst.m), 0);

  // replacement: serve repeated groups whole until one no longer fits
  long long used = 0;
  for (int g : triple.glr_group_sequence) {
    long long sz = inst.group_sizes[std::size_t(g)];
    if (used + sz > inst.k) break;
    s.glr[std::size_t(g)] = 1;
    used += sz;
  }

  // weighted individual: group-request allocation along the dedup agent order
  auto ag = inst.agent_group();
  std::vector<int> req(std::size_t(inst.n));
  for (int i = 0; i < inst.n; ++i)
    req[std::size_t(i)] = std::min(inst.group_sizes[std::size_t(ag[std::size_t(i)])], inst.k);
  Allocation a = allocate_individual(triple.iw_agent_order, req, inst.k);
  auto tickets = group_ticket_counts(inst, a);
  auto ok = group_success(inst, tickets);
  for (int g = 0; g < inst.m; ++g) s.iw[std::size_t(g)] = ok[std::size_t(g)];

  // plain group lottery on the dedup group order
  used = 0;
  for (int g : triple.gl_group_order) {
    long long sz = inst.group_sizes[std::size_t(g)];
    if (used + sz > inst.k) break;
    s.gl[std::size_t(g)] = 1;
    used += sz;
  }
  return s;
}

MechanismSampler::MechanismSampler(Mechanism mech, const Instance& inst,
                                   const ActionProfile& profile, int limit)
    : mech_(mech), inst_(&inst), limit_(limit) {
  agent_group_ = inst.agent_group();
  if (mechanism_uses_requests(mech)) {
    require(profile.kind == ActionProfile::Kind::TicketRequest, Err::Config,
            "request mechanisms need a ticket-request profile");
    require(int(profile.requests.size()) == inst.n, Err::Config,
            "request profile must cover every agent");
    int cap = inst.k;
    if (mech == Mechanism::IndividualLotteryLimit) {
      require(limit >= 1, Err::Config, "il_limit needs a positive limit");
      cap = std::min(limit, inst.k);
    }
    for (int r : profile.requests)
      require(r >= 1 && r <= cap, Err::ActionOutOfRange,
              "request " + std::to_string(r) + " outside {1.." + std::to_string(cap) + "}");
    requests_ = profile.requests;
  } else {
    require(profile.kind == ActionProfile::Kind::GroupDeclaration, Err::Config,
            "group mechanisms need a group-declaration profile");
    valid_ = valid_groups(profile, inst.n);
    for (const auto& vg : valid_) {
      valid_size_.push_back(int(vg.size()));
      std::map<int, int> comp;
      for (int i : vg) comp[agent_group_[std::size_t(i)]]++;
      valid_comp_.emplace_back(comp.begin(), comp.end());
    }
    if (mech == Mechanism::FairGroupLottery) {
      fair_ = build_fair_lottery(inst);
      double acc = 0;
      for (const auto& e : fair_.support) {
        acc += e.weight;
        fair_cdf_.push_back(acc);
      }
    }
  }
}

void MechanismSampler::sample_group_tickets(SeedStream& stream, Scratch& scratch,
                                            std::vector<int>& out) const {
  const Instance& inst = *inst_;
  out.assign(std::size_t(inst.m), 0);
  switch (mech_) {
    case Mechanism::GroupLottery: {
      const int v = int(valid_.size());
      if (int(scratch.pool.size()) != v) {
        scratch.pool.resize(std::size_t(v));
        std::iota(scratch.pool.begin(), scratch.pool.end(), 0);
      }
      scratch.undo.clear();
      long long used = 0;
      for (int t = 0; t < v; ++t) {
        if (t + 1 < v) {
          int j = t + stream.uniform_int(v - t);
          scratch.undo.emplace_back(t, j);
          std::swap(scratch.pool[std::size_t(t)], scratch.pool[std::size_t(j)]);
        }
        int vg = scratch.pool[std::size_t(t)];
        if (used + valid_size_[std::size_t(vg)] > inst.k) break;
        used += valid_size_[std::size_t(vg)];
        for (auto [g, c] : valid_comp_[std::size_t(vg)]) out[std::size_t(g)] += c;
      }
      for (auto it = scratch.undo.rbegin(); it != scratch.undo.rend(); ++it)
        std::swap(scratch.pool[std::size_t(it->first)], scratch.pool[std::size_t(it->second)]);
      break;
    }
    case Mechanism::IndividualLottery:
    case Mechanism::IndividualLotteryLimit: {
      const int n = inst.n;
      if (int(scratch.pool.size()) != n) {
        scratch.pool.resize(std::size_t(n));
        std::iota(scratch.pool.begin(), scratch.pool.end(), 0);
      }
      scratch.undo.clear();
      long long prior = 0;
      for (int t = 0; t < n && prior < inst.k; ++t) {
        if (t + 1 < n) {
          int j = t + stream.uniform_int(n - t);
          scratch.undo.emplace_back(t, j);
          std::swap(scratch.pool[std::size_t(t)], scratch.pool[std::size_t(j)]);
        }
        int id = scratch.pool[std::size_t(t)];
        long long budget = std::max<long long>((long long)inst.k - prior, 0);
        int got = int(std::min<long long>(requests_[std::size_t(id)], budget));
        if (got > 0) out[std::size_t(agent_group_[std::size_t(id)])] += got;
        prior += requests_[std::size_t(id)];
      }
      for (auto it = scratch.undo.rbegin(); it != scratch.undo.rend(); ++it)
        std::swap(scratch.pool[std::size_t(it->first)], scratch.pool[std::size_t(it->second)]);
      break;
    }
    case Mechanism::WeightedIndividualLottery: {
      const int n = inst.n;
      scratch.key.resize(std::size_t(n));
      for (int i = 0; i < n; ++i)
        scratch.key[std::size_t(i)] = double(requests_[std::size_t(i)]) * stream.exponential();
      scratch.order.resize(std::size_t(n));
      std::iota(scratch.order.begin(), scratch.order.end(), 0);
      std::sort(scratch.order.begin(), scratch.order.end(), [&](int a, int b) {
        if (scratch.key[std::size_t(a)] != scratch.key[std::size_t(b)])
          return scratch.key[std::size_t(a)] < scratch.key[std::size_t(b)];
        return a < b;
      });
      long long prior = 0;
      for (int id : scratch.order) {
        if (prior >= inst.k) break;
        long long budget = (long long)inst.k - prior;
        int got = int(std::min<long long>(requests_[std::size_t(id)], budget));
        out[std::size_t(agent_group_[std::size_t(id)])] += got;
        prior += requests_[std::size_t(id)];
      }
      break;
    }
    case Mechanism::GroupLotteryReplacement: {
      const int v = int(valid_.size());
      if (v == 0) break;
      long long used = 0;
      for (;;) {
        int vg = stream.uniform_int(v);
        if (used + valid_size_[std::size_t(vg)] > inst.k) break;
        used += valid_size_[std::size_t(vg)];
        for (auto [g, c] : valid_comp_[std::size_t(vg)]) out[std::size_t(g)] += c;
      }
      break;
    }
    case Mechanism::FairGroupLottery: {
      double u = stream.uniform01() * (fair_cdf_.empty() ? 1.0 : fair_cdf_.back());
      std::size_t idx =
          std::size_t(std::upper_bound(fair_cdf_.begin(), fair_cdf_.end(), u) - fair_cdf_.begin());
      if (idx >= fair_.support.size()) idx = fair_.support.size() - 1;
      for (int g : fair_.support[idx].groups)
        out[std::size_t(g)] += inst.group_sizes[std::size_t(g)];
      break;
    }
  }
}

Allocation MechanismSampler::sample_allocation(SeedStream& stream) const {
  const Instance& inst = *inst_;
  switch (mech_) {
    case Mechanism::GroupLottery: {
      DrawOrder order = sample_uniform_order(int(valid_.size()), stream);
      std::vector<std::vector<int>> seq;
      seq.reserve(valid_.size());
      for (int idx : order.elements) seq.push_back(valid_[std::size_t(idx)]);
      return allocate_group_lottery(seq, inst.k, inst.n);
    }
    case Mechanism::IndividualLottery:
    case Mechanism::IndividualLotteryLimit: {
      DrawOrder order = sample_uniform_order(inst.n, stream);
      return allocate_individual(order.elements, requests_, inst.k);
    }
    case Mechanism::WeightedIndividualLottery: {
      DrawOrder order = sample_weighted_order(requests_, stream);
      return allocate_individual(order.elements, requests_, inst.k);
    }
    case Mechanism::GroupLotteryReplacement: {
      Allocation a{std::vector<int>(std::size_t(inst.n), 0)};
      const int v = int(valid_.size());
      if (v == 0) return a;
      long long used = 0;
      for (;;) {
        int vg = stream.uniform_int(v);
        if (used + valid_size_[std::size_t(vg)] > inst.k) break;
        used += valid_size_[std::size_t(vg)];
        for (int i : valid_[std::size_t(vg)]) a.x[std::size_t(i)] += 1;
      }
      return a;
    }
    case Mechanism::FairGroupLottery: {
      Allocation a{std::vector<int>(std::size_t(inst.n), 0)};
      double u = stream.uniform01() * (fair_cdf_.empty() ? 1.0 : fair_cdf_.back());
      std::size_t idx =
          std::size_t(std::upper_bound(fair_cdf_.begin(), fair_cdf_.end(), u) - fair_cdf_.begin());
      if (idx >= fair_.support.size()) idx = fair_.support.size() - 1;
      auto off = inst.offsets();
      for (int g : fair_.support[idx].groups)
        for (int j = 0; j < inst.group_sizes[std::size_t(g)]; ++j)
          a.x[std::size_t(off[std::size_t(g)] + j)] = 1;
      return a;
    }
  }
  fail(Err::Internal, "unhandled mechanism");
}

Allocation run_mechanism(Mechanism mech, const Instance& inst, const ActionProfile& profile,
                         SeedStream& stream, int limit) {
  MechanismSampler sampler(mech, inst, profile, limit);
  return sampler.sample_allocation(stream);
}

}  // namespace lottery
