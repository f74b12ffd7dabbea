#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lottery/error.hpp"
#include "lottery/rng.hpp"

namespace lottery {

// k identical tickets and a partition of agents into groups. Agents are
// canonical (group index, member index) pairs; group g occupies the id range
// [offset(g), offset(g)+size). Everything downstream is label-invariant.
struct Instance {
  int k = 0;
  std::vector<int> group_sizes;
  int n = 0;  // total agents
  int m = 0;  // number of groups

  int max_size() const;
  std::vector<int> offsets() const;      // group -> first agent id
  std::vector<int> agent_group() const;  // agent id -> group index
};

// Rejects empty partitions, nonpositive values, and n <= k (scarcity is a
// standing assumption of every formula downstream).
Instance make_instance(int k, std::vector<int> group_sizes);

struct FamilyParams {
  double kappa = 0;  // cap on (max group size - 1)/k
  double alpha = 0;  // cap on k/n
};

struct InstanceStats {
  double kappa_hat = 0;
  double alpha_hat = 0;
  int s_max = 0;
  double benchmark_u_star = 0;  // (k - s_max + 1)/n, can be <= 0 when k < s_max - 1
};

InstanceStats instance_stats(const Instance& inst);
bool in_family(const InstanceStats& st, const FamilyParams& fp);

// Exact rational, used where integrality of alpha*m style conditions matters.
struct Rational {
  long long num = 0;
  long long den = 1;
};
Rational parse_rational(const std::string& text);  // "p/q", "0.25", "3"
double rational_value(const Rational& r);

enum class ConstructionTag {
  GlTight,
  IlBad,
  IlLimitBad,
  SplExample,
  SplTight,
  HamiltonLike,
  BigSurLike,
};

const char* construction_tag_token(ConstructionTag tag);
std::optional<ConstructionTag> construction_tag_from_token(std::string_view token);

// Parameters are tag-specific; unused fields stay zero.
//   GlTight(r, m)        k = 2r-1, one single, m-1 couples
//   IlBad(r, s, alpha)   k = floor(alpha*r)*s, one group of s, s(r-1) singles
//   IlLimitBad(ell,m,k)  one single, m-1 groups of ell+1
//   SplExample(n)        k = n-1, one group of 4, n-4 singles
//   SplTight(m,s,alpha)  k = alpha*m*s (alpha*m must be integral), m groups of s
//   HamiltonLike(n,k)    singles/couples mix, defaults n=10000 k=21
//   BigSurLike(n,k,s)    sizes cycling 2..s, defaults n=1296 k=702 s=15
struct NamedConstruction {
  ConstructionTag tag{};
  long long r = 0, m = 0, s = 0, ell = 0, n = 0, k = 0;
  Rational alpha{0, 1};
};

Instance generate_named(const NamedConstruction& spec);

struct SizeLaw {
  int min_size = 1;
  int max_size = 1;
  std::vector<double> weights;  // per size in [min,max]; empty = uniform
};

struct KRule {
  bool use_alpha = false;
  long long fixed_k = 0;
  double alpha = 0;  // k = floor(alpha * n)
};

// Pure function of its arguments: same inputs, same instance.
Instance generate_random(int n_groups, const SizeLaw& law, const KRule& k_rule, std::uint64_t seed);

// Small random instances for property suites; rejection-samples until
// n <= max_agents, optionally forcing k >= s_max so every mechanism's
// success probabilities stay bounded away from zero.
Instance sample_bounded_instance(SeedStream& stream, int max_agents, int max_size,
                                 bool k_at_least_max_size);

}  // namespace lottery
