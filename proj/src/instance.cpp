#include "lottery/instance.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <numeric>

namespace lottery {

int Instance::max_size() const {
  return group_sizes.empty() ? 0 : *std::max_element(group_sizes.begin(), group_sizes.end());
}

std::vector<int> Instance::offsets() const {
  std::vector<int> off(group_sizes.size());
  int acc = 0;
  for (std::size_t g = 0; g < group_sizes.size(); ++g) {
    off[g] = acc;
    acc += group_sizes[g];
  }
  return off;
}

std::vector<int> Instance::agent_group() const {
  std::vector<int> ag(n);
  int id = 0;
  for (int g = 0; g < m; ++g)
    for (int j = 0; j < group_sizes[g]; ++j) ag[id++] = g;
  return ag;
}

Instance make_instance(int k, std::vector<int> group_sizes) {
  require(!group_sizes.empty(), Err::EmptyGroups, "instance needs at least one group");
  require(k >= 1, Err::NonPositive, "ticket count must be positive");
  long long n = 0;
  for (int s : group_sizes) {
    require(s >= 1, Err::NonPositive, "every group size must be positive");
    n += s;
  }
  require(n > k, Err::DemandNotExceedingSupply,
          "total demand n=" + std::to_string(n) + " must strictly exceed k=" + std::to_string(k));
  Instance inst;
  inst.k = k;
  inst.group_sizes = std::move(group_sizes);
  inst.n = int(n);
  inst.m = int(inst.group_sizes.size());
  return inst;
}

InstanceStats instance_stats(const Instance& inst) {
  InstanceStats st;
  st.s_max = inst.max_size();
  st.kappa_hat = double(st.s_max - 1) / inst.k;
  st.alpha_hat = double(inst.k) / inst.n;
  st.benchmark_u_star = double(inst.k - st.s_max + 1) / inst.n;
  return st;
}

bool in_family(const InstanceStats& st, const FamilyParams& fp) {
  const double eps = 1e-12;
  return st.kappa_hat <= fp.kappa + eps && st.alpha_hat <= fp.alpha + eps;
}

static long long gcd_ll(long long a, long long b) {
  while (b != 0) {
    long long t = a % b;
    a = b;
    b = t;
  }
  return a < 0 ? -a : a;
}

static Rational normalized(long long num, long long den) {
  require(den != 0, Err::ParamViolation, "rational with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  long long g = gcd_ll(num == 0 ? den : num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  return Rational{num, den};
}

Rational parse_rational(const std::string& text) {
  std::string t = text;
  t.erase(std::remove_if(t.begin(), t.end(), [](unsigned char c) { return std::isspace(c); }),
          t.end());
  require(!t.empty(), Err::ParamViolation, "empty rational");
  auto slash = t.find('/');
  if (slash != std::string::npos) {
    long long p = std::strtoll(t.substr(0, slash).c_str(), nullptr, 10);
    long long q = std::strtoll(t.substr(slash + 1).c_str(), nullptr, 10);
    return normalized(p, q);
  }
  auto dot = t.find('.');
  if (dot == std::string::npos) return normalized(std::strtoll(t.c_str(), nullptr, 10), 1);
  std::string digits = t.substr(0, dot) + t.substr(dot + 1);
  int frac_len = int(t.size() - dot - 1);
  require(frac_len <= 15, Err::ParamViolation, "too many decimal places in " + text);
  long long p = std::strtoll(digits.c_str(), nullptr, 10);
  long long q = 1;
  for (int i = 0; i < frac_len; ++i) q *= 10;
  return normalized(p, q);
}

double rational_value(const Rational& r) { return double(r.num) / double(r.den); }

const char* construction_tag_token(ConstructionTag tag) {
  switch (tag) {
    case ConstructionTag::GlTight: return "gl_tight";
    case ConstructionTag::IlBad: return "il_bad";
    case ConstructionTag::IlLimitBad: return "il_limit_bad";
    case ConstructionTag::SplExample: return "spl_example";
    case ConstructionTag::SplTight: return "spl_tight";
    case ConstructionTag::HamiltonLike: return "hamilton_like";
    case ConstructionTag::BigSurLike: return "big_sur_like";
  }
  return "?";
}

std::optional<ConstructionTag> construction_tag_from_token(std::string_view token) {
  for (ConstructionTag tag :
       {ConstructionTag::GlTight, ConstructionTag::IlBad, ConstructionTag::IlLimitBad,
        ConstructionTag::SplExample, ConstructionTag::SplTight, ConstructionTag::HamiltonLike,
        ConstructionTag::BigSurLike}) {
    if (token == construction_tag_token(tag)) return tag;
  }
  return std::nullopt;
}

static void check_alpha_open_unit(const Rational& a, const char* where) {
  require(a.num > 0 && a.num < a.den, Err::ParamViolation,
          std::string(where) + " needs alpha strictly between 0 and 1");
}

Instance generate_named(const NamedConstruction& spec) {
  switch (spec.tag) {
    case ConstructionTag::GlTight: {
      require(spec.r >= 1, Err::ParamViolation, "gl_tight needs r >= 1");
      require(spec.m >= spec.r + 1, Err::ParamViolation,
              "gl_tight needs m > r so that demand exceeds supply");
      std::vector<int> sizes{1};
      sizes.insert(sizes.end(), std::size_t(spec.m - 1), 2);
      return make_instance(int(2 * spec.r - 1), std::move(sizes));
    }
    case ConstructionTag::IlBad: {
      require(spec.r >= 1 && spec.s >= 1, Err::ParamViolation, "il_bad needs r,s >= 1");
      check_alpha_open_unit(spec.alpha, "il_bad");
      long long floor_ar = spec.alpha.num * spec.r / spec.alpha.den;
      require(floor_ar >= 1, Err::ParamViolation, "il_bad needs floor(alpha*r) >= 1");
      long long k = floor_ar * spec.s;
      std::vector<int> sizes{int(spec.s)};
      sizes.insert(sizes.end(), std::size_t(spec.s * (spec.r - 1)), 1);
      return make_instance(int(k), std::move(sizes));
    }
    case ConstructionTag::IlLimitBad: {
      require(spec.ell >= 1, Err::ParamViolation, "il_limit_bad needs ell >= 1");
      require(spec.m >= 2, Err::ParamViolation, "il_limit_bad needs m >= 2");
      require(spec.k >= 1, Err::ParamViolation, "il_limit_bad needs k >= 1");
      std::vector<int> sizes{1};
      sizes.insert(sizes.end(), std::size_t(spec.m - 1), int(spec.ell + 1));
      return make_instance(int(spec.k), std::move(sizes));
    }
    case ConstructionTag::SplExample: {
      require(spec.n >= 5, Err::ParamViolation, "spl_example needs n >= 5");
      std::vector<int> sizes{4};
      sizes.insert(sizes.end(), std::size_t(spec.n - 4), 1);
      return make_instance(int(spec.n - 1), std::move(sizes));
    }
    case ConstructionTag::SplTight: {
      require(spec.m >= 1 && spec.s >= 1, Err::ParamViolation, "spl_tight needs m,s >= 1");
      check_alpha_open_unit(spec.alpha, "spl_tight");
      require(spec.alpha.num * spec.m % spec.alpha.den == 0, Err::ParamViolation,
              "spl_tight needs alpha*m integral");
      long long k = spec.alpha.num * spec.m / spec.alpha.den * spec.s;
      require(k >= 1, Err::ParamViolation, "spl_tight needs alpha*m >= 1");
      std::vector<int> sizes(std::size_t(spec.m), int(spec.s));
      return make_instance(int(k), std::move(sizes));
    }
    case ConstructionTag::HamiltonLike: {
      long long n = spec.n > 0 ? spec.n : 10000;
      long long k = spec.k > 0 ? spec.k : 21;
      require(n >= 3, Err::ParamViolation, "hamilton_like needs n >= 3");
      long long couples = n / 3;
      long long singles = n - 2 * couples;
      std::vector<int> sizes(std::size_t(singles), 1);
      sizes.insert(sizes.end(), std::size_t(couples), 2);
      return make_instance(int(k), std::move(sizes));
    }
    case ConstructionTag::BigSurLike: {
      long long n = spec.n > 0 ? spec.n : 1296;
      long long k = spec.k > 0 ? spec.k : 702;
      long long s_max = spec.s > 0 ? spec.s : 15;
      require(s_max >= 2 && n > s_max, Err::ParamViolation, "big_sur_like needs n > s_max >= 2");
      std::vector<int> sizes{int(s_max)};
      long long remaining = n - s_max;
      int cycle = 2;
      while (remaining > 0) {
        int sz = int(std::min<long long>(cycle, remaining));
        sizes.push_back(sz);
        remaining -= sz;
        cycle = cycle >= s_max ? 2 : cycle + 1;
      }
      return make_instance(int(k), std::move(sizes));
    }
  }
  fail(Err::Internal, "unhandled construction tag");
}

Instance generate_random(int n_groups, const SizeLaw& law, const KRule& k_rule,
                         std::uint64_t seed) {
  require(n_groups >= 1, Err::NonPositive, "need at least one group");
  require(law.min_size >= 1 && law.max_size >= law.min_size, Err::ParamViolation,
          "size law needs 1 <= min <= max");
  const int span = law.max_size - law.min_size + 1;
  std::vector<double> w = law.weights;
  if (w.empty()) w.assign(std::size_t(span), 1.0);
  require(int(w.size()) == span, Err::ParamViolation, "size law needs one weight per size");
  double total_w = 0;
  for (double x : w) {
    require(x >= 0, Err::ParamViolation, "weights must be nonnegative");
    total_w += x;
  }
  require(total_w > 0, Err::ParamViolation, "weights must not all be zero");

  SeedStream stream(seed);
  std::vector<int> sizes(static_cast<std::size_t>(n_groups));
  long long n = 0;
  for (auto& s : sizes) {
    double u = stream.uniform01() * total_w;
    int pick = span - 1;
    double acc = 0;
    for (int i = 0; i < span; ++i) {
      acc += w[std::size_t(i)];
      if (u < acc) {
        pick = i;
        break;
      }
    }
    s = law.min_size + pick;
    n += s;
  }
  long long k = k_rule.use_alpha ? (long long)(k_rule.alpha * double(n)) : k_rule.fixed_k;
  require(k >= 1, Err::NonPositive, "k rule produced a nonpositive ticket count");
  require(n > k, Err::DemandNotExceedingSupply,
          "random draw yielded n=" + std::to_string(n) + " <= k=" + std::to_string(k) +
              "; retry with a new seed or more groups");
  return make_instance(int(k), std::move(sizes));
}

Instance sample_bounded_instance(SeedStream& stream, int max_agents, int max_size,
                                 bool k_at_least_max_size) {
  for (;;) {
    int m = 1 + stream.uniform_int(std::max(1, max_agents / 2));
    std::vector<int> sizes(static_cast<std::size_t>(m));
    int n = 0;
    for (auto& s : sizes) {
      s = 1 + stream.uniform_int(max_size);
      n += s;
    }
    if (n > max_agents || n < 2) continue;
    int s_max = *std::max_element(sizes.begin(), sizes.end());
    int k_lo = k_at_least_max_size ? s_max : 1;
    if (k_lo > n - 1) continue;
    int k = k_lo + stream.uniform_int(n - k_lo);
    return make_instance(k, std::move(sizes));
  }
}

}  // namespace lottery
