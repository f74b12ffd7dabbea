// lotteryctl: generate instances, evaluate lottery mechanisms, check the
// worst-case bounds, run the invariant suites, and sweep parameter grids.
// All stochastic commands take an explicit 64-bit seed; outputs are
// byte-identical across runs and worker counts.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "lottery/analysis.hpp"
#include "lottery/evaluation.hpp"
#include "lottery/instance.hpp"
#include "lottery/mechanisms.hpp"
#include "lottery/report.hpp"
#include "lottery/stats.hpp"

using namespace lottery;
using nlohmann::json;

namespace {

struct Output {
  std::optional<std::string> path;
  std::ostringstream buffer;

  template <class T>
  Output& operator<<(const T& v) {
    buffer << v;
    return *this;
  }

  void flush() {
    if (path)
      write_text_file(*path, buffer.str());
    else
      std::cout << buffer.str();
  }
};

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

std::vector<long long> split_ints(const std::string& text) {
  std::vector<long long> out;
  for (const auto& tok : split_list(text)) out.push_back(std::stoll(tok));
  return out;
}

struct LoadedInstance {
  Instance inst;
  std::string id;
};

LoadedInstance load_instance(const std::string& path) {
  std::string text = read_text_file(path);
  LoadedInstance li{json_text_is_named_construction(text)
                        ? generate_named(named_construction_from_json_text(text))
                        : instance_from_json_text(text),
                    std::filesystem::path(path).stem().string()};
  return li;
}

struct EvalSettings {
  std::string method = "auto";  // auto | enum | dp | mc
  long long replicas = 0;
  std::optional<std::uint64_t> seed;
  int workers = 1;
  int ell = 0;
  long long envy_replicas = 0;
  std::optional<std::string> profile_path;
};

struct EvalOutcome {
  UtilityVector util;
  std::optional<double> envy_margin;
};

bool profile_is_canonical(const ActionProfile& profile, const ActionProfile& canonical) {
  if (profile.kind != canonical.kind) return false;
  return profile.kind == ActionProfile::Kind::TicketRequest
             ? profile.requests == canonical.requests
             : profile.declarations == canonical.declarations;
}

EvalOutcome evaluate_one(Mechanism mech, const Instance& inst, const ActionProfile& profile,
                         const EvalSettings& s) {
  const int limit = mech == Mechanism::IndividualLotteryLimit ? s.ell : 0;
  const bool canonical = profile_is_canonical(profile, default_profile(mech, inst, limit));

  auto run_mc = [&]() {
    require(s.replicas >= 1, Err::Config,
            "Monte Carlo evaluation needs --replicas (method was '" + s.method + "')");
    require(s.seed.has_value(), Err::Config, "stochastic evaluation refuses to run without --seed");
    return monte_carlo(mech, inst, profile, s.replicas, *s.seed, s.workers, limit, canonical);
  };

  EvalOutcome out;
  if (s.method == "mc") {
    out.util = run_mc();
  } else if (s.method == "enum") {
    out.util = exact_enumerate(mech, inst, profile, limit);
  } else if (s.method == "dp") {
    require(mech == Mechanism::GroupLottery, Err::Config,
            "the dynamic program evaluates the group lottery only");
    require(canonical, Err::Config, "the dynamic program assumes the group-request profile");
    out.util = exact_gl_dp(inst);
  } else if (s.method == "auto") {
    // exact when feasible: enumeration, then the GL dynamic program, then MC
    bool done = false;
    try {
      out.util = exact_enumerate(mech, inst, profile, limit);
      done = true;
    } catch (const Error& e) {
      if (e.code() != Err::TooLarge) throw;
    }
    if (!done && mech == Mechanism::GroupLottery && canonical) {
      try {
        out.util = exact_gl_dp(inst);
        done = true;
      } catch (const Error& e) {
        if (e.code() != Err::StateSpaceTooLarge) throw;
      }
    }
    if (!done) out.util = run_mc();
  } else {
    fail(Err::Config, "unknown method '" + s.method + "'");
  }

  if (s.envy_replicas > 0) {
    require(s.seed.has_value(), Err::Config, "envy estimation refuses to run without --seed");
    EnvyMatrix env = envy_matrix(mech, inst, profile, s.envy_replicas, *s.seed, s.workers, limit);
    out.envy_margin = env.margin;
  }
  return out;
}

struct BoundCheck {
  double bound_eff = 0, bound_fair = 0;
  bool eff_pass = false, fair_pass = false;
};

BoundCheck check_bounds(Mechanism mech, const Instance& inst, const UtilityVector& util, int ell) {
  BoundRecord rec = bounds(inst, ell >= 1 ? std::optional<int>(ell) : std::nullopt);
  BoundCheck chk;
  switch (mech) {
    case Mechanism::GroupLottery:
      chk.bound_eff = rec.gl_eff();
      chk.bound_fair = rec.gl_fair();
      break;
    case Mechanism::WeightedIndividualLottery:
    case Mechanism::GroupLotteryReplacement:
      chk.bound_eff = rec.iw_eff();
      chk.bound_fair = rec.iw_fair();
      break;
    case Mechanism::IndividualLottery:
      break;  // no positive worst-case guarantee
    case Mechanism::IndividualLotteryLimit:
      chk.bound_eff = rec.il_limit_applicable ? rec.il_limit() : 0.0;
      chk.bound_fair = chk.bound_eff;
      break;
    case Mechanism::FairGroupLottery:
      chk.bound_eff = rec.benchmark_eff();
      chk.bound_fair = 1.0;
      break;
  }

  const double util_value = utilization(util, inst);
  const double fair_value = fairness_ratio(util);
  double util_se = 0, fair_se = 0;
  if (util.method == EvalMethod::MonteCarlo) {
    // class-level error propagation; same-size groups share one estimate
    std::map<int, std::pair<double, int>> classes;  // size -> (se, count)
    for (int g = 0; g < inst.m; ++g) {
      auto& c = classes[inst.group_sizes[std::size_t(g)]];
      c.first = util.se[std::size_t(g)];
      c.second += 1;
    }
    double acc = 0;
    for (auto& [size, c] : classes) {
      double term = double(size) * double(c.second) * c.first;
      acc += term * term;
    }
    util_se = std::sqrt(acc) / double(inst.k);
    double lo = *std::min_element(util.u.begin(), util.u.end());
    double hi = *std::max_element(util.u.begin(), util.u.end());
    if (lo > 0 && hi > 0) {
      auto lo_it = std::min_element(util.u.begin(), util.u.end());
      auto hi_it = std::max_element(util.u.begin(), util.u.end());
      double se_lo = util.se[std::size_t(lo_it - util.u.begin())];
      double se_hi = util.se[std::size_t(hi_it - util.u.begin())];
      fair_se = fair_value * std::sqrt((se_lo / lo) * (se_lo / lo) + (se_hi / hi) * (se_hi / hi));
    }
  }
  // exact values must clear the bound outright; Monte Carlo means may dip
  // three standard errors below it before we call a failure
  const double eff_slack = util.method == EvalMethod::MonteCarlo ? 3.0 * util_se : 1e-9;
  const double fair_slack = util.method == EvalMethod::MonteCarlo ? 3.0 * fair_se : 1e-9;
  chk.eff_pass = util_value >= chk.bound_eff - eff_slack;
  chk.fair_pass = fair_value >= chk.bound_fair - fair_slack;
  return chk;
}

void emit_rows(Output& out, const std::string& instance_id, Mechanism mech, const Instance& inst,
               const EvalOutcome& res, int ell, const std::string& format, bool header) {
  std::string mech_name = mechanism_token(mech);
  if (mech == Mechanism::IndividualLotteryLimit) mech_name += "(" + std::to_string(ell) + ")";
  auto rows = outcome_rows(instance_id, mech_name, inst, res.util, res.envy_margin);
  BoundCheck chk = check_bounds(mech, inst, res.util, ell);
  for (auto& row : rows) {
    row.bound_eff = chk.bound_eff;
    row.bound_fair = chk.bound_fair;
    row.eff_pass = chk.eff_pass;
    row.fair_pass = chk.fair_pass;
  }
  if (format == "csv") {
    if (header) out << outcome_csv_header(true) << "\n";
    for (const auto& row : rows) out << outcome_row_csv(row, true) << "\n";
  } else if (format == "json") {
    for (const auto& row : rows) {
      json j;
      j["instance_id"] = row.instance_id;
      j["mechanism"] = row.mechanism;
      j["n"] = row.n;
      j["k"] = row.k;
      j["m"] = row.m;
      j["size_class"] = row.size_class;
      j["u_mean"] = row.u_mean;
      j["u_se"] = row.u_se;
      j["method"] = eval_method_token(row.method);
      j["R"] = row.replicas;
      if (row.seed) j["seed"] = *row.seed;
      j["utilization"] = row.utilization;
      j["fairness_ratio"] = row.fairness_ratio;
      if (row.envy_margin) j["envy_margin"] = *row.envy_margin;
      j["bound_eff"] = *row.bound_eff;
      j["bound_fair"] = *row.bound_fair;
      j["eff_check"] = *row.eff_pass ? "PASS" : "FAIL";
      j["fair_check"] = *row.fair_pass ? "PASS" : "FAIL";
      out << j.dump() << "\n";
    }
  } else {
    fail(Err::Config, "unknown format '" + format + "'");
  }
}

std::vector<Mechanism> parse_mechanisms(const std::string& list, int ell) {
  std::vector<Mechanism> out;
  for (const auto& tok : split_list(list)) {
    auto mech = mechanism_from_token(tok);
    require(mech.has_value(), Err::Config, "unknown mechanism '" + tok + "'");
    if (*mech == Mechanism::IndividualLotteryLimit)
      require(ell >= 1, Err::Config, "il_limit needs --ell");
    out.push_back(*mech);
  }
  require(!out.empty(), Err::Config, "no mechanisms selected");
  return out;
}

// ---------------------------------------------------------------- verify ---

struct SuiteReport {
  std::string suite;
  long long checks = 0;
  long long failures = 0;
  json detail = json::object();
};

SuiteReport verify_dominance(long long samples, int instances, std::uint64_t seed) {
  SuiteReport rep{"dominance", 0, 0, json::object()};
  SeedStream gen(seed);
  long long violations = 0;
  for (int t = 0; t < instances; ++t) {
    Instance inst = sample_bounded_instance(gen, 12, 4, false);
    for (long long r = 0; r < samples; ++r) {
      CoupledTriple triple = sample_coupled_triple(inst, gen);
      CoupledSuccess s = coupled_success(inst, triple);
      for (int g = 0; g < inst.m; ++g) {
        ++rep.checks;
        if (s.glr[std::size_t(g)] > s.iw[std::size_t(g)] ||
            s.iw[std::size_t(g)] > s.gl[std::size_t(g)])
          ++violations;
      }
    }
  }
  rep.failures = violations;
  rep.detail["violations"] = violations;
  rep.detail["samples_per_instance"] = samples;
  rep.detail["instances"] = instances;
  return rep;
}

SuiteReport verify_hitting(long long cases, std::uint64_t seed) {
  SuiteReport rep{"hitting", 0, 0, json::object()};
  SeedStream gen(seed);
  long long interval_failures = 0, subadd_failures = 0;
  for (long long c = 0; c < cases; ++c) {
    int n = 2 + gen.uniform_int(11);
    std::vector<int> sizes(static_cast<std::size_t>(n));
    long long total = 0;
    for (auto& s : sizes) {
      s = 1 + gen.uniform_int(4);
      total += s;
    }
    for (int k = 1; k <= total; ++k) {
      HittingCheck check = hitting_time_check(sizes, k, HittingMethod::Exact, 0);
      ++rep.checks;
      if (!check.within) ++interval_failures;
      for (const auto& pair : check.subadditivity) {
        ++rep.checks;
        if (!pair.holds) ++subadd_failures;
      }
    }
  }
  rep.failures = interval_failures + subadd_failures;
  rep.detail["interval_failures"] = interval_failures;
  rep.detail["subadditivity_failures"] = subadd_failures;
  rep.detail["cases"] = cases;
  return rep;
}

SuiteReport verify_br() {
  SuiteReport rep{"br", 0, 0, json::object()};
  long long strategies = 0;
  for (int s = 1; s <= 6; ++s)
    for (int r = 0; r < s; ++r)
      for (const auto& strat : enumerate_br(s, r)) {
        ++rep.checks;
        ++strategies;
        if (!reciprocal_sum_within(strat, r)) ++rep.failures;
      }
  rep.detail["strategies"] = strategies;
  return rep;
}

SuiteReport verify_conjecture(long long replicas, std::uint64_t seed) {
  SuiteReport rep{"conjecture", 0, 0, json::object()};
  SeedStream seeder(seed);
  for (double threshold : {0.25, 0.5, 0.75, 1.0}) {
    for (int s = 1; s <= 5; ++s) {
      for (int r = 0; r < s; ++r) {
        for (const auto& strat : enumerate_br(s, r)) {
          ConjectureProbe probe =
              conjecture_probe(s, strat, threshold, replicas, seeder.next_u64());
          ++rep.checks;
          if (probe.p_success > probe.p_group_request + 3.0 * std::max(probe.se, 1e-12))
            ++rep.failures;
        }
      }
    }
  }
  rep.detail["replicas"] = replicas;
  rep.detail["thresholds"] = {0.25, 0.5, 0.75, 1.0};
  return rep;
}

SuiteReport verify_distribution(std::uint64_t seed) {
  SuiteReport rep{"distribution", 0, 0, json::object()};
  json pvals = json::object();
  auto record = [&](const std::string& name, double p) {
    ++rep.checks;
    pvals[name] = p;
    if (!(p > 1e-3)) ++rep.failures;
  };
  const long long draws = 60000;
  const std::vector<double> uniform6(6, 1.0 / 6.0);

  {
    SeedStream stream(seed);
    std::map<std::vector<int>, long long> freq;
    for (long long i = 0; i < draws; ++i) freq[sample_uniform_order(3, stream).elements]++;
    std::vector<long long> counts;
    for (auto& [p, c] : freq) counts.push_back(c);
    record("uniform_order",
           counts.size() == 6
               ? chi_square_pvalue(chi_square_stat(counts, uniform6, draws), 5)
               : 0.0);
  }
  {
    SeedStream stream(seed + 1);
    std::map<std::vector<int>, long long> freq;
    for (long long i = 0; i < draws; ++i)
      freq[sample_uniform_order_split(3, {0, 2}, stream).elements]++;
    std::vector<long long> counts;
    for (auto& [p, c] : freq) counts.push_back(c);
    record("uniform_order_split",
           counts.size() == 6
               ? chi_square_pvalue(chi_square_stat(counts, uniform6, draws), 5)
               : 0.0);
  }
  {
    SeedStream stream(seed + 2);
    std::map<std::vector<int>, long long> freq;
    for (long long i = 0; i < draws; ++i) freq[sample_weighted_order({3, 3, 3}, stream).elements]++;
    std::vector<long long> counts;
    for (auto& [p, c] : freq) counts.push_back(c);
    record("weighted_equal_requests_uniform",
           counts.size() == 6
               ? chi_square_pvalue(chi_square_stat(counts, uniform6, draws), 5)
               : 0.0);
  }
  {
    SeedStream stream(seed + 3);
    std::vector<long long> counts(3, 0);
    for (long long i = 0; i < draws; ++i)
      counts[std::size_t(sample_weighted_order({1, 2, 2}, stream).elements[0])]++;
    record("weighted_first_element",
           chi_square_pvalue(chi_square_stat(counts, {0.5, 0.25, 0.25}, draws), 2));
  }
  {
    Instance inst = make_instance(3, {1, 2, 2});
    SeedStream stream(seed + 4);
    std::map<std::vector<int>, long long> gl_freq;
    std::map<std::vector<int>, long long> iw_freq;
    for (long long i = 0; i < draws; ++i) {
      CoupledTriple t = sample_coupled_triple(inst, stream);
      gl_freq[t.gl_group_order]++;
      iw_freq[t.iw_agent_order]++;
    }
    std::vector<long long> gl_counts;
    for (auto& [p, c] : gl_freq) gl_counts.push_back(c);
    record("coupled_group_order_uniform",
           gl_counts.size() == 6
               ? chi_square_pvalue(chi_square_stat(gl_counts, uniform6, draws), 5)
               : 0.0);

    std::vector<int> req = {1, 2, 2, 2, 2};
    std::vector<int> order = {0, 1, 2, 3, 4};
    std::vector<long long> counts;
    std::vector<double> probs;
    do {
      double w = 1.0, rem = 0;
      for (int r : req) rem += 1.0 / r;
      for (int id : order) {
        double inv = 1.0 / req[std::size_t(id)];
        w *= inv / rem;
        rem -= inv;
      }
      probs.push_back(w);
      counts.push_back(iw_freq[order]);
    } while (std::next_permutation(order.begin(), order.end()));
    record("coupled_agent_order_weighted_law",
           chi_square_pvalue(chi_square_stat(counts, probs, draws), int(probs.size()) - 1));
  }
  rep.detail["pvalues"] = pvals;
  rep.detail["significance"] = 1e-3;
  rep.detail["draws"] = draws;
  return rep;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lottery mechanism toolkit"};
  app.require_subcommand(1);

  // ------------------------------------------------------------------ gen
  auto* gen = app.add_subcommand("gen", "generate an instance file");
  std::string gen_named, gen_out, gen_sizes = "1:1", gen_alpha_str;
  long long gen_r = 0, gen_m = 0, gen_s = 0, gen_ell = 0, gen_n = 0, gen_k = 0;
  int gen_groups = 0;
  std::uint64_t gen_seed = 0;
  bool gen_random = false;
  bool gen_seed_set = false;
  gen->add_option("--named", gen_named, "named construction tag");
  gen->add_flag("--random", gen_random, "draw a random instance");
  gen->add_option("--r", gen_r);
  gen->add_option("--m", gen_m);
  gen->add_option("--s", gen_s);
  gen->add_option("--ell", gen_ell);
  gen->add_option("--n", gen_n);
  gen->add_option("--k", gen_k);
  gen->add_option("--alpha", gen_alpha_str, "rational like 1/4 or 0.25");
  gen->add_option("--groups", gen_groups, "random: number of groups");
  gen->add_option("--sizes", gen_sizes, "random: MIN:MAX or MIN:MAX:w1,w2,...");
  gen->add_option("--seed", gen_seed)->each([&](const std::string&) { gen_seed_set = true; });
  gen->add_option("-o,--out", gen_out, "output path (stdout if omitted)");

  // ----------------------------------------------------------------- eval
  auto* eval = app.add_subcommand("eval", "evaluate mechanisms on an instance");
  std::string eval_in, eval_mech = "gl", eval_format = "csv", eval_out, eval_profile;
  EvalSettings eval_s;
  std::uint64_t eval_seed = 0;
  bool eval_seed_set = false;
  eval->add_option("-i,--instance", eval_in)->required();
  eval->add_option("--mech", eval_mech, "comma list: gl,il,iw,glr,fair_gl,il_limit");
  eval->add_option("--method", eval_s.method, "auto|enum|dp|mc");
  eval->add_option("--replicas", eval_s.replicas);
  eval->add_option("--seed", eval_seed)->each([&](const std::string&) { eval_seed_set = true; });
  eval->add_option("--workers", eval_s.workers);
  eval->add_option("--ell", eval_s.ell);
  eval->add_option("--envy-replicas", eval_s.envy_replicas);
  eval->add_option("--profile", eval_profile, "explicit action profile (JSON)");
  eval->add_option("--format", eval_format, "csv|json");
  eval->add_option("--out", eval_out, "output path (stdout if omitted)");

  // --------------------------------------------------------------- bounds
  auto* bnd = app.add_subcommand("bounds", "worst-case bound record for an instance");
  std::string bnd_in, bnd_format = "json", bnd_out;
  int bnd_ell = 0;
  bnd->add_option("-i,--instance", bnd_in)->required();
  bnd->add_option("--ell", bnd_ell);
  bnd->add_option("--format", bnd_format, "json|csv");
  bnd->add_option("--out", bnd_out);

  // --------------------------------------------------------------- verify
  auto* ver = app.add_subcommand("verify", "run an invariant battery");
  std::string ver_suite;
  long long ver_samples = 10000, ver_cases = 1000, ver_replicas = 100000;
  int ver_instances = 20;
  std::uint64_t ver_seed = 0;
  bool ver_seed_set = false;
  ver->add_option("suite", ver_suite, "dominance|hitting|br|conjecture|distribution")->required();
  ver->add_option("--samples", ver_samples);
  ver->add_option("--cases", ver_cases);
  ver->add_option("--instances", ver_instances);
  ver->add_option("--replicas", ver_replicas);
  ver->add_option("--seed", ver_seed)->each([&](const std::string&) { ver_seed_set = true; });

  // ---------------------------------------------------------------- sweep
  auto* swp = app.add_subcommand("sweep", "evaluate a named family over a grid");
  std::string swp_family, swp_r, swp_m, swp_s, swp_alpha = "1/4", swp_mech = "gl", swp_out;
  long long swp_replicas = 0;
  std::uint64_t swp_seed = 0;
  bool swp_seed_set = false;
  int swp_workers = 1, swp_ell = 0;
  swp->add_option("--family", swp_family, "il_bad|spl_tight|gl_tight")->required();
  swp->add_option("--r", swp_r, "comma list");
  swp->add_option("--m", swp_m, "comma list");
  swp->add_option("--s", swp_s, "comma list, or 'sq' for s=r^2 (il_bad)");
  swp->add_option("--alpha", swp_alpha, "rational");
  swp->add_option("--mech", swp_mech);
  swp->add_option("--replicas", swp_replicas);
  swp->add_option("--seed", swp_seed)->each([&](const std::string&) { swp_seed_set = true; });
  swp->add_option("--workers", swp_workers);
  swp->add_option("--ell", swp_ell);
  swp->add_option("--out", swp_out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*gen) {
      require(gen_named.empty() == gen_random, Err::Config,
              "choose exactly one of --named or --random");
      Instance inst;
      if (!gen_named.empty()) {
        auto tag = construction_tag_from_token(gen_named);
        require(tag.has_value(), Err::Config, "unknown construction '" + gen_named + "'");
        NamedConstruction spec;
        spec.tag = *tag;
        spec.r = gen_r;
        spec.m = gen_m;
        spec.s = gen_s;
        spec.ell = gen_ell;
        spec.n = gen_n;
        spec.k = gen_k;
        if (!gen_alpha_str.empty()) spec.alpha = parse_rational(gen_alpha_str);
        inst = generate_named(spec);
      } else {
        require(gen_seed_set, Err::Config, "--random refuses to run without --seed");
        require(gen_groups >= 1, Err::Config, "--random needs --groups");
        std::vector<std::string> colon;
        {
          std::string cur;
          for (char c : gen_sizes)
            if (c == ':') {
              colon.push_back(cur);
              cur.clear();
            } else {
              cur += c;
            }
          colon.push_back(cur);
        }
        require(colon.size() >= 2, Err::Config, "--sizes expects MIN:MAX[:w1,w2,...]");
        SizeLaw law;
        law.min_size = std::stoi(colon[0]);
        law.max_size = std::stoi(colon[1]);
        if (colon.size() >= 3)
          for (const auto& wtok : split_list(colon[2])) law.weights.push_back(std::stod(wtok));
        KRule rule;
        if (!gen_alpha_str.empty()) {
          rule.use_alpha = true;
          rule.alpha = rational_value(parse_rational(gen_alpha_str));
        } else {
          require(gen_k >= 1, Err::Config, "--random needs --k or --alpha");
          rule.fixed_k = gen_k;
        }
        inst = generate_random(gen_groups, law, rule, gen_seed);
      }
      std::string text = instance_to_json_text(inst);
      if (!gen_out.empty()) {
        write_text_file(gen_out, text + "\n");
        std::cout << instance_stats_json(inst) << "\n";
      } else {
        std::cout << text << "\n";
        std::cerr << instance_stats_json(inst) << "\n";
      }
      return 0;
    }

    if (*eval) {
      if (eval_seed_set) eval_s.seed = eval_seed;
      if (!eval_profile.empty()) eval_s.profile_path = eval_profile;
      LoadedInstance li = load_instance(eval_in);
      auto mechs = parse_mechanisms(eval_mech, eval_s.ell);
      Output out;
      if (!eval_out.empty()) out.path = eval_out;
      bool first = true;
      for (Mechanism mech : mechs) {
        int limit = mech == Mechanism::IndividualLotteryLimit ? eval_s.ell : 0;
        ActionProfile profile =
            eval_s.profile_path
                ? profile_from_json_text(read_text_file(*eval_s.profile_path), li.inst)
                : default_profile(mech, li.inst, limit);
        EvalOutcome res = evaluate_one(mech, li.inst, profile, eval_s);
        emit_rows(out, li.id, mech, li.inst, res, eval_s.ell, eval_format, first);
        first = false;
      }
      out.flush();
      return 0;
    }

    if (*bnd) {
      LoadedInstance li = load_instance(bnd_in);
      BoundRecord rec = bounds(li.inst, bnd_ell >= 1 ? std::optional<int>(bnd_ell) : std::nullopt);
      Output out;
      if (!bnd_out.empty()) out.path = bnd_out;
      if (bnd_format == "csv")
        out << bounds_csv_header() << "\n" << bounds_csv_row(li.id, li.inst, rec) << "\n";
      else
        out << bounds_json(li.id, li.inst, rec) << "\n";
      out.flush();
      return 0;
    }

    if (*ver) {
      SuiteReport rep;
      if (ver_suite == "dominance") {
        rep = verify_dominance(ver_samples, ver_instances, ver_seed_set ? ver_seed : 3);
      } else if (ver_suite == "hitting") {
        rep = verify_hitting(ver_cases, ver_seed_set ? ver_seed : 5);
      } else if (ver_suite == "br") {
        rep = verify_br();
      } else if (ver_suite == "conjecture") {
        rep = verify_conjecture(ver_replicas, ver_seed_set ? ver_seed : 11);
      } else if (ver_suite == "distribution") {
        rep = verify_distribution(ver_seed_set ? ver_seed : 13);
      } else {
        std::cerr << "CONFIG: unknown suite '" << ver_suite << "'\n";
        return 2;
      }
      json j;
      j["suite"] = rep.suite;
      j["checks"] = rep.checks;
      j["failures"] = rep.failures;
      j["pass"] = rep.failures == 0;
      j["detail"] = rep.detail;
      std::cout << j.dump() << "\n";
      return rep.failures == 0 ? 0 : 1;
    }

    if (*swp) {
      EvalSettings s;
      s.replicas = swp_replicas;
      if (swp_seed_set) s.seed = swp_seed;
      s.workers = swp_workers;
      s.ell = swp_ell;
      auto mechs = parse_mechanisms(swp_mech, swp_ell);

      struct Point {
        std::string id;
        Instance inst;
      };
      std::vector<Point> points;
      Rational alpha = parse_rational(swp_alpha);
      if (swp_family == "il_bad") {
        require(!swp_r.empty(), Err::Config, "il_bad sweep needs --r");
        for (long long r : split_ints(swp_r)) {
          NamedConstruction spec;
          spec.tag = ConstructionTag::IlBad;
          spec.r = r;
          spec.s = (swp_s.empty() || swp_s == "sq") ? r * r : split_ints(swp_s)[0];
          spec.alpha = alpha;
          points.push_back({"il_bad(r=" + std::to_string(r) + ";s=" + std::to_string(spec.s) +
                                ";alpha=" + swp_alpha + ")",
                            generate_named(spec)});
        }
      } else if (swp_family == "spl_tight") {
        require(!swp_m.empty() && !swp_s.empty(), Err::Config,
                "spl_tight sweep needs --m and --s");
        long long s_val = split_ints(swp_s)[0];
        for (long long m : split_ints(swp_m)) {
          NamedConstruction spec;
          spec.tag = ConstructionTag::SplTight;
          spec.m = m;
          spec.s = s_val;
          spec.alpha = alpha;
          points.push_back({"spl_tight(m=" + std::to_string(m) + ";s=" + std::to_string(s_val) +
                                ";alpha=" + swp_alpha + ")",
                            generate_named(spec)});
        }
      } else if (swp_family == "gl_tight") {
        require(!swp_r.empty() && !swp_m.empty(), Err::Config, "gl_tight sweep needs --r and --m");
        for (long long r : split_ints(swp_r))
          for (long long m : split_ints(swp_m)) {
            NamedConstruction spec;
            spec.tag = ConstructionTag::GlTight;
            spec.r = r;
            spec.m = m;
            points.push_back({"gl_tight(r=" + std::to_string(r) + ";m=" + std::to_string(m) + ")",
                              generate_named(spec)});
          }
      } else {
        fail(Err::Config, "unknown family '" + swp_family + "'");
      }
      require(points.size() * mechs.size() <= 200, Err::Config,
              "sweep grid capped at 200 evaluations");

      Output out;
      if (!swp_out.empty()) out.path = swp_out;
      bool first = true;
      for (const auto& point : points) {
        for (Mechanism mech : mechs) {
          int limit = mech == Mechanism::IndividualLotteryLimit ? swp_ell : 0;
          ActionProfile profile = default_profile(mech, point.inst, limit);
          EvalOutcome res = evaluate_one(mech, point.inst, profile, s);
          emit_rows(out, point.id, mech, point.inst, res, swp_ell, "csv", first);
          first = false;
        }
      }
      out.flush();
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return e.code() == Err::Config ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
