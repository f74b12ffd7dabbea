#include "lottery/report.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace lottery {

using nlohmann::json;

std::string format_sig10(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 10);
  require(res.ec == std::errc(), Err::Internal, "float formatting failed");
  return std::string(buf, res.ptr);
}

static const char* kBaseColumns =
    "instance_id,mechanism,n,k,m,size_class,u_mean,u_se,method,R,seed,utilization,"
    "fairness_ratio,envy_margin";

std::string outcome_csv_header(bool with_bounds) {
  std::string h = kBaseColumns;
  if (with_bounds) h += ",bound_eff,bound_fair,eff_check,fair_check";
  return h;
}

std::string outcome_row_csv(const OutcomeRow& row, bool with_bounds) {
  std::ostringstream out;
  out << row.instance_id << ',' << row.mechanism << ',' << row.n << ',' << row.k << ',' << row.m
      << ',' << row.size_class << ',' << format_sig10(row.u_mean) << ','
      << format_sig10(row.u_se) << ',' << eval_method_token(row.method) << ',' << row.replicas
      << ',';
  if (row.seed) out << *row.seed;
  out << ',' << format_sig10(row.utilization) << ',' << format_sig10(row.fairness_ratio) << ',';
  if (row.envy_margin) out << format_sig10(*row.envy_margin);
  if (with_bounds) {
    out << ',';
    if (row.bound_eff) out << format_sig10(*row.bound_eff);
    out << ',';
    if (row.bound_fair) out << format_sig10(*row.bound_fair);
    out << ',';
    if (row.eff_pass) out << (*row.eff_pass ? "PASS" : "FAIL");
    out << ',';
    if (row.fair_pass) out << (*row.fair_pass ? "PASS" : "FAIL");
  }
  return out.str();
}

std::vector<OutcomeRow> outcome_rows(const std::string& instance_id, const std::string& mechanism,
                                     const Instance& inst, const UtilityVector& util,
                                     std::optional<double> envy_margin) {
  const double u_total = utilization(util, inst);
  const double fair = fairness_ratio(util);
  SizeMultiset classes = to_multiset(inst.group_sizes);

  std::vector<OutcomeRow> rows;
  for (std::size_t c = 0; c < classes.sizes.size(); ++c) {
    // class value: mean over the class (identical entries under group request)
    double mean = 0, se2 = 0, se_pooled = 0;
    int cnt = 0;
    for (int g = 0; g < inst.m; ++g) {
      if (inst.group_sizes[std::size_t(g)] != classes.sizes[c]) continue;
      mean += util.u[std::size_t(g)];
      se2 += util.se[std::size_t(g)] * util.se[std::size_t(g)];
      se_pooled = util.se[std::size_t(g)];
      ++cnt;
    }
    mean /= double(cnt);
    OutcomeRow row;
    row.instance_id = instance_id;
    row.mechanism = mechanism;
    row.n = inst.n;
    row.k = inst.k;
    row.m = inst.m;
    row.size_class = classes.sizes[c];
    row.u_mean = mean;
    // pooled class entries are one shared estimate, not cnt independent ones
    row.u_se = util.pooled ? se_pooled : std::sqrt(se2) / double(cnt);
    row.method = util.method;
    row.replicas = util.method == EvalMethod::MonteCarlo ? util.replicas : 0;
    if (util.method == EvalMethod::MonteCarlo) row.seed = util.seed;
    row.utilization = u_total;
    row.fairness_ratio = fair;
    row.envy_margin = envy_margin;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string bounds_csv_header() {
  return "instance_id,n,k,m,s_max,kappa,alpha,g_alpha,gl_eff,gl_fair,iw_eff,iw_fair,"
         "benchmark_eff,il_limit_eff";
}

std::string bounds_csv_row(const std::string& instance_id, const Instance& inst,
                           const BoundRecord& rec) {
  InstanceStats st = instance_stats(inst);
  std::ostringstream out;
  out << instance_id << ',' << inst.n << ',' << inst.k << ',' << inst.m << ',' << st.s_max << ','
      << format_sig10(rec.kappa) << ',' << format_sig10(rec.alpha) << ','
      << format_sig10(rec.g_alpha) << ',' << format_sig10(rec.gl_eff()) << ','
      << format_sig10(rec.gl_fair()) << ',' << format_sig10(rec.iw_eff()) << ','
      << format_sig10(rec.iw_fair()) << ',' << format_sig10(rec.benchmark_eff()) << ',';
  if (rec.il_limit_applicable) out << format_sig10(rec.il_limit());
  return out.str();
}

std::string bounds_json(const std::string& instance_id, const Instance& inst,
                        const BoundRecord& rec) {
  InstanceStats st = instance_stats(inst);
  json j;
  j["instance_id"] = instance_id;
  j["n"] = inst.n;
  j["k"] = inst.k;
  j["m"] = inst.m;
  j["s_max"] = st.s_max;
  j["kappa"] = rec.kappa;
  j["alpha"] = rec.alpha;
  j["g_alpha"] = rec.g_alpha;
  j["u_star"] = st.benchmark_u_star;
  j["gl_eff"] = rec.gl_eff();
  j["gl_fair"] = rec.gl_fair();
  j["iw_eff"] = rec.iw_eff();
  j["iw_fair"] = rec.iw_fair();
  j["benchmark_eff"] = rec.benchmark_eff();
  j["gl_eff_raw"] = rec.gl_eff_raw;
  j["gl_fair_raw"] = rec.gl_fair_raw;
  j["iw_eff_raw"] = rec.iw_eff_raw;
  j["iw_fair_raw"] = rec.iw_fair_raw;
  if (rec.il_limit_applicable) {
    j["ell"] = rec.ell;
    j["il_limit_eff"] = rec.il_limit();
    j["il_limit_fair"] = rec.il_limit();
  }
  return j.dump();
}

static void reject_unknown_fields(const json& j, std::initializer_list<const char*> allowed,
                                  const char* what) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* key : allowed)
      if (it.key() == key) {
        known = true;
        break;
      }
    require(known, Err::ParamViolation,
            std::string(what) + " has unknown field '" + it.key() + "'");
  }
}

Instance instance_from_json_text(const std::string& text) {
  json j = json::parse(text);
  require(j.is_object(), Err::ParamViolation, "instance file must be a JSON object");
  reject_unknown_fields(j, {"k", "group_sizes"}, "instance file");
  require(j.contains("k") && j.contains("group_sizes"), Err::ParamViolation,
          "instance file needs 'k' and 'group_sizes'");
  int k = j.at("k").get<int>();
  std::vector<int> sizes = j.at("group_sizes").get<std::vector<int>>();
  return make_instance(k, std::move(sizes));
}

std::string instance_to_json_text(const Instance& inst) {
  json j;
  j["k"] = inst.k;
  j["group_sizes"] = inst.group_sizes;
  return j.dump();
}

bool json_text_is_named_construction(const std::string& text) {
  json j = json::parse(text, nullptr, /*allow_exceptions=*/false);
  return j.is_object() && j.contains("tag");
}

NamedConstruction named_construction_from_json_text(const std::string& text) {
  json j = json::parse(text);
  require(j.is_object(), Err::ParamViolation, "named construction must be a JSON object");
  reject_unknown_fields(j, {"tag", "params"}, "named construction");
  require(j.contains("tag"), Err::ParamViolation, "named construction needs 'tag'");
  auto tag = construction_tag_from_token(j.at("tag").get<std::string>());
  require(tag.has_value(), Err::ParamViolation,
          "unknown construction tag '" + j.at("tag").get<std::string>() + "'");
  NamedConstruction spec;
  spec.tag = *tag;
  if (j.contains("params")) {
    const json& p = j.at("params");
    reject_unknown_fields(p, {"r", "m", "s", "ell", "n", "k", "alpha"}, "construction params");
    if (p.contains("r")) spec.r = p.at("r").get<long long>();
    if (p.contains("m")) spec.m = p.at("m").get<long long>();
    if (p.contains("s")) spec.s = p.at("s").get<long long>();
    if (p.contains("ell")) spec.ell = p.at("ell").get<long long>();
    if (p.contains("n")) spec.n = p.at("n").get<long long>();
    if (p.contains("k")) spec.k = p.at("k").get<long long>();
    if (p.contains("alpha")) {
      if (p.at("alpha").is_string())
        spec.alpha = parse_rational(p.at("alpha").get<std::string>());
      else
        spec.alpha = parse_rational(json(p.at("alpha")).dump());
    }
  }
  return spec;
}

ActionProfile profile_from_json_text(const std::string& text, const Instance& inst) {
  json j = json::parse(text);
  require(j.is_object(), Err::ParamViolation, "profile must be a JSON object");
  reject_unknown_fields(j, {"kind", "actions"}, "profile");
  require(j.contains("kind") && j.contains("actions"), Err::ParamViolation,
          "profile needs 'kind' and 'actions'");
  std::string kind = j.at("kind").get<std::string>();
  ActionProfile profile;
  if (kind == "group_declaration") {
    profile.kind = ActionProfile::Kind::GroupDeclaration;
    profile.declarations = j.at("actions").get<std::vector<std::vector<int>>>();
    require(int(profile.declarations.size()) == inst.n, Err::ParamViolation,
            "profile must cover every agent");
  } else if (kind == "ticket_request") {
    profile.kind = ActionProfile::Kind::TicketRequest;
    profile.requests = j.at("actions").get<std::vector<int>>();
    require(int(profile.requests.size()) == inst.n, Err::ParamViolation,
            "profile must cover every agent");
  } else {
    fail(Err::ParamViolation, "unknown profile kind '" + kind + "'");
  }
  return profile;
}

std::string profile_to_json_text(const ActionProfile& profile) {
  json j;
  if (profile.kind == ActionProfile::Kind::GroupDeclaration) {
    j["kind"] = "group_declaration";
    j["actions"] = profile.declarations;
  } else {
    j["kind"] = "ticket_request";
    j["actions"] = profile.requests;
  }
  return j.dump();
}

std::string instance_stats_json(const Instance& inst) {
  InstanceStats st = instance_stats(inst);
  json j;
  j["n"] = inst.n;
  j["m"] = inst.m;
  j["k"] = inst.k;
  j["s_max"] = st.s_max;
  j["kappa"] = st.kappa_hat;
  j["alpha"] = st.alpha_hat;
  j["u_star"] = st.benchmark_u_star;
  return j.dump();
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), Err::Config, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), Err::Config, "cannot write " + path);
  out << content;
}

}  // namespace lottery
