#include "nearcol/accuracy.hpp"
#include "nearcol/adaptive.hpp"
#include "nearcol/ball_solver.hpp"
#include "nearcol/master_template.hpp"
#include "nearcol/metric_bounds.hpp"
#include "nearcol/reproduce.hpp"
#include "nearcol/simulate.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cinttypes>
#include <fstream>
#include <iostream>
#include <random>

using nlohmann::ordered_json;

namespace {

using namespace nearcol;

/// Accepts plain integers, scientific notation (integral), and power
/// notation ("2^47", "10^8").
BigInt parse_count(const std::string& text) {
  const auto caret = text.find('^');
  if (caret != std::string::npos) {
    const long base = std::stol(text.substr(0, caret));
    const long exp = std::stol(text.substr(caret + 1));
    if (base < 2 || exp < 0 || exp > 100000) throw CLI::ValidationError("bad power: " + text);
    BigInt v = 1;
    for (long i = 0; i < exp; ++i) v *= base;
    return v;
  }
  if (text.find_first_of("eE.") != std::string::npos) {
    const long double v = std::stold(text);
    if (v < 0 || v > 1e18L || std::floor(v) != v)
      throw CLI::ValidationError("not an integral count: " + text);
    return BigInt(static_cast<std::uint64_t>(v));
  }
  return BigInt(text);
}

std::uint64_t parse_count_u64(const std::string& text) {
  const BigInt v = parse_count(text);
  if (v > std::numeric_limits<std::uint64_t>::max())
    throw CLI::ValidationError("count too large: " + text);
  return v.convert_to<std::uint64_t>();
}

ordered_json validity_json(const std::vector<ValidityFlag>& flags) {
  ordered_json j = ordered_json::object();
  for (const auto& f : flags) j[f.name] = f.satisfied;
  return j;
}

void require_valid(const std::vector<ValidityFlag>& flags) {
  for (const auto& f : flags)
    if (!f.satisfied)
      throw CLI::ValidationError("precondition violated: " + f.name);
}

ordered_json bound_json(const MetricBound& b) {
  ordered_json j;
  j["lower_log2"] = static_cast<double>(b.lower_log2);
  j["upper_log2"] = b.upper_valid ? ordered_json(static_cast<double>(b.upper_log2))
                                  : ordered_json(nullptr);
  j["lower_display"] = b.lower_display();
  j["upper_display"] = b.upper_valid ? ordered_json(b.upper_display()) : ordered_json(nullptr);
  j["clipped"] = b.clipped_lower || b.clipped_upper;
  j["validity"] = validity_json(b.validity);
  return j;
}

void emit(const ordered_json& payload, bool as_json, const std::string& text) {
  if (as_json)
    std::cout << payload.dump(2) << "\n";
  else
    std::cout << text;
}

std::string render_table_report(const TableReport& rep) {
  std::string out;
  out += "# " + rep.table + "\n";
  out += "| cell | published | computed | raw | status |\n";
  out += "|---|---|---|---|---|\n";
  char buf[256];
  for (const auto& c : rep.cells) {
    if (c.skipped) {
      std::snprintf(buf, sizeof buf, "| %s | - | - | - | skipped |\n", c.cell.c_str());
    } else {
      std::snprintf(buf, sizeof buf, "| %s | %.6g | %.6g | %.4f | %s |\n", c.cell.c_str(),
                    c.expected, c.computed, c.raw, c.pass ? "ok" : "FAIL");
    }
    out += buf;
  }
  std::snprintf(buf, sizeof buf, "%zu/%zu cells ok (%.2fs)\n",
                rep.cells.size() - rep.failures(), rep.cells.size(), rep.seconds);
  out += buf;
  return out;
}

ordered_json table_report_json(const TableReport& rep) {
  ordered_json j;
  j["table"] = rep.table;
  j["pass"] = rep.all_pass();
  j["seconds"] = rep.seconds;
  ordered_json cells = ordered_json::array();
  ordered_json failures = ordered_json::array();
  for (const auto& c : rep.cells) {
    ordered_json cj;
    cj["cell"] = c.cell;
    if (c.skipped) {
      cj["skipped"] = true;
    } else {
      cj["published"] = c.expected;
      cj["computed"] = c.computed;
      cj["raw"] = c.raw;
      cj["tolerance"] = c.tolerance;
      cj["pass"] = c.pass;
      if (!c.pass) failures.push_back(c.cell);
    }
    cells.push_back(std::move(cj));
  }
  j["cells"] = std::move(cells);
  j["failures"] = std::move(failures);
  return j;
}

struct SandwichCheck {
  std::string name;
  double value;
  double lo, hi;
  bool pass;
};

ordered_json sandwich_json(const std::vector<SandwichCheck>& checks) {
  ordered_json arr = ordered_json::array();
  for (const auto& c : checks) {
    ordered_json j;
    j["name"] = c.name;
    j["value"] = c.value;
    j["lower"] = c.lo;
    j["upper"] = c.hi;
    j["pass"] = c.pass;
    arr.push_back(std::move(j));
  }
  return arr;
}

int emit_simulation(const SimulationReport& rep, const std::vector<SandwichCheck>& checks,
                    const std::string& format) {
  bool all = true;
  for (const auto& c : checks) all = all && c.pass;
  if (format == "csv") {
    rep.write_csv(std::cout);
  } else {
    ordered_json j = ordered_json::parse(rep.to_json());
    j["checks"] = sandwich_json(checks);
    j["pass"] = all;
    std::cout << j.dump(2) << "\n";
  }
  return all ? 0 : 1;
}

std::uint64_t pick_seed(CLI::Option* opt, std::uint64_t seed) {
  if (opt->count()) return seed;
  std::random_device rd;
  const std::uint64_t s = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  std::cerr << "seed not given; using --seed " << s << "\n";
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Security bounds, exact ball combinatorics and attack simulators "
               "for binary biometric template databases"};
  app.require_subcommand(1);
  std::string format = "md";
  app.add_option("--format", format, "Output format: md | json | csv")
      ->check(CLI::IsMember({"md", "json", "csv"}));

  // ---------------------------------------------------------------- bounds
  auto* bounds = app.add_subcommand("bounds", "Attack-complexity and probability bounds");
  bounds->require_subcommand(1);

  struct {
    unsigned n = 128;
    std::string users = "1";
    unsigned eps = 0;
    std::string form = "exact";
    bool distinct = false;
    std::string ell, kappa = "0", trials = "1";
    double alpha = -1;
    double fmr = 0, fpir = 0, far = 0, fta = 0;
  } arg;

  const auto form_of = [&] {
    return arg.form == "entropy" ? BoundForm::Entropy : BoundForm::ExactVolume;
  };
  const auto sys_params = [&] {
    SystemParams p;
    p.n = arg.n;
    p.users = parse_count_u64(arg.users);
    p.epsilon = arg.eps;
    if (!arg.ell.empty()) p.ell = parse_count_u64(arg.ell);
    if (arg.alpha >= 0) p.alpha = arg.alpha;
    return p;
  };

  auto* b_out = bounds->add_subcommand("outsider", "Outsider median-trial bounds");
  b_out->add_option("--n", arg.n, "Template bit-length")->required();
  b_out->add_option("--N,--users", arg.users, "Database size")->required();
  b_out->add_option("--eps", arg.eps, "Decision threshold")->required();
  b_out->add_option("--form", arg.form, "exact | entropy")
      ->check(CLI::IsMember({"exact", "entropy"}));
  b_out->add_flag("--distinct", arg.distinct, "Assume pairwise-distinct templates");
  b_out->callback([&] {
    const SystemParams p = sys_params();
    const MetricBound b = arg.distinct ? outsider_bounds_distinct(p, form_of())
                                       : outsider_bounds(p, form_of());
    require_valid(b.validity);
    ordered_json j = bound_json(b);
    char line[128];
    std::snprintf(line, sizeof line, "%lld / %lld  (raw %.4Lf / %.4Lf log2 trials)\n",
                  b.lower_display(), b.upper_display(), b.lower_log2, b.upper_log2);
    emit(j, format == "json", line);
  });

  auto* b_ins = bounds->add_subcommand("insider", "Insider median-round bounds");
  b_ins->add_option("--n", arg.n)->required();
  b_ins->add_option("--N,--users", arg.users)->required();
  b_ins->add_option("--eps", arg.eps)->required();
  b_ins->add_option("--ell", arg.ell, "Number of attacking users (default: all)");
  b_ins->add_option("--alpha", arg.alpha, "Slack exponent for the entropy-form upper bound");
  b_ins->add_option("--form", arg.form)->check(CLI::IsMember({"exact", "entropy"}));
  b_ins->callback([&] {
    const SystemParams p = sys_params();
    const MetricBound b = insider_bounds_subset(p, form_of());
    ordered_json j = bound_json(b);
    const auto amin = min_feasible_alpha(p);
    j["min_feasible_alpha"] = amin ? ordered_json(*amin) : ordered_json(nullptr);
    char line[160];
    if (b.upper_valid)
      std::snprintf(line, sizeof line, "%lld / %lld  (raw %.4Lf / %.4Lf log2 rounds)\n",
                    b.lower_display(), b.upper_display(), b.lower_log2, b.upper_log2);
    else
      std::snprintf(line, sizeof line, "%lld / -  (upper bound undefined here)\n",
                    b.lower_display());
    emit(j, format == "json", line);
  });

  auto* b_weak = bounds->add_subcommand("weak-nc", "Weak near-collision probability bounds");
  b_weak->add_option("--n", arg.n)->required();
  b_weak->add_option("--N,--users", arg.users)->required();
  b_weak->add_option("--eps", arg.eps)->required();
  b_weak->callback([&] {
    const ProbabilityBounds b = weak_nc_probability_bounds(sys_params());
    ordered_json j;
    j["lower"] = static_cast<double>(b.lower.linear());
    j["upper"] = static_cast<double>(b.upper.linear());
    j["validity"] = validity_json(b.validity);
    char line[128];
    std::snprintf(line, sizeof line, "P(weak NC) in [%.6Lg, %.6Lg]\n", b.lower.linear(),
                  b.upper.linear());
    emit(j, format == "json", line);
  });

  auto* b_fmr = bounds->add_subcommand("fmr", "Outsider trials from a uniform FMR");
  b_fmr->add_option("--fmr", arg.fmr)->required();
  b_fmr->add_option("--N,--users", arg.users)->required();
  b_fmr->callback([&] {
    const std::uint64_t users = parse_count_u64(arg.users);
    const TrialBound b = outsider_trials_fmr(std::vector<double>(users, arg.fmr));
    ordered_json j;
    j["unbounded"] = b.unbounded;
    j["lower_log2"] = static_cast<double>(b.lower_log2);
    j["upper_log2"] = static_cast<double>(b.upper_log2);
    if (b.median_log2) j["median_log2"] = static_cast<double>(*b.median_log2);
    char line[128];
    std::snprintf(line, sizeof line, "%.0Lf / %.0Lf  (raw %.4Lf / %.4Lf log2 trials)\n",
                  std::floor(b.lower_log2), std::floor(b.upper_log2), b.lower_log2,
                  b.upper_log2);
    emit(j, format == "json", b.unbounded ? "unbounded (zero FMR)\n" : line);
  });

  auto* b_fpir = bounds->add_subcommand("fpir", "Outsider trials in identification mode");
  b_fpir->add_option("--fpir", arg.fpir)->required();
  b_fpir->callback([&] {
    const TrialBound b = outsider_trials_fpir(arg.fpir);
    ordered_json j;
    j["unbounded"] = b.unbounded;
    j["lower_log2"] = static_cast<double>(b.lower_log2);
    j["upper_log2"] = static_cast<double>(b.upper_log2);
    char line[128];
    std::snprintf(line, sizeof line, "%.4Lf / %.4Lf log2 trials\n", b.lower_log2, b.upper_log2);
    emit(j, format == "json", b.unbounded ? "unbounded (zero FPIR)\n" : line);
  });

  auto* b_far = bounds->add_subcommand("far", "Outsider trials from FAR and FTA");
  b_far->add_option("--far", arg.far)->required();
  b_far->add_option("--fta", arg.fta)->required();
  b_far->add_option("--N,--users", arg.users)->required();
  b_far->callback([&] {
    const std::uint64_t users = parse_count_u64(arg.users);
    const TrialBound b = outsider_trials_far(std::vector<double>(users, arg.far),
                                             std::vector<double>(users, arg.fta));
    ordered_json j;
    j["unbounded"] = b.unbounded;
    j["lower_log2"] = static_cast<double>(b.lower_log2);
    j["upper_log2"] = static_cast<double>(b.upper_log2);
    char line[128];
    std::snprintf(line, sizeof line, "%.4Lf / %.4Lf log2 trials\n", b.lower_log2, b.upper_log2);
    emit(j, format == "json", b.unbounded ? "unbounded (zero rate)\n" : line);
  });

  auto* b_ad = bounds->add_subcommand("adaptive", "Adaptive-attacker distribution quantities");
  b_ad->add_option("--n", arg.n)->required();
  b_ad->add_option("--N,--users", arg.users)->required();
  b_ad->add_option("--eps", arg.eps)->required();
  b_ad->add_option("--kappa", arg.kappa, "Templates inferred dead per failure")->required();
  b_ad->add_option("--a,--trials", arg.trials, "Trial horizon")->required();
  b_ad->callback([&] {
    const SystemParams p = sys_params();
    const BigInt kappa = parse_count(arg.kappa);
    const std::uint64_t a = parse_count_u64(arg.trials);
    const CdfRatioReport r = cdf_ratio(p, kappa, a);
    ordered_json j;
    j["adaptive_over_naive"] = static_cast<double>(r.adaptive_over_naive);
    j["naive_over_adaptive"] = static_cast<double>(r.naive_over_adaptive);
    j["shifted_over_naive"] = static_cast<double>(r.shifted_over_naive);
    j["discrepancy"] = static_cast<double>(r.discrepancy);
    char line[200];
    std::snprintf(line, sizeof line,
                  "CDF ratio adaptive/naive = %.6Lf (shifted-product variant %.6Lf)\n",
                  r.adaptive_over_naive, r.shifted_over_naive);
    emit(j, format == "json", line);
  });

  // ------------------------------------------------------------- reproduce
  auto* repro = app.add_subcommand("reproduce", "Recompute the published reference tables");
  std::string table = "all";
  repro->add_option("table", table, "table1 | table2 | table3 | section5 | all")
      ->check(CLI::IsMember({"table1", "table2", "table3", "section5", "all"}));
  int repro_rc = 0;
  repro->callback([&] {
    std::vector<std::string> names;
    if (table == "all")
      names = {"table1", "table2", "table3", "section5"};
    else
      names = {table};
    ordered_json all = ordered_json::array();
    bool pass = true;
    for (const auto& name : names) {
      const TableReport rep = reproduce_table(name);
      pass = pass && rep.all_pass();
      if (format == "json")
        all.push_back(table_report_json(rep));
      else
        std::cout << render_table_report(rep) << "\n";
    }
    if (format == "json") std::cout << all.dump(2) << "\n";
    repro_rc = pass ? 0 : 1;
  });

  // ------------------------------------------------------------- recommend
  auto* rec = app.add_subcommand("recommend", "Parameter recommendations");
  struct {
    double fmr = -1;
    std::uint64_t lambda = 100;
    int n = -1;
    std::string users;
    int eps = -1;
  } rc;
  rec->add_option("--fmr", rc.fmr, "Matcher FMR (pairs with --lambda)");
  rec->add_option("--lambda", rc.lambda, "Security level 1/lambda");
  rec->add_option("--n", rc.n, "Template bit-length");
  rec->add_option("--N,--users", rc.users, "Database size");
  rec->add_option("--eps", rc.eps, "Decision threshold");
  rec->callback([&] {
    ordered_json j;
    char line[256];
    if (rc.fmr >= 0) {
      const auto nmax = max_database_size(rc.fmr, SecurityLevel{rc.lambda});
      const auto approx = max_database_size_asymptotic(rc.fmr, SecurityLevel{rc.lambda});
      if (!nmax) throw CLI::ValidationError("FMR = 0 admits any database size");
      j["max_users"] = *nmax;
      j["asymptotic"] = *approx;
      std::snprintf(line, sizeof line, "N <= %" PRIu64 "  (asymptotic %.1f, lambda=%" PRIu64 ")\n",
                    *nmax, *approx, rc.lambda);
      emit(j, format == "json", line);
      return;
    }
    const bool has_n = rc.n >= 0, has_users = !rc.users.empty(), has_eps = rc.eps >= 0;
    if (has_n + has_users + has_eps != 2)
      throw CLI::ValidationError("give --fmr, or exactly two of --n/--N/--eps");
    SystemParams probe;
    if (has_n && has_users) {
      const auto v = max_epsilon_for_robustness(rc.n, parse_count_u64(rc.users));
      if (!v) throw CLI::ValidationError("infeasible: no epsilon keeps S1 >= 1/2");
      j["max_epsilon"] = *v;
      probe.n = static_cast<unsigned>(rc.n);
      probe.users = parse_count_u64(rc.users);
      probe.epsilon = static_cast<unsigned>(*v);
      std::snprintf(line, sizeof line, "eps <= %u\n", *v);
    } else if (has_eps && has_users) {
      const auto v = min_dimension_for_robustness(rc.eps, parse_count_u64(rc.users));
      if (!v) throw CLI::ValidationError("infeasible: no dimension keeps S1 >= 1/2");
      j["min_dimension"] = *v;
      probe.n = *v;
      probe.users = parse_count_u64(rc.users);
      probe.epsilon = static_cast<unsigned>(rc.eps);
      std::snprintf(line, sizeof line, "n >= %u\n", *v);
    } else {
      const auto v = max_users_for_robustness(rc.eps, rc.n);
      if (!v) throw CLI::ValidationError("infeasible: no database size keeps S1 >= 1/2");
      j["max_users"] = *v;
      probe.n = static_cast<unsigned>(rc.n);
      probe.users = *v;
      probe.epsilon = static_cast<unsigned>(rc.eps);
      std::snprintf(line, sizeof line, "N <= %" PRIu64 "\n", *v);
    }
    const SecurityScores s = security_scores(probe);
    j["achieved"] = {{"s1", s.s1}, {"s2", s.s2_table}, {"s3", s.s3_table}};
    char extra[128];
    std::snprintf(extra, sizeof extra, "achieved S1=%.4f S2=%lld S3=%lld\n", s.s1, s.s2_table,
                  s.s3_table);
    emit(j, format == "json", std::string(line) + extra);
  });

  // ----------------------------------------------------------------- audit
  auto* audit = app.add_subcommand("audit", "Scan a template database file");
  struct {
    std::string file;
    unsigned eps = 0;
    unsigned multi = 3;
    std::uint64_t budget = 100'000'000;
    std::uint64_t masters = 16;
  } au;
  audit->add_option("file", au.file, "Database file (see README for the format)")->required();
  audit->add_option("--eps", au.eps, "Decision threshold")->required();
  audit->add_option("--multi", au.multi, "Largest multi-collision order to search");
  audit->add_option("--budget", au.budget, "Enumeration budget");
  audit->add_option("--masters", au.masters, "Cap on listed master templates");
  int audit_rc = 0;
  audit->callback([&] {
    const TemplateDatabase db = read_database_file(au.file);
    ordered_json j;
    j["n"] = db.n;
    j["templates"] = db.templates.size();
    j["epsilon"] = au.eps;
    std::string text;
    char line[256];
    std::snprintf(line, sizeof line, "n=%u N=%zu eps=%u\n", db.n, db.templates.size(), au.eps);
    text += line;

    const WeakNcScan scan = brute_force_weak_nc(db, au.eps);
    j["weak_nc"] = scan.found;
    ordered_json pairs = ordered_json::array();
    for (auto [a, b] : scan.pairs) {
      pairs.push_back({{"i", a},
                       {"j", b},
                       {"distance", hamming_distance(db.templates[a], db.templates[b])}});
      std::snprintf(line, sizeof line, "near-collision: templates %zu and %zu (distance %u)\n",
                    a, b, hamming_distance(db.templates[a], db.templates[b]));
      text += line;
    }
    j["colliding_pairs"] = std::move(pairs);
    if (!scan.found) text += "no weak near-collision\n";

    ordered_json cliques = ordered_json::array();
    for (unsigned m = 3; m <= au.multi && m <= db.templates.size(); ++m) {
      const bool found = brute_force_multi_nc(db, au.eps, m);
      cliques.push_back({{"order", m}, {"found", found}});
      std::snprintf(line, sizeof line, "%u-wise near-collision: %s\n", m,
                    found ? "present" : "absent");
      text += line;
      if (!found) break;
    }
    j["multi_nc"] = std::move(cliques);

    // exact joint reach of every flagged pair, and of the whole database
    ordered_json clusters = ordered_json::array();
    for (auto [a, b] : scan.pairs) {
      TemplateDatabase pair_db;
      pair_db.n = db.n;
      pair_db.templates = {db.templates[a], db.templates[b]};
      const BigInt card = intersection_cardinality(pair_db, au.eps, au.budget);
      clusters.push_back({{"i", a}, {"j", b}, {"joint_ball_points", card.str()}});
      std::snprintf(line, sizeof line, "templates %zu,%zu jointly reachable from %s points\n",
                    a, b, card.str().c_str());
      text += line;
    }
    j["pair_intersections"] = std::move(clusters);

    const BigInt full = intersection_cardinality(db, au.eps, au.budget);
    j["full_intersection_points"] = full.str();
    std::snprintf(line, sizeof line, "points within eps of every template: %s\n",
                  full.str().c_str());
    text += line;
    if (full > 0 && full <= au.masters) {
      const auto masters = enumerate_intersection(db, au.eps, au.budget, au.masters);
      ordered_json list = ordered_json::array();
      std::ostringstream hex;
      TemplateDatabase out_db;
      out_db.n = db.n;
      out_db.templates = masters;
      write_database(hex, out_db);
      list.push_back(hex.str());
      j["master_templates"] = std::move(list);
      text += "master templates:\n" + hex.str();
    }
    audit_rc = scan.found ? 1 : 0;
    j["findings"] = scan.found;
    emit(j, format == "json", text);
  });

  // -------------------------------------------------------------- simulate
  auto* sim = app.add_subcommand("simulate", "Monte Carlo attack simulators");
  sim->require_subcommand(1);
  struct {
    unsigned n = 20;
    std::string users = "50";
    unsigned eps = 3;
    std::uint64_t seed = 0;
    std::uint64_t replicas = 1000;
    std::uint64_t max_trials = 1'000'000;
    std::string ell;
    std::string mode = "redraw";
    std::uint64_t success_states = 64;
    std::string kappa = "0";
    unsigned threads = 0;
  } sa;
  int sim_rc = 0;

  auto* s_out = sim->add_subcommand("outsider", "Guessing outsider vs random databases");
  auto* s_out_seed = s_out->add_option("--seed", sa.seed, "Master seed");
  s_out->add_option("--n", sa.n)->required();
  s_out->add_option("--N,--users", sa.users)->required();
  s_out->add_option("--eps", sa.eps)->required();
  s_out->add_option("--replicas", sa.replicas);
  s_out->add_option("--max-trials", sa.max_trials);
  s_out->add_option("--threads", sa.threads);
  s_out->callback([&] {
    const std::uint64_t seed = pick_seed(s_out_seed, sa.seed);
    const std::uint64_t users = parse_count_u64(sa.users);
    const SimulationReport rep =
        simulate_outsider(sa.n, users, sa.eps, seed, sa.max_trials, sa.replicas, sa.threads);
    std::vector<SandwichCheck> checks;
    SystemParams p;
    p.n = sa.n;
    p.users = users;
    p.epsilon = sa.eps;
    const MetricBound b = outsider_bounds(p);
    if (rep.empirical_median && all_valid(b.validity)) {
      const double lo = std::floor(std::exp2(static_cast<double>(b.lower_log2)));
      const double hi = std::ceil(std::exp2(static_cast<double>(b.upper_log2)));
      checks.push_back({"median_within_bounds", *rep.empirical_median, lo, hi,
                        lo <= *rep.empirical_median && *rep.empirical_median <= hi});
    }
    if (rep.empirical_frequency) {
      const double expect = static_cast<double>(strong_nc_probability(p).linear());
      const double sigma = rep.frequency_sigma.value_or(0.0);
      checks.push_back({"per_trial_success_3sigma", *rep.empirical_frequency,
                        expect - 3 * sigma, expect + 3 * sigma,
                        std::fabs(*rep.empirical_frequency - expect) <= 3 * sigma});
    }
    sim_rc = emit_simulation(rep, checks, format);
  });

  auto* s_in = sim->add_subcommand("insider", "Insider rounds vs random databases");
  auto* s_in_seed = s_in->add_option("--seed", sa.seed, "Master seed");
  s_in->add_option("--n", sa.n)->required();
  s_in->add_option("--N,--users", sa.users)->required();
  s_in->add_option("--eps", sa.eps)->required();
  s_in->add_option("--ell", sa.ell, "Attacking users (default: all)");
  s_in->add_option("--mode", sa.mode)->check(CLI::IsMember({"redraw", "fixed"}));
  s_in->add_option("--replicas", sa.replicas);
  s_in->add_option("--max-rounds", sa.max_trials);
  s_in->add_option("--threads", sa.threads);
  s_in->callback([&] {
    const std::uint64_t seed = pick_seed(s_in_seed, sa.seed);
    const std::uint64_t users = parse_count_u64(sa.users);
    const std::uint64_t ell = sa.ell.empty() ? users : parse_count_u64(sa.ell);
    const InsiderMode mode =
        sa.mode == "redraw" ? InsiderMode::Redraw : InsiderMode::FixedDb;
    const SimulationReport rep = simulate_insider(sa.n, users, sa.eps, ell, seed,
                                                  sa.max_trials, mode, sa.replicas, sa.threads);
    std::vector<SandwichCheck> checks;
    SystemParams p;
    p.n = sa.n;
    p.users = users;
    p.epsilon = sa.eps;
    const ProbabilityBounds weak = weak_nc_probability_bounds(p);
    double round0 = 0;
    for (const auto& [k, v] : rep.extras)
      if (k == "round0_frequency") round0 = v;
    const double sigma0 =
        std::sqrt(std::max(round0 * (1 - round0), 1e-12) / static_cast<double>(rep.replicas));
    if (all_valid(weak.validity)) {
      checks.push_back({"round0_within_weak_nc_bounds", round0,
                        static_cast<double>(weak.lower.linear()) - 3 * sigma0,
                        static_cast<double>(weak.upper.linear()) + 3 * sigma0, false});
      checks.back().pass =
          round0 >= checks.back().lo && round0 <= checks.back().hi;
    }
    if (rep.empirical_frequency) {
      // per-round success probability bounds from the union-measure bracket
      const long double v = ball_volume(sa.n, sa.eps).log2.linear();
      long double corr = 0.0L;
      if (sa.eps + 1 <= sa.n)
        corr = intersection_measure(sa.n, sa.eps, sa.eps + 1).log2.linear();
      const long double m = static_cast<long double>(users - 1);
      const long double pk_hi = std::min(1.0L, m * v);
      const long double pk_lo = std::max(0.0L, m * v - 0.5L * m * (m - 1.0L) * corr);
      const double pw_hi = static_cast<double>(-std::expm1(ell * std::log1p(-pk_hi)));
      const double pw_lo = static_cast<double>(-std::expm1(ell * std::log1p(-pk_lo)));
      const double sigma = rep.frequency_sigma.value_or(0.0);
      const double f = *rep.empirical_frequency;
      checks.push_back({"per_round_success_within_bounds", f,
                        std::min(pw_lo, pw_hi) - 3 * sigma, pw_hi + 3 * sigma, false});
      checks.back().pass = f >= checks.back().lo && f <= checks.back().hi;
    }
    sim_rc = emit_simulation(rep, checks, format);
  });

  auto* s_ad = sim->add_subcommand("adaptive", "Exact urn model of the adaptive attacker");
  auto* s_ad_seed = s_ad->add_option("--seed", sa.seed, "Master seed");
  s_ad->add_option("--n", sa.n, "Universe log2")->required();
  s_ad->add_option("--success-states", sa.success_states)->required();
  s_ad->add_option("--kappa", sa.kappa)->required();
  s_ad->add_option("--replicas", sa.replicas);
  s_ad->add_option("--max-trials", sa.max_trials);
  s_ad->add_option("--threads", sa.threads);
  s_ad->callback([&] {
    const std::uint64_t seed = pick_seed(s_ad_seed, sa.seed);
    const std::uint64_t kappa = parse_count_u64(sa.kappa);
    const SimulationReport rep = simulate_adaptive(sa.n, sa.success_states, kappa, seed,
                                                   sa.replicas, sa.max_trials, sa.threads);
    std::vector<SandwichCheck> checks;
    AttackerConfig cfg{sa.n,
                       static_cast<long double>(sa.success_states) /
                           std::exp2(static_cast<long double>(sa.n)),
                       BigInt(kappa)};
    const auto median = median_trials_adaptive(cfg);
    if (median && rep.empirical_median) {
      // the empirical median of the discrete law sits within +-1 of the true one
      checks.push_back({"median_near_analytic", *rep.empirical_median,
                        static_cast<double>(*median) - 1.0, static_cast<double>(*median) + 1.0,
                        std::fabs(*rep.empirical_median - static_cast<double>(*median)) <= 1.0});
    }
    sim_rc = emit_simulation(rep, checks, format);
  });

  auto* s_gen = sim->add_subcommand("generate", "Write a random database file to stdout");
  auto* s_gen_seed = s_gen->add_option("--seed", sa.seed, "Master seed");
  bool distinct = false;
  s_gen->add_option("--n", sa.n)->required();
  s_gen->add_option("--N,--users", sa.users)->required();
  s_gen->add_flag("--distinct", distinct, "Reject duplicate templates");
  s_gen->callback([&] {
    const std::uint64_t seed = pick_seed(s_gen_seed, sa.seed);
    write_database(std::cout, generate_database(sa.n, parse_count_u64(sa.users), seed, distinct));
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return repro_rc + audit_rc + sim_rc ? 1 : 0;
}
