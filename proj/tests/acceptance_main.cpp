// Acceptance suite: one line per criterion, nonzero exit if any fails.
//
// Each criterion pins the tolerance in code; timings are printed so the
// runtime targets are visible in the log.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <string>
#include <vector>

#include "mdsc/code_model.hpp"
#include "mdsc/cycles.hpp"
#include "mdsc/flao.hpp"
#include "mdsc/grade.hpp"
#include "mdsc/io.hpp"
#include "mdsc/rng.hpp"

using namespace mdsc;

namespace {

std::string g_fixtures = MDSC_FIXTURE_DIR;

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

struct Bundle {
  PartitioningMatrix K1, K3;
  LiftingMatrix L1, L3;
  RelocationMatrix R1, R3;
  ProbDistMatrix P31;
};

Bundle load_bundle() {
  Bundle b;
  b.K1.m = load_matrix(g_fixtures + "/sc1_partitioning.txt");
  b.L1.m = load_matrix(g_fixtures + "/sc1_lifting.txt");
  b.R1.m = load_matrix(g_fixtures + "/gdmd11_relocation.txt");
  b.K3.m = load_matrix(g_fixtures + "/sc3_partitioning.txt");
  b.L3.m = load_matrix(g_fixtures + "/sc3_lifting.txt");
  b.R3.m = load_matrix(g_fixtures + "/gdmd31_relocation.txt");
  b.P31 = pdist_from_json(read_file(g_fixtures + "/gdmd31_pdist.json"));
  return b;
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (!strcmp(argv[i], "--only") && i + 1 < argc) only = atoi(argv[++i]);
    if (!strcmp(argv[i], "--fixtures") && i + 1 < argc) g_fixtures = argv[++i];
  }
  if (const char* env = std::getenv("MDSC_FIXTURES")) g_fixtures = env;

  Bundle b = load_bundle();

  // shared census results (criterion 5 reuses 1 and 3)
  long long direct_c6_L30 = -1, direct_c8_L40 = -1;

  std::vector<Criterion> criteria;

  criteria.push_back({1, "exact cycle-6 census, code 1 at L=30 (expect 79917)", [&] {
    SparseQcMatrix H = build_sc_matrix(b.K1, b.L1, CodeParams{4, 17, 17, 30, 1, 1});
    direct_c6_L30 = count_lifted_cycles(H, 3).total;
    return Outcome{direct_c6_L30 == 79917,
                   fmt("counted %lld", direct_c6_L30) +
                       (direct_c6_L30 != 79917
                            ? " — the bundled lifting matrix lifts with 7684 4-cycles (girth 4),"
                              " so the published girth-6 census is not reachable from it"
                            : "")};
  }});

  criteria.push_back({2, "exact MD cycle-6 census, design 1.1 at M=3 (expect 6375)", [&] {
    long long n = count_md_cycles(b.K1, b.L1, b.R1, CodeParams{4, 17, 17, 10, 1, 3}, 3);
    return Outcome{n == 6375, fmt("counted %lld", n) +
                                  (n != 6375 ? " — same bundled-lifting defect as criterion 1"
                                             : "")};
  }});

  criteria.push_back({3, "exact cycle-8 census, code 3 at L=40 (expect 1397319)", [&] {
    SparseQcMatrix H = build_sc_matrix(b.K3, b.L3, CodeParams{3, 19, 23, 40, 2, 1});
    direct_c8_L40 = count_lifted_cycles(H, 4).total;
    return Outcome{direct_c8_L40 == 1397319, fmt("counted %lld", direct_c8_L40)};
  }});

  criteria.push_back({4, "exact MD cycle-8 census, design 3.1 at M=4 (expect 239752)", [&] {
    long long n = count_md_cycles(b.K3, b.L3, b.R3, CodeParams{3, 19, 23, 10, 2, 4}, 4);
    return Outcome{n == 239752, fmt("counted %lld", n)};
  }});

  criteria.push_back({5, "replica-scaling identity at L=10 vs direct censuses", [&] {
    if (direct_c6_L30 < 0 || direct_c8_L40 < 0) return Outcome{false, "criteria 1/3 not run"};
    CycleCensus c1 = count_lifted_cycles(
        build_sc_matrix(b.K1, b.L1, CodeParams{4, 17, 17, 10, 1, 1}), 3);
    CycleCensus c3 = count_lifted_cycles(
        build_sc_matrix(b.K3, b.L3, CodeParams{3, 19, 23, 10, 2, 1}), 4);
    long long s1 = scale_census_to_length(c1, 10, 30);
    long long s3 = scale_census_to_length(c3, 10, 40);
    bool pass = s1 == direct_c6_L30 && s3 == direct_c8_L40;
    return Outcome{pass, fmt("code 1: scaled %lld vs direct %lld; code 3: scaled %lld vs %lld",
                             s1, direct_c6_L30, s3, direct_c8_L40)};
  }});

  criteria.push_back({6, "gradient-descent reproduction of the published percentages", [&] {
    const double expect[10] = {14.83, 45.16, 60.75, 66.67, 70.6,
                               70.6,  66.67, 60.75, 45.16, 14.83};
    CodeParams p{3, 17, 7, 100, 9, 9};
    std::vector<double> ps = grade_1d(p, Objective::cycle8, true, 1);
    GradeConfig cfg;
    cfg.objective = Objective::cycle8;
    cfg.density_cap = 34.45;
    MdGradeResult res = md_grade(p, ps, cfg);
    double total = 100.0 * (1.0 - res.P.column0_sum());
    double worst = 0;
    std::string per;
    for (int i = 0; i <= 9; ++i) {
      double pc = 100.0 * (1.0 - res.P.at(i, 0) / ps[i]);
      worst = std::max(worst, std::abs(pc - expect[i]));
      per += fmt("%.2f ", pc);
    }
    bool pass = worst <= 3.0 && std::abs(total - 34.45) <= 2.0;
    return Outcome{pass, fmt("components [%s], worst deviation %.2f pts (limit 3), total %.2f%% "
                             "(expect 34.45 +/- 2)",
                             per.c_str(), worst, total)};
  }});

  criteria.push_back({7, "forecast for design 3.1 within 5% of 228070, bound relation exact", [&] {
    CodeParams p{3, 19, 23, 10, 2, 4};
    std::vector<double> ps = grade_1d(p, Objective::cycle8, true, 1);
    GradeConfig cfg;
    cfg.objective = Objective::cycle8;
    cfg.density_cap = 26.05;  // relocated share of the published distribution
    MdGradeResult res = md_grade(p, ps, cfg);
    Forecast own = forecast(res.P, p, Objective::cycle8, true);
    Forecast fixture_fc = forecast(b.P31, p, Objective::cycle8, true);
    bool bound_ok = own.e_cycles <= own.upper + 1e-9 &&
                    own.upper == own.n_candidates * p.coupling_len * p.copies &&
                    fixture_fc.e_cycles <= fixture_fc.upper + 1e-9;
    bool value_ok = std::abs(own.e_cycles - 228070.0) <= 0.05 * 228070.0;
    return Outcome{value_ok && bound_ok,
                   fmt("own distribution E=%.0f, bundled distribution E=%.0f, expect 228070 "
                       "+/- 5%%; upper-bound relation %s (only the b=0 slice of the coefficient "
                       "sum reproduces the published value: %s)",
                       own.e_cycles, fixture_fc.e_cycles, bound_ok ? "holds" : "VIOLATED",
                       "see decisions ledger")};
  }});

  criteria.push_back({8, "analytic gradients vs central differences (<1e-6 rel)", [&] {
    Rng rng(4321);
    double worst = 0;
    for (auto [m, M] : {std::pair{1, 2}, {2, 3}, {3, 4}}) {
      for (int t = 0; t < 25; ++t) {
        ProbDistMatrix P(m, M);
        double tot = 0;
        for (auto& v : P.coeffs) {
          v = 0.05 + rng.uniform01();
          tot += v;
        }
        for (auto& v : P.coeffs) v /= tot;
        for (int i = 0; i <= m; ++i) P.row_targets[i] = P.row_sum(i);
        auto g6 = gradient_n6(P, 4, 17);
        auto g8 = gradient_n8(P, 4, 17, true);
        const double h = 1e-6;
        for (size_t k = 0; k < P.coeffs.size(); ++k) {
          ProbDistMatrix Pp = P, Pm = P;
          Pp.coeffs[k] += h;
          Pm.coeffs[k] -= h;
          double fd6 = (objective_n6(Pp, 4, 17) - objective_n6(Pm, 4, 17)) / (2 * h);
          double fd8 = (objective_n8(Pp, 4, 17, true) - objective_n8(Pm, 4, 17, true)) / (2 * h);
          worst = std::max(worst, std::abs(fd6 - g6[k]) / std::max(std::abs(g6[k]), 1e-12));
          worst = std::max(worst, std::abs(fd8 - g8[k]) / std::max(std::abs(g8[k]), 1e-12));
        }
      }
    }
    return Outcome{worst < 1e-6, fmt("worst relative error %.3g", worst)};
  }});

  criteria.push_back({9, "pattern counting equals the bit-level oracle (100 instances)", [&] {
    Rng rng(987);
    int instances = 0;
    long long comparisons = 0;
    while (instances < 100) {
      CodeParams p;
      p.gamma = 2 + static_cast<int>(rng.bounded(2));
      p.kappa = p.gamma + 1 + static_cast<int>(rng.bounded(5 - p.gamma));
      p.z = 2 + static_cast<int>(rng.bounded(4));
      p.memory = static_cast<int>(rng.bounded(3));
      p.coupling_len = p.memory + 1 + static_cast<int>(rng.bounded(4 - p.memory));
      p.copies = 1;
      PartitioningMatrix K{IntGrid(p.gamma, p.kappa)};
      LiftingMatrix L{IntGrid(p.gamma, p.kappa)};
      for (auto& v : K.m.data) v = static_cast<int>(rng.bounded(p.memory + 1));
      for (auto& v : L.m.data) v = static_cast<int>(rng.bounded(p.z));
      SparseQcMatrix H = build_sc_matrix(K, L, p);
      for (int g : {2, 3, 4}) {
        if (count_lifted_cycles(H, g).total != brute_force_cycle_count(H, g))
          return Outcome{false, fmt("mismatch at instance %d, cycle length %d", instances, 2 * g)};
        ++comparisons;
      }
      ++instances;
    }
    return Outcome{true, fmt("%d instances, %lld exact comparisons", instances, comparisons)};
  }});

  criteria.push_back({10, "greedy optimizer reaches 1.25x the published count (10 seeds)", [&] {
    CodeParams p{3, 19, 23, 10, 2, 4};
    std::vector<double> ps = grade_1d(p, Objective::cycle8, true, 1);
    GradeConfig gcfg;
    gcfg.objective = Objective::cycle8;
    gcfg.density_cap = 26.05;
    MdGradeResult gr = md_grade(p, ps, gcfg);
    long long best = -1;
    for (uint64_t seed = 1; seed <= 10; ++seed) {
      FlaoConfig cfg;
      cfg.cycle_length = 8;
      cfg.relocation_bound = 200;
      cfg.seed = seed;
      FlaoResult res = fl_ao(b.K3, b.L3, p, gr.P, cfg);
      if (res.iterations > 200)
        return Outcome{false, fmt("seed %llu exceeded the iteration bound", (unsigned long long)seed)};
      long long prev = res.initial_active;
      for (size_t i = 0; i + 1 < res.trace.size(); ++i) {
        if (res.trace[i].active >= prev)
          return Outcome{false, fmt("seed %llu trace not strictly decreasing", (unsigned long long)seed)};
        prev = res.trace[i].active;
      }
      if (best < 0 || res.md_cycle_count < best) best = res.md_cycle_count;
    }
    const long long limit = static_cast<long long>(1.25 * 239752);
    return Outcome{best <= limit, fmt("best of 10 seeds: %lld (limit %lld)", best, limit)};
  }});

  int failures = 0;
  for (auto& c : criteria) {
    if (only && c.id != only) continue;
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    printf("[%s] criterion %2d: %s — %s (%.2fs)\n", o.pass ? "PASS" : "FAIL", c.id, c.name,
           o.detail.c_str(), dt);
    fflush(stdout);
    if (!o.pass) ++failures;
  }
  if (failures)
    printf("%d criterion(s) failed\n", failures);
  else
    printf("all criteria passed\n");
  return failures ? 1 : 0;
}
