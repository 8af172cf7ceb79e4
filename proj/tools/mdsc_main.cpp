#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "mdsc/code_model.hpp"
#include "mdsc/cycles.hpp"
#include "mdsc/flao.hpp"
#include "mdsc/grade.hpp"
#include "mdsc/io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace mdsc;

namespace {

std::string default_fixture_dir() {
  if (const char* env = std::getenv("MDSC_FIXTURES")) return env;
  return "fixtures";
}

struct ParamFlags {
  CodeParams p;
  void attach(CLI::App* cmd) {
    cmd->add_option("--gamma", p.gamma, "base matrix rows")->required();
    cmd->add_option("--kappa", p.kappa, "base matrix columns")->required();
    cmd->add_option("--z", p.z, "circulant size")->required();
    cmd->add_option("-L,--coupling-length", p.coupling_len, "number of replicas")->required();
    cmd->add_option("-m,--memory", p.memory, "memory (components minus one)")->required();
    cmd->add_option("-M,--copies", p.copies, "number of coupled copies", true);
  }
};

// A design job bundles everything the pipeline commands need.
struct DesignJob {
  CodeParams params;
  std::string partitioning, lifting;
  Objective objective = Objective::cycle6;
  std::optional<std::string> pdist;
  std::optional<std::vector<double>> pstar;
  GradeConfig grade;
  FlaoConfig flao;
  std::string out = "out";
};

DesignJob load_job(const std::string& path) {
  json j = json::parse(read_file(path));
  DesignJob job;
  job.params = params_from_json(j.at("params").dump());
  job.partitioning = j.at("partitioning").get<std::string>();
  job.lifting = j.at("lifting").get<std::string>();
  job.objective = objective_from_string(j.value("objective", "cycle6"));
  if (j.contains("pdist")) job.pdist = j.at("pdist").get<std::string>();
  if (j.contains("pstar")) job.pstar = j.at("pstar").get<std::vector<double>>();
  if (j.contains("grade")) {
    const auto& g = j.at("grade");
    job.grade.alpha = g.value("alpha", job.grade.alpha);
    job.grade.epsilon = g.value("eps", job.grade.epsilon);
    job.grade.density_cap = g.value("density", job.grade.density_cap);
    job.grade.w1_zero = g.value("w1_zero", job.grade.w1_zero);
    job.grade.max_iters = g.value("max_iters", job.grade.max_iters);
    job.grade.min_iters = g.value("min_iters", job.grade.min_iters);
  }
  if (j.contains("flao")) {
    const auto& f = j.at("flao");
    job.flao.relocation_bound = f.value("rb", job.flao.relocation_bound);
    job.flao.seed = f.value("seed", job.flao.seed);
    job.flao.density_cap = f.value("density_cap", job.flao.density_cap);
  }
  job.flao.cycle_length = job.objective == Objective::cycle6 ? 6 : 8;
  job.grade.objective = job.objective;
  job.out = j.value("out", job.out);
  return job;
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty())
    std::cout << text;
  else
    write_file(out_path, text);
}

std::string design_report(const DesignJob& job, const MdGradeResult& gr, const FlaoResult& fr) {
  const CodeParams& p = job.params;
  std::ostringstream os;
  long long length = 1LL * p.copies * p.coupling_len * p.kappa * p.z;
  os << "MD-SC design summary\n";
  os << "  parameters      (gamma,kappa,z,L,m,M) = (" << p.gamma << "," << p.kappa << ","
     << p.z << "," << p.coupling_len << "," << p.memory << "," << p.copies << ")\n";
  os << "  objective       " << to_string(job.objective) << "\n";
  os << "  length          " << length << " bits\n";
  os << "  design rate     " << design_rate(p) << "\n";
  os << "  forecast        E=" << gr.fc.e_cycles << " (candidates " << gr.fc.n_candidates
     << ", bounds [" << gr.fc.lower << ", " << gr.fc.upper << "])\n";
  os << "  md density      " << md_density(fr.relocation) << " %\n";
  os << "  cycle count     " << fr.md_cycle_count << " (initial " << fr.initial_active * p.copies
     << ")\n";
  os << "  iterations      " << fr.iterations << "\n";
  os << "  seed            " << fr.seed << "\n";
  return os.str();
}

int run(int argc, char** argv) {
  CLI::App app{"design and analysis of multi-dimensional spatially-coupled QC-LDPC codes"};
  app.require_subcommand(1);

  // ---- census ----
  auto* census = app.add_subcommand("census", "count short cycles of a (MD-)SC code");
  ParamFlags census_p;
  census_p.attach(census);
  std::string c_part, c_lift, c_reloc, c_out;
  int c_len = 6;
  bool c_serial = false;
  census->add_option("--partitioning", c_part, "partitioning matrix file")->required();
  census->add_option("--lifting", c_lift, "lifting matrix file")->required();
  census->add_option("--relocation", c_reloc, "relocation matrix file (MD census)");
  census->add_option("--cycle-length", c_len, "6 or 8 (4 also supported for SC)", true);
  census->add_option("--out", c_out, "output file (default stdout)");
  census->add_flag("--serial", c_serial, "use the serial reference kernel");
  census->callback([&] {
    PartitioningMatrix K{load_matrix(c_part)};
    LiftingMatrix L{load_matrix(c_lift)};
    CycleCensus cen;
    if (!c_reloc.empty()) {
      RelocationMatrix R{load_matrix(c_reloc)};
      cen = count_md_census(K, L, R, census_p.p, c_len / 2);
    } else {
      SparseQcMatrix H = build_sc_matrix(K, L, census_p.p);
      cen = c_serial ? count_lifted_cycles_serial(H, c_len / 2)
                     : count_lifted_cycles(H, c_len / 2);
    }
    emit(census_to_json(cen), c_out);
  });

  // ---- grade ----
  auto* grade = app.add_subcommand("grade", "find a locally-optimal relocation distribution");
  ParamFlags grade_p;
  grade_p.attach(grade);
  std::string g_obj = "cycle6", g_pstar, g_out = "out";
  GradeConfig g_cfg;
  uint64_t g_seed = 1;
  grade->add_option("--objective", g_obj, "cycle6 | cycle8", true);
  grade->add_option("--pstar", g_pstar, "SC edge distribution JSON (default: derive)");
  grade->add_option("--alpha", g_cfg.alpha, "gradient step size", true);
  grade->add_option("--eps", g_cfg.epsilon, "convergence accuracy", true);
  grade->add_option("--density", g_cfg.density_cap, "target MD density percent", true);
  grade->add_option("--seed", g_seed, "seed for the edge-distribution search", true);
  grade->add_flag("!--with-w1", g_cfg.w1_zero, "include the 4-cycle-pattern term");
  grade->add_option("--out", g_out, "output directory", true);
  grade->callback([&] {
    g_cfg.objective = objective_from_string(g_obj);
    std::vector<double> pstar;
    if (g_pstar.empty()) {
      pstar = grade_1d(grade_p.p, g_cfg.objective, g_cfg.w1_zero, g_seed);
    } else {
      pstar = json::parse(read_file(g_pstar)).get<std::vector<double>>();
    }
    MdGradeResult res = md_grade(grade_p.p, pstar, g_cfg);
    fs::create_directories(g_out);
    write_file(g_out + "/pstar.json", json(pstar).dump(2) + "\n");
    write_file(g_out + "/pdist.json", pdist_to_json(res.P));
    write_file(g_out + "/forecast.json", forecast_to_json(res.fc));
    std::cout << "status " << res.status << " after " << res.iterations
              << " iterations; relocated " << 100.0 * (1.0 - res.P.column0_sum())
              << " %, expected cycles " << res.fc.e_cycles << "\n";
  });

  // ---- forecast ----
  auto* fcast = app.add_subcommand("forecast", "expected cycle count for a distribution");
  ParamFlags f_p;
  f_p.attach(fcast);
  std::string f_pdist, f_obj = "cycle6", f_out;
  bool f_with_w1 = false;
  fcast->add_option("--pdist", f_pdist, "probability-distribution JSON")->required();
  fcast->add_option("--objective", f_obj, "cycle6 | cycle8", true);
  fcast->add_flag("--with-w1", f_with_w1, "include the 4-cycle-pattern term");
  fcast->add_option("--out", f_out, "output file (default stdout)");
  fcast->callback([&] {
    ProbDistMatrix P = pdist_from_json(read_file(f_pdist));
    Forecast fc = forecast(P, f_p.p, objective_from_string(f_obj), !f_with_w1);
    emit(forecast_to_json(fc), f_out);
  });

  // ---- flao ----
  auto* flao_cmd = app.add_subcommand("flao", "greedy finite-length relocation optimizer");
  std::string fl_job, fl_out;
  uint64_t fl_seed = 0;
  flao_cmd->add_option("--job", fl_job, "design job JSON")->required();
  flao_cmd->add_option("--seed", fl_seed, "override the job seed");
  flao_cmd->add_option("--out", fl_out, "override the job output directory");
  flao_cmd->callback([&] {
    DesignJob job = load_job(fl_job);
    if (!job.pdist) throw CLI::ValidationError("--job", "flao needs a pdist entry in the job");
    if (fl_seed) job.flao.seed = fl_seed;
    if (!fl_out.empty()) job.out = fl_out;
    PartitioningMatrix K{load_matrix(job.partitioning)};
    LiftingMatrix L{load_matrix(job.lifting)};
    ProbDistMatrix P = pdist_from_json(read_file(*job.pdist));
    FlaoResult res = fl_ao(K, L, job.params, P, job.flao);
    fs::create_directories(job.out);
    write_file(job.out + "/flao_result.json", flao_result_to_json(res));
    save_matrix(res.relocation.m, job.out + "/relocation.txt");
    std::cout << "cycles " << res.md_cycle_count << " after " << res.iterations
              << " iterations (seed " << res.seed << ")\n";
  });

  // ---- design ----
  auto* design = app.add_subcommand("design", "full pipeline: edge distribution, "
                                              "gradient descent, greedy relocation");
  std::string d_job, d_out;
  uint64_t d_seed = 0;
  design->add_option("--job", d_job, "design job JSON")->required();
  design->add_option("--seed", d_seed, "override the job seed");
  design->add_option("--out", d_out, "override the job output directory");
  design->callback([&] {
    DesignJob job = load_job(d_job);
    if (d_seed) job.flao.seed = d_seed;
    if (!d_out.empty()) job.out = d_out;
    PartitioningMatrix K{load_matrix(job.partitioning)};
    LiftingMatrix L{load_matrix(job.lifting)};

    std::vector<double> pstar =
        job.pstar ? *job.pstar : grade_1d(job.params, job.objective, job.grade.w1_zero, job.flao.seed);
    MdGradeResult gr = md_grade(job.params, pstar, job.grade);
    FlaoResult fr = fl_ao(K, L, job.params, gr.P, job.flao);
    CycleCensus final_census =
        count_md_census(K, L, fr.relocation, job.params, job.flao.cycle_length / 2);

    fs::create_directories(job.out);
    write_file(job.out + "/pstar.json", json(pstar).dump(2) + "\n");
    write_file(job.out + "/pdist.json", pdist_to_json(gr.P));
    write_file(job.out + "/forecast.json", forecast_to_json(gr.fc));
    write_file(job.out + "/flao_result.json", flao_result_to_json(fr));
    save_matrix(fr.relocation.m, job.out + "/relocation.txt");
    write_file(job.out + "/census.json", census_to_json(final_census));
    write_file(job.out + "/report.txt", design_report(job, gr, fr));
    std::cout << design_report(job, gr, fr);
  });

  // ---- verify ----
  auto* verify = app.add_subcommand("verify", "recount a bundled design against its recorded census");
  std::string v_case, v_dir = default_fixture_dir();
  verify->add_option("case", v_case, "fixture case name")->required();
  verify->add_option("--fixtures", v_dir, "fixture directory", true);
  verify->callback([&] {
    FixtureManifest man = load_manifest(v_dir);
    const FixtureCase& c = man.at(v_case);
    PartitioningMatrix K{man.load(c.partitioning)};
    LiftingMatrix L{man.load(c.lifting)};
    VerifyReport rep;
    if (c.relocation.empty()) {
      rep.name = c.name;
      rep.expected = c.expected;
      rep.actual = count_lifted_cycles(build_sc_matrix(K, L, c.params), c.cycle_length / 2).total;
      rep.pass = rep.actual == rep.expected;
    } else {
      RelocationMatrix R{man.load(c.relocation)};
      rep = verify_design(K, L, R, c.params, c.cycle_length, c.expected, c.name);
    }
    std::cout << (rep.pass ? "PASS" : "FAIL") << " " << rep.name << ": counted " << rep.actual
              << ", recorded " << rep.expected << "\n";
    if (!rep.pass) throw CLI::RuntimeError("verify", 1);
  });

  // ---- export ----
  auto* exp = app.add_subcommand("export", "convert a matrix between text and JSON formats");
  std::string e_in, e_out, e_fmt = "text";
  exp->add_option("--in", e_in, "input matrix file")->required();
  exp->add_option("--format", e_fmt, "text | json", true);
  exp->add_option("--out", e_out, "output file (default stdout)");
  exp->callback([&] {
    IntGrid g = load_matrix(e_in);
    std::string text = e_fmt == "json" ? format_matrix_json(g) : format_matrix_text(g);
    emit(text, e_out);
  });

  CLI11_PARSE(app, argc, argv);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
