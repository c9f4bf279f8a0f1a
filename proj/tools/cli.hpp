#pragma once

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <locale>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "normjac/bench.hpp"
#include "normjac/driver.hpp"
#include "normjac/genmat.hpp"
#include "normjac/matrix_io.hpp"

namespace normjac::cli {

enum ExitCode : int { kOk = 0, kInputError = 1, kNotConverged = 2, kVerifyFailed = 3 };

using json = nlohmann::json;

// Shortest text that reads back to x; locale independent.
inline std::string num(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

inline std::string num(double x, int prec) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, prec);
  return std::string(buf, res.ptr);
}

inline std::string sci(double x) {
  std::ostringstream s;
  s.imbue(std::locale::classic());
  s << std::scientific << std::setprecision(6) << x;
  return s.str();
}

// ||A A^T - A^T A||_F / ||A||_F^2
inline double normality_defect(const DenseMatrix& A) {
  const double nrm = frobenius_norm(A);
  if (nrm == 0.0) return 0.0;
  const DenseMatrix At = A.transposed();
  return frobenius_norm(A * At - At * A) / (nrm * nrm);
}

inline json report_json(const SchurResult& r) {
  json steps = json::array();
  for (const auto& s : r.steps) {
    json j{{"step", std::string(step_name(s.kind))},
           {"sweeps", s.stats.sweeps},
           {"initial_off", s.stats.initial_off},
           {"final_off", s.stats.final_off},
           {"converged", s.stats.converged},
           {"stalled", s.stats.stalled}};
    if (!s.cluster.empty()) {
      j["cluster"] = s.cluster;
      j["skew_norm"] = s.skew_norm;
    }
    if (s.kind == StepKind::II1) {
      j["sigma"] = s.sigma;
      j["sskh_gap"] = s.sskh_gap;
    }
    steps.push_back(std::move(j));
  }
  json spectrum = json::array();
  for (const auto& z : r.spectrum.eigenvalues()) spectrum.push_back({{"re", z.real()}, {"im", z.imag()}});
  json pert = json::object();
  auto opt = [](const std::optional<double>& v) -> json {
    if (!v) return nullptr;
    return std::isfinite(*v) ? json(*v) : json("inf");
  };
  pert["distinct"] = opt(r.perturbation.distinct);
  pert["repeated"] = opt(r.perturbation.repeated);
  pert["real_eigs"] = opt(r.perturbation.real_eigs);
  return {{"n", r.S.size()},
          {"rho", r.rho},
          {"converged", r.converged},
          {"norm", r.norm},
          {"offschur_ratio", r.offschur_ratio},
          {"ortho_residual", r.ortho_residual},
          {"reconstruction_residual", r.reconstruction_residual},
          {"max_block_deviation", r.max_block_deviation},
          {"perturbation", pert},
          {"steps", steps},
          {"spectrum", spectrum}};
}

// One "key value" pair per line.
inline void write_report_text(std::ostream& out, const SchurResult& r) {
  out << "n " << r.S.size() << '\n'
      << "rho " << num(r.rho) << '\n'
      << "converged " << (r.converged ? "true" : "false") << '\n'
      << "offschur_ratio " << sci(r.offschur_ratio) << '\n'
      << "ortho_residual " << sci(r.ortho_residual) << '\n'
      << "reconstruction_residual " << sci(r.reconstruction_residual) << '\n';
  for (const auto& s : r.steps) {
    out << "step " << step_name(s.kind) << " sweeps=" << s.stats.sweeps << " off=" << sci(s.stats.final_off);
    if (!s.cluster.empty()) out << " size=" << s.cluster.size();
    out << '\n';
  }
  for (const auto& z : r.spectrum.eigenvalues()) out << "eigenvalue " << num(z.real()) << ' ' << num(z.imag()) << '\n';
}

inline void write_text(const std::string& path, const std::string& body) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << body;
}

inline std::string strip_extension(const std::string& path) {
  std::filesystem::path p(path);
  return (p.parent_path() / p.stem()).string();
}

struct DecomposeArgs {
  std::string input, out, snapshots;
  double rho = default_rho;
  int max_sweeps = 30;
  bool explicit_variant = false;
  bool quiet = false;
};

inline int cmd_decompose(const DecomposeArgs& a, std::ostream& out, std::ostream& err) {
  DenseMatrix A;
  try {
    A = load_matrix(a.input);
  } catch (const std::exception& e) {
    err << a.input << ": " << e.what() << '\n';
    return kInputError;
  }
  const double defect = normality_defect(A);
  if (defect > 1e-8) err << "warning: input is not normal (commutator " << sci(defect) << " relative)\n";
  const std::string prefix = a.out.empty() ? strip_extension(a.input) : a.out;
  Config cfg;
  cfg.rho = a.rho;
  cfg.max_sweeps = a.max_sweeps;
  cfg.variant = a.explicit_variant ? PaardekooperVariant::Explicit : PaardekooperVariant::Implicit;
  if (!a.snapshots.empty()) {
    std::filesystem::create_directories(a.snapshots);
    save_matrix((std::filesystem::path(a.snapshots) / "step0_input.txt").string(), A);
    cfg.snapshot = [&, k = 0](std::string_view step, const DenseMatrix& W) mutable {
      ++k;
      save_matrix((std::filesystem::path(a.snapshots) / ("step" + std::to_string(k) + "_" + std::string(step) + ".txt")).string(), W);
    };
  }
  SchurResult r;
  try {
    r = decompose(A, cfg);
  } catch (const std::invalid_argument& e) {
    err << e.what() << '\n';
    return kInputError;
  }
  save_matrix(prefix + ".S.txt", r.S);
  save_matrix(prefix + ".Q.txt", r.Q);
  write_text(prefix + ".report.json", report_json(r).dump(2) + "\n");
  std::ostringstream txt;
  txt.imbue(std::locale::classic());
  write_report_text(txt, r);
  write_text(prefix + ".report.txt", txt.str());
  if (!a.quiet) out << txt.str();
  if (!r.converged) {
    err << "not converged: offschur ratio " << sci(r.offschur_ratio) << " above rho " << sci(r.rho) << '\n';
    return kNotConverged;
  }
  return kOk;
}

struct GenerateArgs {
  std::string cls = "Exp2", out;
  std::size_t n = 64;
  std::uint64_t seed = 1;
  double alpha1 = 0.0, alpha2 = 0.0;
  int sigma_groups = 1;
};

inline int cmd_generate(const GenerateArgs& a, std::ostream& out, std::ostream& err) {
  const auto cls = parse_class(a.cls);
  if (!cls) {
    err << "unknown class " << a.cls << '\n';
    return kInputError;
  }
  GroundTruth g;
  try {
    g = generate({*cls, a.n, a.seed, a.alpha1, a.alpha2, a.sigma_groups});
  } catch (const std::invalid_argument& e) {
    err << e.what() << '\n';
    return kInputError;
  }
  const std::string prefix = a.out.empty() ? a.cls + "_n" + std::to_string(g.A.size()) + "_s" + std::to_string(a.seed) : a.out;
  save_matrix(prefix + ".txt", g.A);
  json spectrum = json::array();
  for (const auto& z : g.spectrum.eigenvalues()) spectrum.push_back({{"re", z.real()}, {"im", z.imag()}});
  std::vector<std::vector<double>> q(g.Q.size(), std::vector<double>(g.Q.size()));
  for (std::size_t i = 0; i < g.Q.size(); ++i)
    for (std::size_t j = 0; j < g.Q.size(); ++j) q[i][j] = g.Q(i, j);
  const json truth{{"class", a.cls},
                   {"n", g.A.size()},
                   {"seed", a.seed},
                   {"alpha1", a.alpha1},
                   {"alpha2", a.alpha2},
                   {"real_count", g.real_count},
                   {"repeated_pairs", g.repeated_pairs},
                   {"sigma_groups", g.spectrum.sigma_groups},
                   {"expected_steps", g.expected_steps},
                   {"spectrum", spectrum},
                   {"Q", q}};
  write_text(prefix + ".truth.json", truth.dump(2) + "\n");
  out << prefix << ".txt\n";
  return kOk;
}

struct BenchArgs {
  std::vector<std::string> classes{"Exp1", "Exp2", "Exp3", "Exp4", "Exp5"};
  std::vector<std::size_t> sizes{64, 128};
  std::vector<std::string> solvers{"alg2", "zhou", "randdiag"};
  int trials = 10;
  std::uint64_t seed = 1;
  double rho = default_rho;
  double alpha1 = 0.0, alpha2 = 0.0;
  int max_sweeps = 30;
  std::string out;
};

struct BenchCell {
  std::string cls;
  std::size_t n = 0;
  SolverId solver = SolverId::Alg2;
  double ratio = 0.0, seconds = 0.0, sweeps = 0.0;
  int converged = 0;
};

inline std::vector<BenchCell> run_bench(const BenchArgs& a, const std::vector<EnsembleClass>& classes,
                                        const std::vector<SolverId>& solvers) {
  std::vector<BenchCell> cells;
  for (auto cls : classes)
    for (std::size_t n : a.sizes) {
      std::vector<GroundTruth> inputs;
      for (int t = 0; t < a.trials; ++t)
        inputs.push_back(generate({cls, n, a.seed + static_cast<std::uint64_t>(t), a.alpha1, a.alpha2}));
      for (auto id : solvers) {
        std::vector<double> ratios, times;
        BenchCell c{std::string(class_name(cls)), inputs.front().A.size(), id};
        for (int t = 0; t < a.trials; ++t) {
          const SolverRun r = run_solver(id, inputs[static_cast<std::size_t>(t)].A, a.rho,
                                         a.seed + static_cast<std::uint64_t>(t), a.max_sweeps);
          ratios.push_back(r.ratio);
          times.push_back(r.seconds);
          c.sweeps += r.sweeps;
          c.converged += r.converged;
        }
        c.ratio = geometric_mean(ratios);
        c.seconds = median(times);
        c.sweeps /= a.trials;
        cells.push_back(c);
      }
    }
  return cells;
}

inline int emit_csv(const BenchArgs& a, const std::vector<BenchCell>& cells, bool relative, std::ostream& out,
                    std::ostream& err) {
  std::ostringstream csv;
  csv.imbue(std::locale::classic());
  csv << "class,n,solver,ratio,seconds";
  if (relative) csv << ",relative";
  csv << ",sweeps,converged,trials,seed,rho,alpha1,alpha2\n";
  // reference time per (class, n): alg2 when present, else the first solver listed
  std::map<std::pair<std::string, std::size_t>, double> ref;
  for (const auto& c : cells) {
    const auto key = std::make_pair(c.cls, c.n);
    if (c.solver == SolverId::Alg2 || !ref.count(key)) ref[key] = c.seconds;
  }
  for (const auto& c : cells) {
    csv << c.cls << ',' << c.n << ',' << solver_name(c.solver) << ',' << sci(c.ratio) << ',' << sci(c.seconds);
    if (relative) {
      const double r0 = ref[{c.cls, c.n}];
      csv << ',' << num(r0 > 0.0 ? c.seconds / r0 : 1.0, 6);
    }
    csv << ',' << num(c.sweeps, 6) << ',' << c.converged << ',' << a.trials << ',' << a.seed << ',' << num(a.rho)
        << ',' << num(a.alpha1) << ',' << num(a.alpha2) << '\n';
  }
  if (a.out.empty()) {
    out << csv.str();
  } else {
    try {
      write_text(a.out, csv.str());
    } catch (const std::exception& e) {
      err << e.what() << '\n';
      return kInputError;
    }
  }
  return kOk;
}

inline bool resolve_solvers(const BenchArgs& a, std::vector<SolverId>& ids, std::ostream& err) {
  for (const auto& s : a.solvers) {
    const auto id = parse_solver(s);
    if (!id) {
      err << "unknown solver " << s << '\n';
      return false;
    }
    ids.push_back(*id);
  }
  return true;
}

inline int cmd_bench_accuracy(const BenchArgs& a, std::ostream& out, std::ostream& err) {
  std::vector<EnsembleClass> classes;
  for (const auto& c : a.classes) {
    const auto cls = parse_class(c);
    if (!cls) {
      err << "unknown class " << c << '\n';
      return kInputError;
    }
    classes.push_back(*cls);
  }
  std::vector<SolverId> ids;
  if (!resolve_solvers(a, ids, err)) return kInputError;
  try {
    return emit_csv(a, run_bench(a, classes, ids), false, out, err);
  } catch (const std::invalid_argument& e) {
    err << e.what() << '\n';
    return kInputError;
  }
}

inline int cmd_bench_time(const BenchArgs& a, std::ostream& out, std::ostream& err) {
  std::vector<SolverId> ids;
  if (!resolve_solvers(a, ids, err)) return kInputError;
  try {
    return emit_csv(a, run_bench(a, {EnsembleClass::AlphaFamily}, ids), true, out, err);
  } catch (const std::invalid_argument& e) {
    err << e.what() << '\n';
    return kInputError;
  }
}

struct VerifyArgs {
  std::string matrix, S, Q;
  double rho = default_rho;
};

inline int cmd_verify(const VerifyArgs& a, std::ostream& out, std::ostream& err) {
  DenseMatrix A, S, Q;
  try {
    A = load_matrix(a.matrix);
    S = load_matrix(a.S);
    Q = load_matrix(a.Q);
  } catch (const std::exception& e) {
    err << e.what() << '\n';
    return kInputError;
  }
  if (S.size() != A.size() || Q.size() != A.size()) {
    err << "dimension mismatch: A is " << A.size() << ", S is " << S.size() << ", Q is " << Q.size() << '\n';
    return kInputError;
  }
  const double n = static_cast<double>(A.size());
  const double nrm = std::max(frobenius_norm(A), 1e-300);
  struct Check {
    const char* name;
    double value, tol;
  };
  const Check checks[] = {
      {"reconstruction", reconstruction_residual(A, Q, S) / nrm, 1e-11 * n},
      {"orthogonality", orthogonality_residual(Q), 1e-12 * n},
      {"offschur", offschur(S) / nrm, 10.0 * a.rho},
  };
  bool ok = true;
  for (const auto& c : checks) {
    const bool pass = c.value <= c.tol;
    ok = ok && pass;
    out << c.name << ' ' << sci(c.value) << " tol " << sci(c.tol) << (pass ? " ok" : " FAILED") << '\n';
    if (!pass) err << "verify: " << c.name << " check failed\n";
  }
  return ok ? kOk : kVerifyFailed;
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Real Schur decomposition of real normal matrices"};
  app.require_subcommand(1);

  DecomposeArgs dec;
  auto* d = app.add_subcommand("decompose", "decompose a matrix file");
  d->add_option("input", dec.input, "matrix file")->required();
  d->add_option("--out", dec.out, "output prefix (default: input path without extension)");
  d->add_option("--rho", dec.rho, "relative tolerance");
  d->add_option("--max-sweeps", dec.max_sweeps);
  d->add_option("--snapshots", dec.snapshots, "directory for the working matrix after each step");
  d->add_flag("--explicit", dec.explicit_variant, "explicit Paardekooper variant");
  d->add_flag("--quiet", dec.quiet);

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "write a random normal matrix and its ground truth");
  g->add_option("--class", gen.cls);
  g->add_option("--n", gen.n);
  g->add_option("--seed", gen.seed);
  g->add_option("--alpha1", gen.alpha1);
  g->add_option("--alpha2", gen.alpha2);
  g->add_option("--sigma-groups", gen.sigma_groups);
  g->add_option("--out", gen.out, "output prefix");

  BenchArgs acc;
  std::string acc_classes, acc_sizes, acc_solvers;
  auto* ba = app.add_subcommand("bench-accuracy", "geometric-mean accuracy per class, size and solver");
  ba->add_option("--classes", acc_classes, "comma separated");
  ba->add_option("--sizes", acc_sizes, "comma separated");
  ba->add_option("--solvers", acc_solvers, "alg2,zhou,randdiag");
  ba->add_option("--trials", acc.trials)->check(CLI::PositiveNumber);
  ba->add_option("--seed", acc.seed);
  ba->add_option("--rho", acc.rho);
  ba->add_option("--max-sweeps", acc.max_sweeps);
  ba->add_option("--out", acc.out, "CSV path (default stdout)");

  BenchArgs tim;
  tim.sizes = {64, 128, 256};
  tim.solvers = {"alg2", "zhou"};
  std::string tim_sizes, tim_solvers;
  auto* bt = app.add_subcommand("bench-time", "median wall-clock time on the alpha family");
  bt->add_option("--alpha1", tim.alpha1);
  bt->add_option("--alpha2", tim.alpha2);
  bt->add_option("--sizes", tim_sizes, "comma separated");
  bt->add_option("--solvers", tim_solvers, "alg2,zhou,randdiag");
  bt->add_option("--trials", tim.trials)->check(CLI::PositiveNumber);
  bt->add_option("--seed", tim.seed);
  bt->add_option("--rho", tim.rho);
  bt->add_option("--max-sweeps", tim.max_sweeps);
  bt->add_option("--out", tim.out, "CSV path (default stdout)");

  VerifyArgs ver;
  auto* v = app.add_subcommand("verify", "check A = Q S Q^T, orthogonality of Q and offschur of S");
  v->add_option("matrix", ver.matrix)->required();
  v->add_option("S", ver.S)->required();
  v->add_option("Q", ver.Q)->required();
  v->add_option("--rho", ver.rho);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInputError;
  }

  auto parse_sizes = [](const std::string& s, std::vector<std::size_t>& dst) {
    if (s.empty()) return;
    dst.clear();
    for (const auto& t : split_list(s)) dst.push_back(static_cast<std::size_t>(std::stoul(t)));
  };
  try {
    if (*d) return cmd_decompose(dec, out, err);
    if (*g) return cmd_generate(gen, out, err);
    if (*ba) {
      if (!acc_classes.empty()) acc.classes = split_list(acc_classes);
      if (!acc_solvers.empty()) acc.solvers = split_list(acc_solvers);
      parse_sizes(acc_sizes, acc.sizes);
      return cmd_bench_accuracy(acc, out, err);
    }
    if (*bt) {
      if (!tim_solvers.empty()) tim.solvers = split_list(tim_solvers);
      parse_sizes(tim_sizes, tim.sizes);
      return cmd_bench_time(tim, out, err);
    }
    if (*v) return cmd_verify(ver, out, err);
  } catch (const std::logic_error& e) {  // stoul and friends
    err << e.what() << '\n';
    return kInputError;
  } catch (const std::runtime_error& e) {
    err << e.what() << '\n';
    return kInputError;
  }
  return kInputError;
}

}  // namespace normjac::cli
