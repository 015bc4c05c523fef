// Copyright 2026 The absmbd Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// Command-line front end: simulate, order, bench, fdcheck.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "absmbd/analysis.hpp"
#include "absmbd/dynamics.hpp"
#include "absmbd/errors.hpp"
#include "absmbd/fdcheck.hpp"
#include "absmbd/kinematics.hpp"
#include "absmbd/model_io.hpp"

namespace {

using namespace absmbd;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// CSV sink: the --out file, or stdout when no path is given. Summaries go to
// stdout with a file and to stderr otherwise, so piped CSV stays clean.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw Error("cannot open output file " + path);
    }
  }
  std::ostream& csv() { return file_ ? *file_ : std::cout; }
  std::ostream& report() { return file_ ? std::cout : std::cerr; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

struct Flags {
  std::string model;
  std::string form = "rA";
  std::string mode = "dynamics";
  double h = 1e-3;
  std::vector<double> h_list = {1e-2, 3e-3, 1e-3, 3e-4, 1e-4};
  double t_end = 3.0;
  double theta = 1e-3;
  bool auto_theta = false;
  double pos_tol = 1e-10;
  int max_iter = 50;
  std::string out;
  std::uint64_t seed = 1;
  int reps = 0;
  // order
  int body = 1;
  int component = 2;
  // bench / simulate
  std::string reaction_hessian = "fd";
  // fdcheck test hook
  std::string tamper;
};

ReactionHessian parse_reaction_hessian(const std::string& s) {
  if (s == "fd") return ReactionHessian::kFiniteDifference;
  if (s == "analytic") return ReactionHessian::kAnalytic;
  throw PreconditionError("unknown reaction Hessian '" + s + "' (expected fd or analytic)");
}

std::vector<Formulation> parse_forms(const std::string& s) {
  if (s == "all") return {Formulation::kRA, Formulation::kRP, Formulation::kREps};
  std::vector<Formulation> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_formulation(item));
  return out;
}

double drift(Formulation f, const BodyDynState& b) {
  if (f == Formulation::kRA) return (b.A.transpose() * b.A - Mat3::Identity()).cwiseAbs().maxCoeff();
  if (f == Formulation::kRP) return std::abs(0.5 * b.p.squaredNorm() - 0.5);
  return 0.0;
}

void body_header(std::ostream& os, Formulation f, int id) {
  const std::string p = ",b" + std::to_string(id) + "_";
  for (const char* q : {"r", "rdot", "rddot"})
    for (const char* c : {"x", "y", "z"}) os << p << q << c;
  if (f == Formulation::kRA) {
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) os << p << "A" << i << j;
  } else if (f == Formulation::kRP) {
    for (int i = 0; i < 4; ++i) os << p << "e" << i;
  } else {
    for (const char* a : {"phi", "theta", "psi"}) os << p << a;
  }
  for (const char* c : {"x", "y", "z"}) os << p << "wbar" << c;
}

void body_row(std::ostream& os, Formulation f, const BodyDynState& b) {
  for (const Vec3* v : {&b.r, &b.r_dot, &b.r_ddot})
    for (int c = 0; c < 3; ++c) os << ',' << num((*v)[c]);
  if (f == Formulation::kRA) {
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) os << ',' << num(b.A(i, j));
  } else if (f == Formulation::kRP) {
    for (int i = 0; i < 4; ++i) os << ',' << num(b.p[i]);
  } else {
    for (int i = 0; i < 3; ++i) os << ',' << num(b.eps[i]);
  }
  for (int c = 0; c < 3; ++c) os << ',' << num(b.omega_bar[c]);
}

struct RunReport {
  std::string model;
  Formulation form = Formulation::kRA;
  RunMode mode = RunMode::kDynamics;
  double h = 0.0;
  // theta (dynamics) or pos_tol (kinematics).
  double tol = 0.0;
  int steps = 0;
  double mean_iterations = 0.0;
  int max_iterations = 0;
  double wall_seconds = 0.0;
  int system_dim = 0;

  void print(std::ostream& os) const {
    os << "model " << model << "\n"
       << "mode " << to_string(mode) << "\n"
       << "form " << to_string(form) << "\n"
       << "h " << num(h) << "\n"
       << (mode == RunMode::kDynamics ? "theta " : "pos_tol ") << num(tol) << "\n"
       << "system_dim " << system_dim << "\n"
       << "steps " << steps << "\n"
       << "mean_iterations " << num(mean_iterations) << "\n"
       << "max_iterations " << max_iterations << "\n"
       << "wall_seconds " << num(wall_seconds) << "\n";
  }
};

int cmd_simulate(const Flags& fl) {
  const MechanismModel m = load_model(fl.model);
  const Formulation f = parse_formulation(fl.form);
  const RunMode mode = parse_run_mode(fl.mode);
  Output out(fl.out);
  RunReport rep;
  rep.model = m.name;
  rep.form = f;
  rep.mode = mode;
  rep.h = fl.h;

  std::ostringstream csv;
  csv << "t,iterations,correction_norm,phi_norm,orientation_drift";
  for (const Body& b : m.bodies) body_header(csv, f, b.id);
  csv << "\n";

  if (mode == RunMode::kKinematics) {
    KinematicsConfig cfg;
    cfg.form = f;
    cfg.h = fl.h;
    cfg.t_end = fl.t_end;
    cfg.pos_tol = fl.pos_tol;
    cfg.max_iter = fl.max_iter;
    const KinematicsLog log = kinematics_run(m, cfg);
    for (std::size_t n = 1; n < log.records.size(); ++n) {
      const KinStepRecord& r = log.records[n];
      double d = 0.0;
      for (const auto& b : r.bodies) d = std::max(d, drift(f, b));
      csv << num(r.t) << ',' << r.iterations << ',' << num(r.correction_norm) << ','
          << num(r.phi_norm) << ',' << num(d);
      for (const auto& b : r.bodies) body_row(csv, f, b);
      csv << "\n";
    }
    rep.tol = cfg.pos_tol;
    rep.steps = log.steps;
    rep.mean_iterations = log.mean_iterations();
    rep.max_iterations = log.max_iterations;
    rep.wall_seconds = log.wall_seconds;
    rep.system_dim = (f == Formulation::kRP ? 7 : 6) * m.nb();
  } else {
    DynamicsConfig cfg;
    cfg.form = f;
    cfg.h = fl.h;
    cfg.t_end = fl.t_end;
    cfg.theta = fl.theta;
    cfg.auto_theta = fl.auto_theta;
    cfg.max_iter = fl.max_iter;
    cfg.reaction_hessian = parse_reaction_hessian(fl.reaction_hessian);
    const TrajectoryLog log = dynamics_run(m, cfg);
    for (std::size_t n = 0; n < log.steps.size(); ++n) {
      const DynStepRecord& r = log.steps[n];
      csv << num(r.t) << ',' << r.iterations << ',' << num(r.correction_norm) << ','
          << num(r.phi_norm) << ',' << num(r.orientation_drift);
      for (const auto& b : log.states[n + 1].bodies) body_row(csv, f, b);
      csv << "\n";
    }
    rep.tol = log.theta;
    rep.steps = static_cast<int>(log.steps.size());
    rep.mean_iterations = log.mean_iterations();
    rep.max_iterations = log.max_iterations;
    rep.wall_seconds = log.wall_seconds;
    rep.system_dim = log.system_dim;
  }
  out.csv() << csv.str();
  rep.print(out.report());
  return 0;
}

int cmd_order(const Flags& fl, bool theta_given) {
  const MechanismModel m = load_model(fl.model);
  Output out(fl.out);
  out.csv() << "form,h,theta,pos_err,vel_err,acc_err,mean_iterations\n";
  std::ostringstream summary;
  for (Formulation f : parse_forms(fl.form)) {
    OrderConfig cfg;
    cfg.form = f;
    cfg.h_list = fl.h_list;
    cfg.t_end = fl.t_end;
    cfg.auto_theta = !theta_given;
    cfg.theta = fl.theta;
    cfg.max_iter = fl.max_iter;
    cfg.body = fl.body;
    cfg.component = fl.component;
    const OrderResult r = order_analysis(m, cfg);
    for (const OrderPoint& p : r.points) {
      out.csv() << to_string(f) << ',' << num(p.h) << ',' << num(p.theta) << ',' << num(p.pos_err)
                << ',' << num(p.vel_err) << ',' << num(p.acc_err) << ','
                << num(p.mean_iterations) << "\n";
    }
    summary << to_string(f) << " vel_slope " << num(r.vel_slope) << " acc_slope "
            << num(r.acc_slope) << " pos_slope " << num(r.pos_slope) << " max_pos_err "
            << num(r.max_pos_err) << "\n";
  }
  out.report() << summary.str();
  return 0;
}

int cmd_bench(const Flags& fl) {
  const MechanismModel m = load_model(fl.model);
  BenchConfig cfg;
  cfg.mode = parse_run_mode(fl.mode);
  cfg.forms = parse_forms(fl.form);
  cfg.h = fl.h;
  cfg.t_end = fl.t_end;
  cfg.theta = fl.theta;
  cfg.auto_theta = fl.auto_theta;
  cfg.pos_tol = fl.pos_tol;
  cfg.max_iter = fl.max_iter;
  cfg.reaction_hessian = parse_reaction_hessian(fl.reaction_hessian);
  if (fl.reps > 0) cfg.reps = fl.reps;
  const auto rows = benchmark(m, cfg);
  Output out(fl.out);
  out.csv() << "model,mode,form,reps,mean_seconds,min_seconds,mean_iterations,system_dim,"
               "speedup_vs_rp\n";
  for (const BenchRow& r : rows) {
    out.csv() << m.name << ',' << to_string(cfg.mode) << ',' << to_string(r.form) << ',' << r.reps
              << ',' << num(r.mean_seconds) << ',' << num(r.min_seconds) << ','
              << num(r.mean_iterations) << ',' << r.system_dim << ',' << num(r.speedup_vs_rp)
              << "\n";
  }
  return 0;
}

int cmd_fdcheck(const Flags& fl) {
  FdCheckConfig cfg;
  cfg.seed = fl.seed;
  if (fl.reps > 0) cfg.reps = fl.reps;
  cfg.tamper = fl.tamper;
  const FdReport report = fd_check(cfg);
  Output out(fl.out);
  out.csv() << "item,samples,max_rel_err,worst_seed,tol,pass\n";
  for (const FdItem& it : report.items) {
    out.csv() << it.name << ',' << it.samples << ',' << num(it.max_rel_err) << ','
              << it.worst_seed << ',' << num(it.tol) << ',' << (it.pass() ? 1 : 0) << "\n";
  }
  for (const FdItem& it : report.items) {
    if (!it.pass()) {
      std::cerr << "fdcheck: FAIL " << it.name << " max_rel_err " << num(it.max_rel_err)
                << " seed " << it.worst_seed << "\n";
    }
  }
  out.report() << "fdcheck: " << report.items.size() - report.failures().size() << "/"
               << report.items.size() << " items pass, wall_seconds " << num(report.wall_seconds)
               << "\n";
  return report.all_pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rigid multibody kinematics and dynamics in absolute coordinates"};
  app.require_subcommand(1);
  // --h is the step size, so help is --help only.
  app.set_help_flag("--help", "Print this help message and exit");
  Flags fl;

  auto add_model = [&](CLI::App* c) {
    c->add_option("--model", fl.model, "Model JSON file")->required()->check(CLI::ExistingFile);
  };
  auto add_solver = [&](CLI::App* c) {
    c->add_option("--h", fl.h, "Step size (s)")->check(CLI::PositiveNumber);
    c->add_option("--t-end", fl.t_end, "End time (s)")->check(CLI::NonNegativeNumber);
    c->add_option("--max-iter", fl.max_iter, "Newton iteration limit")->check(CLI::PositiveNumber);
    c->add_option("--out", fl.out, "CSV output path (default stdout)");
  };
  auto add_dyn = [&](CLI::App* c) {
    auto* th = c->add_option("--theta", fl.theta, "Dynamics stopping threshold on |delta|_2")
                   ->check(CLI::PositiveNumber);
    c->add_flag("--auto-theta", fl.auto_theta, "Use theta = 1e-11 / h^2")->excludes(th);
    c->add_option("--pos-tol", fl.pos_tol, "Kinematics position tolerance")
        ->check(CLI::PositiveNumber);
    c->add_option("--reaction-hessian", fl.reaction_hessian,
                  "rp/reps constraint-force orientation blocks: fd or analytic")
        ->check(CLI::IsMember({"fd", "analytic"}));
  };

  auto* sim = app.add_subcommand("simulate", "Run kinematics or dynamics and write per-step CSV");
  sim->set_help_flag("--help", "Print this help message and exit");
  add_model(sim);
  add_solver(sim);
  add_dyn(sim);
  sim->add_option("--form", fl.form, "rA, rp or reps")->check(CLI::IsMember({"rA", "rp", "reps"}));
  sim->add_option("--mode", fl.mode, "kinematics or dynamics")
      ->check(CLI::IsMember({"kinematics", "dynamics"}));

  auto* order = app.add_subcommand("order", "Order-of-accuracy analysis against kinematics");
  order->set_help_flag("--help", "Print this help message and exit");
  add_model(order);
  order->add_option("--form", fl.form, "rA, rp, reps, a comma list or all");
  order->add_option("--h-list", fl.h_list, "Comma-separated step sizes")->delimiter(',');
  order->add_option("--t-end", fl.t_end, "End time (s)")->check(CLI::PositiveNumber);
  auto* order_theta = order->add_option(
      "--theta", fl.theta, "Fixed stopping threshold (default theta = 1e-11 / h^2)");
  order->add_flag("--auto-theta", "Use theta = 1e-11 / h^2 (default)")->excludes(order_theta);
  order->add_option("--max-iter", fl.max_iter, "Newton iteration limit")->check(CLI::PositiveNumber);
  order->add_option("--body", fl.body, "Model body id of the compared coordinate");
  order->add_option("--component", fl.component, "Position component 0..2")
      ->check(CLI::Range(0, 2));
  order->add_option("--out", fl.out, "CSV output path (default stdout)");

  auto* bench = app.add_subcommand("bench", "Time the formulations and report speedup vs rp");
  bench->set_help_flag("--help", "Print this help message and exit");
  add_model(bench);
  add_solver(bench);
  add_dyn(bench);
  bench->add_option("--form", fl.form, "Comma list of formulations or all (default all)");
  bench->add_option("--mode", fl.mode, "kinematics or dynamics")
      ->check(CLI::IsMember({"kinematics", "dynamics"}));
  bench->add_option("--reps", fl.reps, "Repetitions per formulation (default 10)")
      ->check(CLI::PositiveNumber);

  auto* fdc = app.add_subcommand("fdcheck", "Finite-difference verification of all derivatives");
  fdc->set_help_flag("--help", "Print this help message and exit");
  fdc->add_option("--seed", fl.seed, "Random seed");
  fdc->add_option("--reps", fl.reps, "Random states per item (default 100)")
      ->check(CLI::PositiveNumber);
  fdc->add_option("--out", fl.out, "CSV output path (default stdout)");
  fdc->add_option("--tamper", fl.tamper, "Offset the analytic value of one item (harness check)")
      ->group("");

  CLI11_PARSE(app, argc, argv);
  if (bench->parsed() && bench->count("--form") == 0) fl.form = "all";
  try {
    if (sim->parsed()) return cmd_simulate(fl);
    if (order->parsed()) return cmd_order(fl, order->count("--theta") > 0);
    if (bench->parsed()) return cmd_bench(fl);
    return cmd_fdcheck(fl);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
