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


// Acceptance run: one PASS/FAIL line per criterion on stdout, measurements
// on stderr. Exit status 0 only when every criterion passes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
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

// Pinned tolerances.
constexpr double kSlopeTarget = 1.0;
constexpr double kSlopeTol = 0.15;
constexpr double kSlopeSpread = 0.1;
constexpr double kPosErrMax = 1e-9;
constexpr double kOrderSeconds = 120.0;
constexpr double kConvRatio = 10.0;
constexpr double kConvRatioTol = 0.5;
constexpr double kAgreeTol = 0.05;
constexpr double kIterTol = 0.5;
constexpr double kIterSpread = 1.0;
constexpr double kFdTol = 1e-5;
constexpr double kFdSeconds = 60.0;
constexpr double kOrthoTol = 1e-10;
constexpr double kInvariantFactor = 10.0;
constexpr double kSpeedupMin = 1.5;

constexpr Formulation kForms[] = {Formulation::kRA, Formulation::kRP, Formulation::kREps};

std::string fmt(double v, const char* f = "%.4g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Outcome {
  bool pass = true;
  std::string summary;
};

class Acceptance {
 public:
  explicit Acceptance(std::string dir) : dir_(std::move(dir)) {}

  MechanismModel model(const std::string& name) const {
    return load_model(dir_ + "/" + name + ".json");
  }

  // Order of accuracy on the pendulum.
  Outcome order() const {
    const auto t0 = std::chrono::steady_clock::now();
    const MechanismModel m = model("pendulum");
    Outcome out;
    double rA_vel = 0.0, rA_acc = 0.0;
    std::ostringstream s;
    for (Formulation f : kForms) {
      OrderConfig cfg;
      cfg.form = f;
      const OrderResult r = order_analysis(m, cfg);
      for (const OrderPoint& p : r.points) {
        std::cerr << "  [1] " << to_string(f) << " h=" << fmt(p.h) << " pos_err=" << fmt(p.pos_err)
                  << " vel_err=" << fmt(p.vel_err) << " acc_err=" << fmt(p.acc_err)
                  << " iters=" << fmt(p.mean_iterations) << "\n";
      }
      if (f == Formulation::kRA) {
        rA_vel = r.vel_slope;
        rA_acc = r.acc_slope;
      }
      const bool ok = std::abs(r.vel_slope - kSlopeTarget) <= kSlopeTol &&
                      std::abs(r.acc_slope - kSlopeTarget) <= kSlopeTol &&
                      r.max_pos_err <= kPosErrMax &&
                      std::abs(r.vel_slope - rA_vel) <= kSlopeSpread &&
                      std::abs(r.acc_slope - rA_acc) <= kSlopeSpread;
      out.pass &= ok;
      s << to_string(f) << " vel " << fmt(r.vel_slope, "%.3f") << " acc "
        << fmt(r.acc_slope, "%.3f") << " max pos err " << fmt(r.max_pos_err, "%.1e") << "; ";
    }
    const double wall = seconds_since(t0);
    out.pass &= wall <= kOrderSeconds;
    s << fmt(wall, "%.1f") << " s";
    out.summary = s.str();
    return out;
  }

  // Cross-formulation convergence on the double pendulum.
  Outcome convergence() const {
    const MechanismModel m = model("double_pendulum");
    const int b = m.body_index(2);
    auto z_end = [&](Formulation f, double h) {
      DynamicsConfig cfg;
      cfg.form = f;
      cfg.h = h;
      cfg.t_end = 5.0;
      cfg.auto_theta = true;
      cfg.store_states = false;
      return dynamics_run(m, cfg).final_state.bodies[b].r[2];
    };
    const double z_ref = z_end(Formulation::kRA, 1e-5);
    const double hs[] = {1e-2, 1e-3, 1e-4};
    double dz[3][3];
    for (int i = 0; i < 3; ++i) {
      for (int f = 0; f < 3; ++f) {
        dz[f][i] = std::abs(z_end(kForms[f], hs[i]) - z_ref);
        std::cerr << "  [2] " << to_string(kForms[f]) << " h=" << fmt(hs[i])
                  << " |dz|=" << fmt(dz[f][i]) << "\n";
      }
    }
    Outcome out;
    std::ostringstream s;
    for (int f = 0; f < 3; ++f) {
      s << to_string(kForms[f]) << " ratios";
      for (int i = 0; i + 1 < 3; ++i) {
        const double ratio = dz[f][i] / dz[f][i + 1];
        out.pass &= std::abs(ratio - kConvRatio) <= kConvRatioTol * kConvRatio;
        s << " " << fmt(ratio, "%.2f");
      }
      s << "; ";
    }
    double spread = 0.0;
    for (int i = 0; i < 3; ++i) {
      for (int f = 1; f < 3; ++f) spread = std::max(spread, std::abs(dz[f][i] - dz[0][i]) / dz[0][i]);
    }
    out.pass &= spread <= kAgreeTol;
    s << "max relative spread vs rA " << fmt(spread, "%.3f");
    out.summary = s.str();
    return out;
  }

  // Kinematics Newton iteration counts.
  Outcome iterations() const {
    struct Target {
      const char* name;
      double lo, hi;
    };
    const Target targets[] = {
        {"pendulum", 3.8, 3.8}, {"four_link", 4.5, 4.8}, {"slider_crank", 4.7, 4.8}};
    Outcome out;
    std::ostringstream s;
    for (const Target& t : targets) {
      const MechanismModel m = model(t.name);
      s << t.name;
      for (double h : {1e-2, 1e-3, 1e-4}) {
        double lo = 1e300, hi = -1e300;
        for (Formulation f : kForms) {
          KinematicsConfig cfg;
          cfg.form = f;
          cfg.h = h;
          cfg.keep_records = false;
          const double mean = kinematics_run(m, cfg).mean_iterations();
          std::cerr << "  [3] " << t.name << " " << to_string(f) << " h=" << fmt(h)
                    << " mean iterations " << fmt(mean) << "\n";
          lo = std::min(lo, mean);
          hi = std::max(hi, mean);
          if (h == 1e-3) {
            out.pass &= mean >= t.lo - kIterTol && mean <= t.hi + kIterTol;
            s << " " << to_string(f) << " " << fmt(mean, "%.2f");
          }
        }
        out.pass &= hi - lo <= kIterSpread;
      }
      s << " (target " << fmt(t.lo, "%.1f") << "-" << fmt(t.hi, "%.1f") << "); ";
    }
    out.summary = s.str();
    return out;
  }

  // Derivative oracle suite.
  Outcome oracles() const {
    const auto t0 = std::chrono::steady_clock::now();
    FdCheckConfig cfg;
    cfg.tol = kFdTol;
    const FdReport r = fd_check(cfg);
    const double wall = seconds_since(t0);
    double worst = 0.0;
    for (const FdItem& it : r.items) worst = std::max(worst, it.max_rel_err);
    for (const std::string& name : r.failures()) std::cerr << "  [4] FAIL " << name << "\n";
    Outcome out;
    out.pass = r.all_pass() && wall <= kFdSeconds;
    out.summary = std::to_string(r.items.size() - r.failures().size()) + "/" +
                  std::to_string(r.items.size()) + " items, worst rel err " + fmt(worst, "%.1e") +
                  ", " + fmt(wall, "%.2f") + " s";
    return out;
  }

  // Per-step structural invariants over 5000-step runs.
  Outcome invariants() const {
    Outcome out;
    double ortho = 0.0, norm_ratio = 0.0, phi_ratio = 0.0;
    for (const char* name : {"pendulum", "double_pendulum", "slider_crank", "four_link"}) {
      const MechanismModel m = model(name);
      for (Formulation f : kForms) {
        DynamicsConfig cfg;
        cfg.form = f;
        cfg.h = 1e-3;
        cfg.t_end = 5.0;
        cfg.theta = 1e-3;
        cfg.store_states = false;
        const TrajectoryLog log = dynamics_run(m, cfg);
        const double bound = kInvariantFactor * log.theta * cfg.h * cfg.h;
        for (const DynStepRecord& r : log.steps) {
          if (f == Formulation::kRA) ortho = std::max(ortho, r.orientation_drift);
          if (f == Formulation::kRP) norm_ratio = std::max(norm_ratio, r.orientation_drift / bound);
          phi_ratio = std::max(phi_ratio, r.phi_norm / bound);
        }
        out.pass &= log.steps.size() == 5000;
      }
    }
    out.pass &= ortho <= kOrthoTol && norm_ratio <= 1.0 && phi_ratio <= 1.0;
    out.summary = "max |A^T A - I| " + fmt(ortho, "%.1e") + ", max rp normalization / (10 theta h^2) " +
                  fmt(norm_ratio, "%.1e") + ", max |Phi| / (10 theta h^2) " + fmt(phi_ratio, "%.1e");
    return out;
  }

  // Relative dynamics performance and Newton system dimensions.
  Outcome performance() const {
    Outcome out;
    std::ostringstream s;
    bool order_ok = true, speed_ok = true, dim_ok = true;
    for (const char* name : {"pendulum", "double_pendulum", "slider_crank", "four_link"}) {
      const MechanismModel m = model(name);
      BenchConfig cfg;
      const auto rows = benchmark(m, cfg);
      double t[3] = {0, 0, 0};
      for (const BenchRow& r : rows) {
        const int f = static_cast<int>(r.form);
        t[f] = r.mean_seconds;
        const int expected = (r.form == Formulation::kRP ? 8 : 6) * m.nb() + m.nc();
        dim_ok &= r.system_dim == expected && r.system_dim == newton_dimension(m, r.form);
        std::cerr << "  [6] " << name << " " << to_string(r.form) << " mean " << fmt(r.mean_seconds)
                  << " s, min " << fmt(r.min_seconds) << " s, dim " << r.system_dim
                  << ", speedup vs rp " << fmt(r.speedup_vs_rp, "%.3f") << "\n";
      }
      order_ok &= t[0] < t[2] && t[2] < t[1];
      speed_ok &= t[1] / t[0] >= kSpeedupMin;
      s << name << " rA " << fmt(t[1] / t[0], "%.2f") << "x reps " << fmt(t[1] / t[2], "%.2f")
        << "x; ";
    }
    out.pass = order_ok && speed_ok && dim_ok;
    s << "ordering rA<reps<rp " << (order_ok ? "holds" : "violated") << ", rA speedup >= 1.5 "
      << (speed_ok ? "holds" : "violated") << ", dimensions " << (dim_ok ? "exact" : "wrong")
      << " (reference range 2.29-2.93)";
    out.summary = s.str();
    return out;
  }

  // Constraint composition of the bundled models.
  Outcome composition() const {
    struct Expected {
      const char* name;
      GconCounts counts;
    };
    const Expected expected[] = {{"pendulum", {3, 0, 0, 3}},
                                 {"four_link", {6, 0, 0, 12}},
                                 {"slider_crank", {7, 4, 1, 6}}};
    Outcome out;
    std::ostringstream s;
    for (const Expected& e : expected) {
      const GconCounts c = model(e.name).counts();
      out.pass &= c == e.counts;
      s << e.name << " DP1 " << c.dp1 << " DP2 " << c.dp2 << " D " << c.d << " CD " << c.cd << "; ";
    }
    out.summary = s.str();
    return out;
  }

 private:
  std::string dir_;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria 1-7"};
  std::string dir = ABSMBD_MODEL_DIR;
  std::vector<int> only;
  app.add_option("--models", dir, "Directory of the bundled model files");
  app.add_option("--only", only, "Run only these criteria (comma list)")
      ->delimiter(',')
      ->check(CLI::Range(1, 7));
  CLI11_PARSE(app, argc, argv);

  const Acceptance acc(dir);
  const std::function<Outcome()> criteria[] = {
      [&] { return acc.order(); },      [&] { return acc.convergence(); },
      [&] { return acc.iterations(); }, [&] { return acc.oracles(); },
      [&] { return acc.invariants(); }, [&] { return acc.performance(); },
      [&] { return acc.composition(); }};
  int failures = 0;
  for (int k = 0; k < 7; ++k) {
    if (!only.empty() && std::find(only.begin(), only.end(), k + 1) == only.end()) continue;
    Outcome o;
    try {
      o = criteria[k]();
    } catch (const std::exception& e) {
      o.pass = false;
      o.summary = std::string("error: ") + e.what();
    }
    while (!o.summary.empty() && (o.summary.back() == ' ' || o.summary.back() == ';')) {
      o.summary.pop_back();
    }
    failures += !o.pass;
    std::cout << "criterion " << k + 1 << ": " << (o.pass ? "PASS" : "FAIL") << " - " << o.summary
              << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
