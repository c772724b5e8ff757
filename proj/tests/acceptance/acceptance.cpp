// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>

#include "bellcat/field.hpp"
#include "bellcat/functor.hpp"
#include "bellcat/io.hpp"
#include "bellcat/random.hpp"
#include "test_support.hpp"

namespace fs = std::filesystem;
using namespace bellcat;

namespace {

const double kTsirelson = 2 * std::sqrt(2.0);

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Check {
  bool ok = true;
  double worst = 0;
  std::string first_failure;

  // Records |value| against a bound; keeps the largest seen.
  void within(double value, double bound, const std::string& what) {
    worst = std::max(worst, value);
    if (!(value <= bound)) fail(what + " = " + io::format_double(value) + " > " + io::format_double(bound));
  }
  void require(bool cond, const std::string& what) {
    if (!cond) fail(what);
  }
  void fail(const std::string& what) {
    if (ok) first_failure = what;
    ok = false;
  }
};

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

// ------------------------------------------------------------------ 1, 2


std::vector<AdmissibleQuadruple<double>> g_suite;  // dichotomic quadruples reused by criterion 2

Outcome swl_construction_suite() {
  Check c;
  int count = 0;
  for (Eigen::Index dim : {2, 4, 8, 16}) {
    for (std::uint64_t seed = 0; seed < 32; ++seed) {
      Rng rng = make_rng(100 + seed, static_cast<std::uint64_t>(dim));
      std::uniform_int_distribution<Eigen::Index> rank(1, dim - 1);
      try {
        const auto a = swl_construct<double>(random_projection(dim, rank(rng), rng), random_projection(dim, rank(rng), rng));
        const auto b = swl_construct<double>(random_projection(dim, rank(rng), rng), random_projection(dim, rank(rng), rng));
        const AdmissibleQuadruple<double> q(BipartiteSplit(dim, dim), a.a1, a.a2, b.a1, b.a2);
        const ComplexMatrix one = identity(dim);
        for (const ComplexMatrix* x : {&q.a1(), &q.a2(), &q.b1(), &q.b2()}) {
          c.within(op_norm<double>(*x * *x - one), 1e-8, "|A^2 - 1|");
          const auto eig = herm_eig(*x);
          for (Eigen::Index i = 0; i < dim; ++i) c.within(std::abs(std::abs(eig.values(i)) - 1), 1e-8, "spectrum");
        }
        c.within(std::abs(op_norm<double>(commutator(q.a1(), q.a2())) - 2), 1e-8, "|[A1,A2]| - 2");
        c.within(std::abs(op_norm<double>(commutator(q.b1(), q.b2())) - 2), 1e-8, "|[B1,B2]| - 2");
        c.within(std::abs(op_norm(bell_operator(q)) - kTsirelson), 1e-8, "|C| - 2 sqrt 2");
        c.within(std::abs(std::abs(maximal_state(q).value) - kTsirelson), 1e-8, "|omega0(C)| - 2 sqrt 2");
        g_suite.push_back(q);
        ++count;
      } catch (const Error& e) {
        c.fail(std::string("dim ") + std::to_string(dim) + ": " + e.what());
      }
    }
  }
  return {c.ok && count >= 100, std::to_string(count) + " quadruples at dims {2,4,8,16}, worst deviation " +
                                    fmt(c.worst) + (c.ok ? "" : "; " + c.first_failure)};
}

Outcome landau_identity() {
  Check c;
  Rng rng = make_rng(200);
  std::vector<AdmissibleQuadruple<double>> all = g_suite;
  for (int i = 0; i < 100; ++i) {
    const Eigen::Index da = 2 + i % 4, db = 2 + (i / 4) % 4;
    all.emplace_back(BipartiteSplit(da, db), random_dichotomic(da, rng), random_dichotomic(da, rng),
                     random_dichotomic(db, rng), random_dichotomic(db, rng));
  }
  for (const auto& q : all) c.within(squared_bell_defect(q), 1e-10, "C^2 defect");
  return {c.ok && !g_suite.empty(), std::to_string(all.size()) + " dichotomic quadruples, worst |C^2 - 4 + [A1,A2](x)[B1,B2]| " +
                                        fmt(c.worst)};
}

// ------------------------------------------------------------------ 3

AdmissibleQuadruple<double> random_admissible(Eigen::Index da, Eigen::Index db, Rng& rng) {
  std::bernoulli_distribution coin;
  const auto pick = [&](Eigen::Index n) -> ComplexMatrix {
    return coin(rng) ? random_dichotomic(n, rng) : random_contraction(n, rng);
  };
  return {BipartiteSplit(da, db), pick(da), pick(da), pick(db), pick(db)};
}

DensityState<double> random_separable(Eigen::Index da, Eigen::Index db, int terms, Rng& rng) {
  std::exponential_distribution<double> expo;
  std::vector<DensityState<double>> parts;
  std::vector<double> w;
  double total = 0;
  for (int t = 0; t < terms; ++t) {
    parts.push_back(product_state(random_state(da, rng, 1), random_state(db, rng)));
    w.push_back(expo(rng));
    total += w.back();
  }
  for (auto& x : w) x /= total;
  return convex_combine(parts, w);
}

Outcome tsirelson_ceiling() {
  Check general, separable;
  Rng rng = make_rng(300);
  const std::vector<Eigen::Index> dims{2, 3, 4, 8};
  int n_general = 0, n_separable = 0;
  for (int i = 0; i < 1000; ++i) {
    const Eigen::Index da = dims[i % 4], db = dims[(i / 4) % 4];
    if (i % 4 == 3) {
      // Near-optimal configurations: a maximal pair and its witness, lightly mixed.
      const auto a = swl_construct<double>(random_projection(da, 1, rng), random_projection(da, 1, rng));
      const auto b = swl_construct<double>(random_projection(db, 1, rng), random_projection(db, 1, rng));
      const AdmissibleQuadruple<double> q(BipartiteSplit(da, db), a.a1, a.a2, b.a1, b.a2);
      const double w = 0.01 * (i % 10);
      const auto state = convex_combine(std::vector{maximal_state(q).state, random_state(da * db, rng)},
                                        std::vector{1 - w, w});
      general.within(std::abs(chsh_value(state, q)), kTsirelson + 1e-9, "|omega(C)|");
    } else {
      const auto q = random_admissible(da, db, rng);
      const auto state = random_state(da * db, rng, 1 + i % 5);
      general.within(std::abs(chsh_value(state, q)), kTsirelson + 1e-9, "|omega(C)|");
    }
    ++n_general;
  }
  // Separable states against both random and maximally violating quadruples.
  for (int i = 0; i < 1000; ++i) {
    const Eigen::Index da = dims[i % 4], db = dims[(i / 4) % 4];
    const auto state = random_separable(da, db, 1 + i % 6, rng);
    if (i % 2 == 0) {
      separable.within(std::abs(chsh_value(state, random_admissible(da, db, rng))), 2 + 1e-6, "separable |omega(C)|");
    } else {
      const auto a = swl_construct<double>(random_projection(da, 1, rng), random_projection(da, da - 1, rng));
      const auto b = swl_construct<double>(random_projection(db, 1, rng), random_projection(db, db - 1, rng));
      const AdmissibleQuadruple<double> q(BipartiteSplit(da, db), a.a1, a.a2, b.a1, b.a2);
      separable.within(std::abs(chsh_value(state, q)), 2 + 1e-6, "separable |omega(C)|");
    }
    ++n_separable;
  }
  return {general.ok && separable.ok,
          std::to_string(n_general) + " general pairs max " + fmt(general.worst) + " (ceiling 2.828427), " +
              std::to_string(n_separable) + " separable pairs max " + fmt(separable.worst) + " (bound 2)" +
              (general.ok ? "" : "; " + general.first_failure) + (separable.ok ? "" : "; " + separable.first_failure)};
}

// ------------------------------------------------------------------ 4, 5

Monomorphism<double> random_morphism(Eigen::Index n, Eigen::Index k, Rng& rng) {
  return Monomorphism<double>(n, k, haar_unitary(n * k, rng));
}

Outcome functorial_preservation() {
  Check eq, ceiling, contra;
  Rng rng = make_rng(400);
  for (int i = 0; i < 120; ++i) {
    const Eigen::Index na = 2 + i % 2, nb = 2 + (i / 2) % 2;
    const auto ga = random_morphism(na, 1 + i % 3, rng);
    const auto gb = random_morphism(nb, 1 + (i / 3) % 3, rng);
    const auto q = random_admissible(na, nb, rng);
    const auto target = random_state(ga.target_dim() * gb.target_dim(), rng, 1 + i % 4);
    const auto r = chsh_pullback_check(ga, gb, q, target);
    eq.within(std::abs(r.lhs - r.rhs), 1e-10, "|lhs - rhs|");
    ceiling.within(std::abs(r.lhs), kTsirelson + 1e-9, "|lhs|");
  }
  for (int i = 0; i < 120; ++i) {
    const Eigen::Index n = 2 + i % 2;
    const auto g1 = random_morphism(n, 1 + i % 3, rng);
    const auto g2 = random_morphism(g1.target_dim(), 1 + (i / 3) % 2, rng);
    contra.within(check_contravariance(g1, g2, random_state(g2.target_dim(), rng, 1 + i % 3)), 1e-10,
                  "contravariance");
  }
  return {eq.ok && ceiling.ok && contra.ok, "120 morphism pairs, worst |lhs - rhs| " + fmt(eq.worst) +
                                  "; 120 chains, worst contravariance deviation " + fmt(contra.worst)};
}

Outcome maximal_violation_transport() {
  Check c;
  Rng rng = make_rng(500);
  int tested = 0;
  for (int i = 0; i < 40; ++i) {
    const Eigen::Index na = 2 + i % 3, nb = 2 + (i / 3) % 3;
    const auto a = swl_construct<double>(random_projection(na, 1, rng), random_projection(na, 1, rng));
    const auto b = swl_construct<double>(random_projection(nb, 1, rng), random_projection(nb, nb - 1, rng));
    const AdmissibleQuadruple<double> q(BipartiteSplit(na, nb), a.a1, a.a2, b.a1, b.a2);
    const auto best = maximal_state(q);

    std::vector<std::pair<Monomorphism<double>, Monomorphism<double>>> morphisms;
    morphisms.emplace_back(Monomorphism<double>::identity(na), Monomorphism<double>::identity(nb));
    morphisms.emplace_back(Monomorphism<double>::ampliation(na, 2), Monomorphism<double>::ampliation(nb, 3));
    morphisms.emplace_back(random_morphism(na, 1 + i % 3, rng), random_morphism(nb, 1 + (i + 1) % 2, rng));
    const auto inner = random_morphism(na, 2, rng);
    morphisms.emplace_back(compose(random_morphism(2 * na, 1 + i % 2, rng), inner), random_morphism(nb, 2, rng));

    for (const auto& [ga, gb] : morphisms) {
      const auto pushed = push_quadruple(ga, gb, q);
      c.within(std::abs(op_norm(bell_operator(pushed)) - kTsirelson), 1e-9, "pushed |C|");
      // The target state U (rho (x) tau) U* pulls back to the optimal state.
      const auto gab = tensor(ga, gb);
      const Eigen::Index k = gab.multiplicity();
      const auto tau = random_state(k, rng);
      const ComplexMatrix& u = gab.conjugator();
      const DensityState<double> lifted(ComplexMatrix(u * tensor<double>(best.state.matrix(), tau.matrix()) * u.adjoint()));
      const auto r = chsh_pullback_check(ga, gb, q, lifted);
      c.within(std::abs(std::abs(r.rhs) - kTsirelson), 1e-9, "pushed omega(C)");
      c.within(std::abs(r.lhs - r.rhs), 1e-9, "transport mismatch");
      ++tested;
    }
  }
  return {c.ok, std::to_string(tested) + " (pair, morphism) cases, worst deviation from 2 sqrt 2 " + fmt(c.worst)};
}

// ------------------------------------------------------------------ 6

Outcome seesaw_optimizer() {
  Check c;
  const DensityState<double> singlet(testing::singlet_density());
  SeesawOptions<double> opts;
  opts.restarts = 5;
  opts.seed = 600;
  const auto start = std::chrono::steady_clock::now();
  const auto res = seesaw_maximize(singlet, BipartiteSplit(2, 2), opts);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  c.within(std::abs(res.chsh - kTsirelson), 1e-6, "singlet see-saw");
  c.within(seconds, 5.0, "singlet runtime");
  const double grid_singlet = testing::chsh_grid_max(singlet.matrix(), 1.0);
  c.within(std::abs(grid_singlet - kTsirelson), 1e-6, "singlet grid oracle");

  Rng rng = make_rng(601);
  double worst_sep = 0, worst_grid = 0;
  for (int i = 0; i < 100; ++i) {
    const auto state = random_separable(2, 2, 1 + i % 4, rng);
    SeesawOptions<double> o;
    o.restarts = 5;
    o.seed = 602 + i;
    const double value = seesaw_maximize(state, BipartiteSplit(2, 2), o).chsh;
    const double grid = testing::chsh_grid_max(state.matrix(), 1.0);
    worst_sep = std::max(worst_sep, value);
    worst_grid = std::max(worst_grid, grid);
    c.within(value, 2 + 1e-6, "separable see-saw");
    c.within(grid, 2 + 1e-6, "separable grid oracle");
    c.within(grid - value, 1e-6, "see-saw below grid oracle");
  }
  return {c.ok, "singlet " + io::format_double(res.chsh) + " in " + fmt(seconds) + " s (grid oracle " +
                    io::format_double(grid_singlet) + "); 100 separable states max see-saw " + fmt(worst_sep) +
                    ", max grid " + fmt(worst_grid) + (c.ok ? "" : "; " + c.first_failure)};
}

// ------------------------------------------------------------------ 7, 8

Outcome lattice_model() {
  using namespace bellcat::field;
  const auto start = std::chrono::steady_clock::now();
  Check c;
  const LatticeModel model(32, 1.0);
  const auto wedges = complementary_wedges(model, 2);
  const auto [left, right] = boundary_smearings(wedges);
  WedgeChshOptions opts;
  opts.seesaw.restarts = 4;
  opts.seesaw.seed = 700;
  const auto wedge = wedge_chsh(model, left, right, 16, opts);
  c.require(wedge.reduction.squeeze > 0, "fitted squeeze not positive");
  c.require(std::max(wedge.chsh.beta_pseudo, wedge.chsh.beta_seesaw) > 2, "no wedge violation");

  const std::vector<double> sweep{0, 0.25, 0.5, 1.0, 1.5};
  std::vector<double> beta;
  std::string listing;
  for (double r : sweep) {
    const auto out = chsh_for_squeeze(r, 16, opts);
    c.within(out.beta_seesaw, kTsirelson + 1e-9, "ceiling");
    const double b = std::max(out.beta_pseudo, out.beta_seesaw);
    beta.push_back(b);
    listing += (listing.empty() ? "" : " ") + fmt(b);
  }
  std::string increments;
  bool non_decreasing = true, shrinking = true;
  for (std::size_t i = 1; i < beta.size(); ++i) {
    const double inc = beta[i] - beta[i - 1];
    increments += (increments.empty() ? "" : " ") + fmt(inc);
    if (inc < 0) non_decreasing = false;
    if (i >= 2 && !(inc < beta[i - 1] - beta[i - 2])) shrinking = false;
  }
  c.require(non_decreasing, "beta decreases along the sweep");
  c.require(shrinking, "increments do not shrink");
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  c.within(seconds, 120.0, "runtime");
  return {c.ok, "r_fit " + fmt(wedge.reduction.squeeze) + ", wedge beta " + io::format_double(wedge.chsh.beta_seesaw) +
                    "; beta(r) on {0,.25,.5,1,1.5} = " + listing + ", increments " + increments +
                    (non_decreasing ? " (non-decreasing)" : " (DECREASING)") +
                    (shrinking ? " (shrinking)" : " (NOT shrinking)") + ", " + fmt(seconds) + " s"};
}

Outcome translation_isometry() {
  using namespace bellcat::field;
  Check c;
  const LatticeModel model(32, 1.0);
  const auto wedges = complementary_wedges(model, 2);
  const auto [left, right] = boundary_smearings(wedges);
  WedgeChshOptions opts;
  opts.seesaw.restarts = 2;
  const auto base = wedge_chsh(model, left, right, 16, opts);
  const int d = pseudospin_mode_dim(16);

  Rng rng = make_rng(800);
  std::uniform_real_distribution<double> angle(0, 2 * std::numbers::pi);
  std::vector<AdmissibleQuadruple<double>> qs{pseudospin_quadruple_dim(base.chsh.pseudo.angles, d),
                                              *base.chsh.seesaw_quadruple};
  for (int i = 0; i < 4; ++i) qs.push_back(pseudospin_quadruple_dim({angle(rng), angle(rng), angle(rng), angle(rng)}, d));

  std::normal_distribution<double> normal;
  Eigen::VectorXd profile = Eigen::VectorXd::Zero(32);
  for (int i = 3; i < 14; ++i) profile(i) = normal(rng);
  const auto spread = SmearingFunction::normalized(profile, wedges.left);

  std::vector<int> shifts;
  for (int s = 1; s < 32; ++s) shifts.push_back(s);
  for (int s : {-7, 32, 45}) shifts.push_back(s);
  for (int s : shifts) {
    c.within(translation_deviation(model, left, right, s, 16, qs), 1e-10, "deviation at shift " + std::to_string(s));
    c.within(std::abs(weyl_vacuum_expectation(model, spread) -
                      weyl_vacuum_expectation(model, translate_smearing(model, spread, s))),
             1e-10, "Weyl at shift " + std::to_string(s));
  }
  for (int s : {4, 11}) {
    const auto l = translate_smearing(model, left, s), r = translate_smearing(model, right, s);
    const auto moved = wedge_chsh(model, l, r, 16, opts);
    c.within(std::abs(moved.chsh.beta_pseudo - base.chsh.beta_pseudo), 1e-10, "optimized beta under shift");
    c.within(std::abs(moved.chsh.beta_seesaw - base.chsh.beta_seesaw), 1e-10, "see-saw beta under shift");
  }
  return {c.ok, std::to_string(shifts.size()) + " shifts, " + std::to_string(qs.size()) +
                    " quadruples, worst deviation " + fmt(c.worst) + (c.ok ? "" : "; " + c.first_failure)};
}

// ------------------------------------------------------------------ 9

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string("\"") + BELLCAT_CLI_PATH + "\" " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Outcome determinism() {
  Check c;
  const fs::path root = fs::temp_directory_path() / "bellcat_acceptance";
  fs::remove_all(root);
  const std::string data = BELLCAT_DATA_DIR;
  const auto q = [](const fs::path& p) { return "\"" + p.string() + "\""; };

  struct Run {
    std::string name, args;
  };
  // construct first: its state feeds maximize.
  const std::vector<Run> runs{
      {"construct", "construct --dim 4 --seed 13"},
      {"maximize", "maximize --state " + q(root / "construct_a" / "state.json") + " --dA 4 --dB 4 --restarts 3 --seed 2"},
      {"violate", "violate --quadruple " + q(data + "/singlet_quadruple.json") + " --state " + q(data + "/singlet_state.json")},
      {"pushforward", "pushforward --quadruple " + q(data + "/singlet_quadruple.json") + " --morphism-a " +
                          q(data + "/identity_morphism.json") + " --morphism-b " + q(data + "/identity_morphism.json") +
                          " --state " + q(data + "/singlet_state.json")},
      {"lattice", "lattice --sweep r=0:1.5:0.5 --restarts 2 --seed 5 --jobs 2"},
  };
  int files = 0;
  for (const auto& run : runs) {
    const fs::path a = root / (run.name + "_a"), b = root / (run.name + "_b"), replay = root / (run.name + "_replay");
    c.require(run_cli(run.args + " --out " + q(a)) == 0, run.name + " failed");
    c.require(run_cli(run.args + " --out " + q(b)) == 0, run.name + " rerun failed");
    c.require(run_cli("replay --manifest " + q(a / "manifest.json") + " --out " + q(replay)) == 0,
              run.name + " replay failed");
    if (!fs::exists(a)) continue;
    for (const auto& entry : fs::directory_iterator(a)) {
      const auto name = entry.path().filename();
      if (name == "manifest.json") continue;  // records its own output path
      c.require(slurp(entry.path()) == slurp(b / name), run.name + "/" + name.string() + " differs on rerun");
      c.require(slurp(entry.path()) == slurp(replay / name), run.name + "/" + name.string() + " differs on replay");
      ++files;
    }
  }
  fs::remove_all(root);
  return {c.ok && files > 0, std::to_string(runs.size()) + " commands, " + std::to_string(files) +
                                 " output files byte-identical on rerun and manifest replay" +
                                 (c.ok ? "" : "; " + c.first_failure)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"swl construction suite", swl_construction_suite},
      {"landau identity", landau_identity},
      {"tsirelson ceiling", tsirelson_ceiling},
      {"functorial preservation", functorial_preservation},
      {"maximal-violation transport", maximal_violation_transport},
      {"see-saw optimizer", seesaw_optimizer},
      {"lattice model", lattice_model},
      {"translation isometry", translation_isometry},
      {"determinism", determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = criteria[i].second();
    } catch (const std::exception& e) {
      out = {false, std::string("threw: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!out.pass) ++failures;
    std::cout << (out.pass ? "PASS" : "FAIL") << "  " << (i + 1) << ". " << criteria[i].first << ": " << out.detail
              << " [" << fmt(seconds) << " s]" << std::endl;
  }
  std::cout << (criteria.size() - failures) << "/" << criteria.size() << " criteria passed" << std::endl;
  return failures == 0 ? 0 : 1;
}
