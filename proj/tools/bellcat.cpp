// bellcat: batch front end for the CHSH / operator-algebra laboratory.
//
// Exit codes: 0 ok, 1 usage or unclassified failure, 2 commuting projections
// (construct retries exhausted), 3 dimension mismatch, 4 parse/validation
// failure of an input file, 5 massless lattice model, 6 pushforward sides
// disagree beyond 1e-9.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <future>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "bellcat/bell.hpp"
#include "bellcat/field.hpp"
#include "bellcat/functor.hpp"
#include "bellcat/io.hpp"
#include "bellcat/manifest.hpp"
#include "bellcat/random.hpp"

namespace fs = std::filesystem;
using bellcat::io::Json;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitCommuting = 2;
constexpr int kExitDimension = 3;
constexpr int kExitParse = 4;
constexpr int kExitMassless = 5;
constexpr int kExitDisagree = 6;

constexpr double kPushforwardTol = 1e-9;

int exit_code_for(bellcat::ErrorCode code) {
  using bellcat::ErrorCode;
  switch (code) {
    case ErrorCode::CommutingProjections: return kExitCommuting;
    case ErrorCode::DimensionMismatch:
    case ErrorCode::InvalidSplit: return kExitDimension;
    case ErrorCode::Parse:
    case ErrorCode::InvalidState:
    case ErrorCode::InvalidQuadruple:
    case ErrorCode::NotUnitary:
    case ErrorCode::NonFinite: return kExitParse;
    case ErrorCode::MasslessUnsupported: return kExitMassless;
    default: return kExitUsage;
  }
}

struct Output {
  std::optional<fs::path> dir;

  void write(const std::string& name, const std::string& text) const {
    if (dir) bellcat::io::write_text_file(*dir / name, text);
  }
};

void finish(const std::string& command, const Json& params, std::uint64_t seed, const Output& out) {
  if (!out.dir) return;
  bellcat::RunManifest manifest;
  manifest.command = command;
  manifest.parameters = params;
  manifest.seed = seed;
  manifest.results_path = out.dir->string();
  bellcat::write_manifest(*out.dir / "manifest.json", manifest);
}

// ---------------------------------------------------------------- construct

int run_construct(const Json& p, const Output& out) {
  using namespace bellcat;
  const auto dim = p.at("dim").get<Eigen::Index>();
  const auto seed = p.at("seed").get<std::uint64_t>();
  const int attempts = p.at("max_attempts").get<int>();
  if (dim < 2) throw Error(ErrorCode::InvalidSplit, "dim must be >= 2");

  const Eigen::Index rank = std::max<Eigen::Index>(1, dim / 2);
  for (int attempt = 0; attempt < attempts; ++attempt) {
    Rng rng = make_rng(seed, static_cast<std::uint64_t>(attempt));
    try {
      const ComplexMatrix ea = random_projection(dim, rank, rng);
      const ComplexMatrix fa = random_projection(dim, rank, rng);
      const ComplexMatrix eb = random_projection(dim, rank, rng);
      const ComplexMatrix fb = random_projection(dim, rank, rng);
      auto side_a = swl_construct(ea, fa);
      auto side_b = swl_construct(eb, fb);
      AdmissibleQuadruple<double> q(BipartiteSplit(dim, dim), side_a.a1, side_a.a2, side_b.a1, side_b.a2);

      const double bell_norm = op_norm<double>(bell_operator(q));
      const double landau = landau_norm(q);
      const auto maximal = maximal_state(q);
      const double target = kTsirelsonBound<double>;
      const double worst = std::max({std::abs(bell_norm - target), std::abs(landau - target),
                                     std::abs(std::abs(maximal.value) - target)});

      Json report;
      report["dim"] = dim;
      report["seed"] = seed;
      report["attempt"] = attempt;
      report["bell_operator_norm"] = bell_norm;
      report["landau_norm"] = landau;
      report["maximal_state_value"] = std::abs(maximal.value);
      report["commutator_norm_a"] = op_norm<double>(commutator(q.a1(), q.a2()));
      report["commutator_norm_b"] = op_norm<double>(commutator(q.b1(), q.b2()));
      report["tsirelson_bound"] = target;
      report["max_deviation"] = worst;
      report["within_tolerance"] = worst <= 1e-8;

      Json result;
      result["command"] = "construct";
      result["report"] = report;
      result["quadruple"] = io::quadruple_to_json(q);
      std::cout << io::dump(result);
      out.write("report.json", io::dump(report));
      out.write("quadruple.json", io::dump(io::quadruple_to_json(q)));
      out.write("state.json", io::dump(io::state_to_json(maximal.state)));
      finish("construct", p, seed, out);
      return 0;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::CommutingProjections) throw;
    }
  }
  throw Error(ErrorCode::CommutingProjections, "no non-commuting pair after " + std::to_string(attempts) + " attempts");
}

// ---------------------------------------------------------------- violate

int run_violate(const Json& p, const Output& out) {
  using namespace bellcat;
  const auto q = io::quadruple_from_json(io::read_json_file(p.at("quadruple").get<std::string>()));
  const auto state = io::state_from_json(io::read_json_file(p.at("state").get<std::string>()));
  const double value = chsh_value(state, q);
  Json result;
  result["command"] = "violate";
  result["chsh"] = value;
  result["beta"] = value / 2;
  result["classical_bound"] = kClassicalBound<double>;
  result["tsirelson_bound"] = kTsirelsonBound<double>;
  result["violates_classical"] = std::abs(value) > kClassicalBound<double> + 1e-9;
  result["within_tsirelson"] = std::abs(value) <= kTsirelsonBound<double> + 1e-9;
  std::cout << io::dump(result);
  out.write("violate.json", io::dump(result));
  finish("violate", p, 0, out);
  return 0;
}

// ---------------------------------------------------------------- maximize

int run_maximize(const Json& p, const Output& out) {
  using namespace bellcat;
  const auto state = io::state_from_json(io::read_json_file(p.at("state").get<std::string>()));
  const BipartiteSplit split(p.at("dA").get<Eigen::Index>(), p.at("dB").get<Eigen::Index>());
  SeesawOptions<double> opts;
  opts.restarts = p.at("restarts").get<int>();
  opts.max_iters = p.at("max_iters").get<int>();
  opts.tol = p.at("tol").get<double>();
  opts.seed = p.at("seed").get<std::uint64_t>();
  opts.jobs = p.at("jobs").get<int>();
  const auto res = seesaw_maximize(state, split, opts);

  Json result;
  result["command"] = "maximize";
  result["seed"] = opts.seed;
  result["chsh"] = res.chsh;
  result["beta"] = res.beta;
  result["best_run"] = res.best_run;
  result["run_values"] = res.run_values;
  result["quadruple"] = io::quadruple_to_json(res.quadruple);
  std::cout << io::dump(result);
  out.write("maximize.json", io::dump(result));
  out.write("quadruple.json", io::dump(io::quadruple_to_json(res.quadruple)));
  finish("maximize", p, opts.seed, out);
  return 0;
}

// ---------------------------------------------------------------- pushforward

int run_pushforward(const Json& p, const Output& out) {
  using namespace bellcat;
  const auto q = io::quadruple_from_json(io::read_json_file(p.at("quadruple").get<std::string>()));
  const auto ga = io::morphism_from_json(io::read_json_file(p.at("morphism_a").get<std::string>()));
  const auto gb = io::morphism_from_json(io::read_json_file(p.at("morphism_b").get<std::string>()));
  const auto state = io::state_from_json(io::read_json_file(p.at("state").get<std::string>()));
  const auto check = chsh_pullback_check(ga, gb, q, state);
  const double diff = std::abs(check.lhs - check.rhs);

  Json result;
  result["command"] = "pushforward";
  result["lhs"] = check.lhs;
  result["rhs"] = check.rhs;
  result["difference"] = diff;
  result["agreement_tol"] = kPushforwardTol;
  result["agrees"] = diff <= kPushforwardTol;
  std::cout << io::dump(result);
  out.write("pushforward.json", io::dump(result));
  finish("pushforward", p, 0, out);
  return diff <= kPushforwardTol ? 0 : kExitDisagree;
}

// ---------------------------------------------------------------- lattice

std::vector<double> parse_sweep(const std::string& text) {
  // r=start:stop:step, inclusive of stop.
  const auto fail = [&] { return bellcat::Error(bellcat::ErrorCode::Parse, "bad sweep \"" + text + "\""); };
  std::string body = text;
  if (body.rfind("r=", 0) == 0) body = body.substr(2);
  std::vector<double> parts;
  std::stringstream ss(body);
  std::string token;
  while (std::getline(ss, token, ':')) {
    try {
      std::size_t used = 0;
      parts.push_back(std::stod(token, &used));
      if (used != token.size()) throw fail();
    } catch (const std::logic_error&) {
      throw fail();
    }
  }
  if (parts.size() == 1) return {parts[0]};
  if (parts.size() != 3 || !(parts[2] > 0) || parts[1] < parts[0]) throw fail();
  const auto count = static_cast<long>(std::floor((parts[1] - parts[0]) / parts[2] + 1e-9)) + 1;
  std::vector<double> values;
  for (long i = 0; i < count; ++i) values.push_back(parts[0] + static_cast<double>(i) * parts[2]);
  return values;
}

struct SweepRow {
  double r = 0;
  bellcat::field::SqueezedChsh chsh;
  double deviation = 0;
};

int run_lattice(const Json& p, const Output& out) {
  using namespace bellcat;
  using namespace bellcat::field;
  const LatticeModel model(p.at("sites").get<int>(), p.at("mass").get<double>(), p.at("spacing").get<double>());
  const int gap = p.at("gap").get<int>();
  const int shift = p.at("shift").get<int>();
  const int n_max = p.at("nmax").get<int>();
  const auto seed = p.at("seed").get<std::uint64_t>();
  const int jobs = std::max(1, p.at("jobs").get<int>());
  const std::vector<double> sweep = parse_sweep(p.at("sweep").get<std::string>());

  WedgeChshOptions opts;
  opts.grid_step_deg = p.at("grid_step").get<double>();
  opts.seesaw.restarts = p.at("restarts").get<int>();
  opts.seesaw.seed = seed;

  const WedgePair wedges = complementary_wedges(model, gap);
  const auto [left, right] = boundary_smearings(wedges);
  const WedgeChsh wedge = wedge_chsh(model, left, right, n_max, opts);

  auto run_row = [&](std::size_t i) {
    SweepRow row;
    row.r = sweep[i];
    row.chsh = chsh_for_squeeze(sweep[i], n_max, opts);
    std::vector<AdmissibleQuadruple<double>> qs{
        pseudospin_quadruple_dim(row.chsh.pseudo.angles, pseudospin_mode_dim(n_max)), *row.chsh.seesaw_quadruple};
    row.deviation = translation_deviation(model, left, right, shift, n_max, qs);
    return row;
  };
  std::vector<std::optional<SweepRow>> rows(sweep.size());
  for (std::size_t begin = 0; begin < sweep.size(); begin += static_cast<std::size_t>(jobs)) {
    const std::size_t end = std::min(sweep.size(), begin + static_cast<std::size_t>(jobs));
    if (jobs == 1) {
      rows[begin].emplace(run_row(begin));
      continue;
    }
    std::vector<std::future<SweepRow>> futures;
    for (std::size_t i = begin; i < end; ++i) futures.push_back(std::async(std::launch::async, run_row, i));
    for (std::size_t i = begin; i < end; ++i) rows[i].emplace(futures[i - begin].get());
  }

  std::string csv = "r,beta_pseudo,beta_seesaw,squeeze_fit,translation_deviation\n";
  for (const auto& row : rows) {
    csv += io::format_double(row->r) + "," + io::format_double(row->chsh.beta_pseudo) + "," +
           io::format_double(row->chsh.beta_seesaw) + "," + io::format_double(wedge.reduction.squeeze) + "," +
           io::format_double(row->deviation) + "\n";
  }

  std::vector<AdmissibleQuadruple<double>> wedge_qs{
      pseudospin_quadruple_dim(wedge.chsh.pseudo.angles, pseudospin_mode_dim(n_max)), *wedge.chsh.seesaw_quadruple};
  const auto& sf = wedge.reduction.standard_form;
  Json summary;
  summary["command"] = "lattice";
  summary["sites"] = model.sites();
  summary["mass"] = model.mass();
  summary["gap"] = gap;
  summary["left_wedge"] = {wedges.left.start(), wedges.left.start() + wedges.left.length()};
  summary["right_wedge"] = {wedges.right.start(), wedges.right.start() + wedges.right.length()};
  summary["standard_form"] = {{"alpha", sf.alpha}, {"beta", sf.beta}, {"c_plus", sf.c_plus}, {"c_minus", sf.c_minus}};
  summary["squeeze_fit"] = wedge.reduction.squeeze;
  summary["weyl_left"] = weyl_vacuum_expectation(model, left);
  summary["weyl_right"] = weyl_vacuum_expectation(model, right);
  summary["wedge_beta_pseudo"] = wedge.chsh.beta_pseudo;
  summary["wedge_beta_seesaw"] = wedge.chsh.beta_seesaw;
  summary["shift"] = shift;
  summary["wedge_translation_deviation"] = translation_deviation(model, left, right, shift, n_max, wedge_qs);
  summary["rows"] = sweep.size();

  std::cout << csv;
  out.write("lattice.csv", csv);
  out.write("lattice.json", io::dump(summary));
  finish("lattice", p, seed, out);
  return 0;
}

int dispatch(const std::string& command, const Json& params, const Output& out) {
  if (command == "construct") return run_construct(params, out);
  if (command == "violate") return run_violate(params, out);
  if (command == "maximize") return run_maximize(params, out);
  if (command == "pushforward") return run_pushforward(params, out);
  if (command == "lattice") return run_lattice(params, out);
  throw bellcat::Error(bellcat::ErrorCode::Parse, "unknown command \"" + command + "\"");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bellcat: CHSH constructions, optimization and functorial transport"};
  app.set_version_flag("--version", std::string(BELLCAT_VERSION));
  app.require_subcommand(1);

  std::string out_dir;
  std::uint64_t seed = 0;
  int jobs = 1;

  auto* construct = app.add_subcommand("construct", "maximal-violation quadruple from random projections");
  Eigen::Index dim = 2;
  int max_attempts = 16;
  construct->add_option("--dim", dim, "factor dimension")->required()->check(CLI::Range(2, 1 << 12));
  construct->add_option("--max-attempts", max_attempts, "projection resampling attempts")->check(CLI::PositiveNumber);

  auto* violate = app.add_subcommand("violate", "CHSH value of a quadruple in a state");
  std::string quadruple_path, state_path, morphism_a_path, morphism_b_path;
  violate->add_option("--quadruple", quadruple_path)->required();
  violate->add_option("--state", state_path)->required();

  auto* maximize = app.add_subcommand("maximize", "see-saw maximization of the CHSH value");
  Eigen::Index dim_a = 2, dim_b = 2;
  int restarts = 8, max_iters = 500;
  double tol = 1e-13;
  maximize->add_option("--state", state_path)->required();
  maximize->add_option("--dA", dim_a)->required();
  maximize->add_option("--dB", dim_b)->required();
  maximize->add_option("--restarts", restarts)->check(CLI::NonNegativeNumber);
  maximize->add_option("--max-iters", max_iters)->check(CLI::PositiveNumber);
  maximize->add_option("--tol", tol);

  auto* pushforward = app.add_subcommand("pushforward", "CHSH value before and after a pair of monomorphisms");
  pushforward->add_option("--quadruple", quadruple_path)->required();
  pushforward->add_option("--morphism-a", morphism_a_path)->required();
  pushforward->add_option("--morphism-b", morphism_b_path)->required();
  pushforward->add_option("--state", state_path)->required();

  auto* lattice = app.add_subcommand("lattice", "lattice scalar field wedge CHSH sweep");
  int sites = 32, gap = 2, shift = 0, nmax = 16, lattice_restarts = 4;
  double mass = 1.0, spacing = 1.0, grid_step = 10.0;
  std::string sweep = "r=0:1.5:0.25";
  lattice->add_option("--sites", sites);
  lattice->add_option("--mass", mass);
  lattice->add_option("--spacing", spacing);
  lattice->add_option("--gap", gap);
  lattice->add_option("--shift", shift);
  lattice->add_option("--nmax", nmax)->check(CLI::NonNegativeNumber);
  lattice->add_option("--sweep", sweep, "r=start:stop:step (inclusive)");
  lattice->add_option("--restarts", lattice_restarts, "see-saw restarts per point")->check(CLI::NonNegativeNumber);
  lattice->add_option("--grid-step", grid_step, "pseudospin angle grid, degrees")->check(CLI::PositiveNumber);

  auto* replay = app.add_subcommand("replay", "re-run a recorded manifest");
  std::string manifest_path;
  replay->add_option("--manifest", manifest_path)->required();

  for (auto* sub : {construct, violate, maximize, pushforward, lattice, replay})
    sub->add_option("--out", out_dir, "directory for result files and the run manifest");
  for (auto* sub : {construct, maximize, lattice}) {
    sub->add_option("--seed", seed);
  }
  for (auto* sub : {maximize, lattice}) sub->add_option("--jobs", jobs)->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  Output out;
  if (!out_dir.empty()) out.dir = fs::path(out_dir);

  try {
    if (*construct)
      return run_construct({{"dim", dim}, {"seed", seed}, {"max_attempts", max_attempts}}, out);
    if (*violate) return run_violate({{"quadruple", quadruple_path}, {"state", state_path}}, out);
    if (*maximize)
      return run_maximize({{"state", state_path}, {"dA", dim_a}, {"dB", dim_b}, {"restarts", restarts},
                           {"max_iters", max_iters}, {"tol", tol}, {"seed", seed}, {"jobs", jobs}},
                          out);
    if (*pushforward)
      return run_pushforward({{"quadruple", quadruple_path}, {"morphism_a", morphism_a_path},
                              {"morphism_b", morphism_b_path}, {"state", state_path}},
                             out);
    if (*lattice)
      return run_lattice({{"sites", sites}, {"mass", mass}, {"spacing", spacing}, {"gap", gap}, {"shift", shift},
                          {"nmax", nmax}, {"sweep", sweep}, {"seed", seed}, {"restarts", lattice_restarts},
                          {"grid_step", grid_step}, {"jobs", jobs}},
                         out);
    if (*replay) {
      const auto manifest = bellcat::read_manifest(manifest_path);
      Output replay_out;
      replay_out.dir = fs::path(out_dir.empty() ? manifest.results_path : out_dir);
      return dispatch(manifest.command, manifest.parameters, replay_out);
    }
  } catch (const bellcat::Error& e) {
    std::cerr << "bellcat: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const Json::exception& e) {
    std::cerr << "bellcat: malformed parameters: " << e.what() << "\n";
    return kExitParse;
  } catch (const std::exception& e) {
    std::cerr << "bellcat: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
