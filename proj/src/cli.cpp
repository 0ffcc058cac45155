#include "wlra/cli.hpp"

#include "wlra/diagnostics.hpp"
#include "wlra/error.hpp"
#include "wlra/io.hpp"
#include "wlra/solver.hpp"
#include "wlra/synth.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>

namespace wlra::cli {

namespace {

namespace fs = std::filesystem;
using io::format_real;

// "kind" or "kind:a" or "kind:a,b".
struct KindSpec {
  std::string kind;
  std::vector<double> params;
};

KindSpec parse_kind(const std::string& text, const char* flag) {
  KindSpec out;
  const auto colon = text.find(':');
  out.kind = text.substr(0, colon);
  if (colon == std::string::npos) return out;
  std::string_view rest(text);
  rest.remove_prefix(colon + 1);
  while (true) {
    const auto comma = rest.find(',');
    const std::string_view tok = rest.substr(0, comma);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (tok.empty() || ec != std::errc() || ptr != tok.data() + tok.size())
      throw ValidationError(std::string(flag) + ": bad parameter '" + std::string(tok) + "'");
    out.params.push_back(v);
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return out;
}

void expect_params(const KindSpec& s, std::size_t count, const char* flag) {
  if (s.params.size() != count)
    throw ValidationError(std::string(flag) + ": '" + s.kind + "' takes " + std::to_string(count) +
                          " parameter(s)");
}

WeightSpec parse_weights(const std::string& text, std::uint64_t seed) {
  const KindSpec s = parse_kind(text, "--weights");
  WeightSpec spec;
  spec.seed = seed;
  if (s.kind == "ones") {
    expect_params(s, 0, "--weights");
    spec.kind = weights::AllOnes{};
  } else if (s.kind == "bernoulli") {
    expect_params(s, 1, "--weights");
    spec.kind = weights::BernoulliInverseP{s.params[0]};
  } else if (s.kind == "dregular") {
    expect_params(s, 1, "--weights");
    if (s.params[0] != std::floor(s.params[0])) throw ValidationError("--weights: d must be an integer");
    spec.kind = weights::DRegular{static_cast<Index>(s.params[0])};
  } else if (s.kind == "heavytail") {
    expect_params(s, 2, "--weights");
    spec.kind = weights::TruncatedHeavyTail{s.params[0], s.params[1]};
  } else {
    throw ValidationError("--weights: unknown kind '" + s.kind + "'");
  }
  return spec;
}

NoiseSpec parse_noise(const std::string& text, std::uint64_t seed) {
  const KindSpec s = parse_kind(text, "--noise");
  NoiseSpec spec;
  spec.seed = seed;
  if (s.kind == "zero") {
    expect_params(s, 0, "--noise");
    spec.kind = noise::Zero{};
  } else if (s.kind == "gaussian") {
    expect_params(s, 1, "--noise");
    spec.kind = noise::GaussianScaledToDelta{s.params[0]};
  } else {
    throw ValidationError("--noise: unknown kind '" + s.kind + "'");
  }
  return spec;
}

DenseMatrix load_dense_only(const std::string& path) {
  io::MatrixFormat fmt{};
  DenseMatrix m = io::load_matrix(path, &fmt);
  if (fmt != io::MatrixFormat::Dense) throw ValidationError(path + ": M must be in dense format");
  return m;
}

void kv(std::ostream& out, const std::string& key, double v) { out << key << ' ' << format_real(v) << '\n'; }
void kv(std::ostream& out, const std::string& key, Index v) { out << key << ' ' << v << '\n'; }
void kv(std::ostream& out, const std::string& key, const std::optional<double>& v) {
  if (v) kv(out, key, *v);
  else out << key << " absent\n";
}

struct GenerateArgs {
  Index n = 0;
  Index k = 0;
  double kappa = 1.0;
  std::optional<double> mu_cap;
  std::string weights = "ones";
  std::string noise = "zero";
  std::uint64_t seed = 0;
  std::string out;
};

int do_generate(const GenerateArgs& a, std::ostream& out) {
  if (a.n < 1 || a.k < 1 || a.k > a.n) throw ValidationError("generate: need 1 <= k <= n");
  const double n = static_cast<double>(a.n);
  const double mu_cap =
      a.mu_cap.value_or(std::min(n / static_cast<double>(a.k), std::max(1.0, 3.0 * std::log(n))));
  const GroundTruth truth = gen_ground_truth(a.n, a.k, a.kappa, mu_cap, a.seed);
  const DenseMatrix w = gen_weights(a.n, parse_weights(a.weights, a.seed));
  const DenseMatrix noise = gen_noise(a.n, w, parse_noise(a.noise, a.seed));
  const Problem p = assemble_problem(truth, w, noise);

  const fs::path dir(a.out);
  fs::create_directories(dir);
  io::save_matrix(dir / "M.txt", p.m());
  io::save_matrix(dir / "W.txt", w);
  io::save_matrix(dir / "N.txt", noise);
  io::save_truth(dir, truth);

  kv(out, "n", a.n);
  kv(out, "k", a.k);
  kv(out, "kappa", truth.kappa());
  kv(out, "mu", truth.mu());
  kv(out, "sigma_max", truth.sigma_max());
  kv(out, "sigma_min", truth.sigma_min());
  kv(out, "gamma", spectral_gap(w));
  kv(out, "delta", spectral_norm(kernels::omp::hadamard(w, noise)));
  return kExitOk;
}

int do_check(const std::string& m_path, const std::string& w_path, const std::string& truth_dir,
             std::ostream& out) {
  DenseMatrix m = load_dense_only(m_path);
  DenseMatrix w = io::load_matrix(w_path);
  std::optional<GroundTruth> truth;
  if (!truth_dir.empty()) truth.emplace(io::load_truth(truth_dir));
  // Without a truth there is no rank to check against; 1 keeps the problem well-formed.
  const Index k = truth ? truth->k() : 1;
  const Problem p(std::move(m), std::move(w), k);
  const AssumptionReport r = assumption_report(p, truth ? &*truth : nullptr);

  kv(out, "n", r.n);
  if (truth) kv(out, "k", r.k);
  kv(out, "mu", r.mu);
  kv(out, "gamma", r.gamma);
  kv(out, "lambda_lo", r.lambda_lo);
  kv(out, "lambda_hi", r.lambda_hi);
  kv(out, "d1", r.d1);
  kv(out, "w_inf", r.w_inf);
  kv(out, "kappa", r.kappa);
  kv(out, "delta", r.delta);
  kv(out, "gamma_bound_svd_init", r.gamma_bound_svd_init);
  kv(out, "w_inf_bound_random_init", r.w_inf_bound_random_init);
  for (const auto& v : r.verdicts) {
    out << "verdict." << v.name << ' ' << (v.pass ? "pass" : "fail");
    if (v.heuristic) out << " heuristic";
    out << " # " << v.detail << '\n';
  }
  return r.all_pass() ? kExitOk : kExitVerdictFailed;
}

struct SolveArgs {
  std::string m, w, out, trace, truth;
  Index k = 0;
  std::optional<int> iters;
  std::string init = "svd";
  std::optional<double> mu;
  double clip_const = 2.0;
  std::uint64_t seed = 0;
};

int do_solve(const SolveArgs& a, std::ostream& out) {
  const Problem p(load_dense_only(a.m), io::load_matrix(a.w), a.k);
  std::optional<GroundTruth> truth;
  if (!a.truth.empty()) truth.emplace(io::load_truth(a.truth));

  SolverConfig cfg;
  cfg.iterations = a.iters;
  cfg.clip_const = a.clip_const;
  cfg.mu = a.mu;
  cfg.init = a.init == "random" ? InitMode::Random : InitMode::Svd;
  cfg.seed = a.seed;
  const SolveResult res = alt_minimize(p, cfg, truth ? &*truth : nullptr);

  io::save_matrix(a.out, res.m_hat);
  if (!a.trace.empty()) {
    std::ofstream t(a.trace, std::ios::binary);
    if (!t) throw Error("cannot open '" + a.trace + "' for writing");
    io::write_trace(t, res.trace);
    if (!t) throw Error("write to '" + a.trace + "' failed");
  }

  kv(out, "iterations", static_cast<Index>(res.trace.size()));
  kv(out, "sigma_scale", res.sigma_scale);
  kv(out, "mu", res.mu_used);
  kv(out, "clip_threshold", res.clip_threshold);
  kv(out, "weighted_residual", res.trace.empty() ? 0.0 : res.trace.back().weighted_residual);
  kv(out, "singular_rows", static_cast<Index>(res.singular_rows.size()));
  if (truth) {
    const double err = spectral_norm(res.m_hat - truth->matrix());
    kv(out, "spectral_error", err);
    kv(out, "relative_spectral_error", err / truth->sigma_max());
    out << "outside_regime " << (res.outside_regime ? "yes" : "no") << '\n';
  }
  return kExitOk;
}

int do_gap(const std::string& w_path, int emin, int emax, const std::string& transform,
           std::ostream& out) {
  DenseMatrix w = io::load_matrix(w_path);
  if (!transform.empty()) {
    const KindSpec s = parse_kind(transform, "--transform");
    expect_params(s, 1, "--transform");
    if (s.kind == "floor") w = io::apply_weight_transform(w, io::WeightTransform::Floor, s.params[0]);
    else if (s.kind == "cap") w = io::apply_weight_transform(w, io::WeightTransform::Cap, s.params[0]);
    else throw ValidationError("--transform: unknown kind '" + s.kind + "'");
  }
  const io::GapSweep g = io::best_scaled_gap(w, emin, emax);
  kv(out, "best_gap", g.best_gap);
  kv(out, "best_scale", g.best_scale);
  out << "best_exponent " << g.best_exponent << '\n';
  if (w.rows() > 0) kv(out, "gamma", g.best_gap / static_cast<double>(w.rows()));
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Weighted low-rank approximation by clipped alternating minimization", "wlra"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "Write a synthetic instance");
  g->add_option("--n", gen.n, "Dimension")->required();
  g->add_option("--k", gen.k, "Rank")->required();
  g->add_option("--kappa", gen.kappa, "Condition number of M*")->default_val(1.0);
  g->add_option("--mu-cap", gen.mu_cap, "Incoherence cap (default min(n/k, 3 ln n))");
  g->add_option("--weights", gen.weights, "ones | bernoulli:P | dregular:D | heavytail:ALPHA,CAP")
      ->default_val("ones");
  g->add_option("--noise", gen.noise, "zero | gaussian:DELTA")->default_val("zero");
  g->add_option("--seed", gen.seed, "Seed")->default_val(0);
  g->add_option("--out", gen.out, "Output directory")->required();

  std::string chk_m, chk_w, chk_truth;
  auto* c = app.add_subcommand("check", "Report the measured assumptions");
  c->add_option("--m", chk_m, "Observed matrix")->required();
  c->add_option("--w", chk_w, "Weights")->required();
  c->add_option("--truth", chk_truth, "Directory with U.txt, sigma.txt, V.txt");

  SolveArgs sol;
  auto* s = app.add_subcommand("solve", "Run alternating minimization");
  s->add_option("--m", sol.m, "Observed matrix (dense)")->required();
  s->add_option("--w", sol.w, "Weights")->required();
  s->add_option("--k", sol.k, "Rank")->required();
  s->add_option("--iters", sol.iters, "Iterations T");
  s->add_option("--init", sol.init, "svd | random")->check(CLI::IsMember({"svd", "random"}))->default_val("svd");
  s->add_option("--mu", sol.mu, "Incoherence budget");
  s->add_option("--clip-const", sol.clip_const, "Clip constant c >= 2")->default_val(2.0);
  s->add_option("--seed", sol.seed, "Seed for random init")->default_val(0);
  s->add_option("--trace", sol.trace, "JSON-lines trace output");
  s->add_option("--truth", sol.truth, "Directory with U.txt, sigma.txt, V.txt");
  s->add_option("--out", sol.out, "Output matrix")->required();

  std::string gap_w, gap_transform;
  int gap_min = -20, gap_max = 10;
  auto* gp = app.add_subcommand("gap", "Best spectral gap over power-of-two weight scalings");
  gp->add_option("--w", gap_w, "Weights")->required();
  gp->add_option("--scale-min", gap_min, "Smallest exponent")->default_val(-20);
  gp->add_option("--scale-max", gap_max, "Largest exponent")->default_val(10);
  gp->add_option("--transform", gap_transform, "floor:C | cap:C applied to W first");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (*g) return do_generate(gen, out);
    if (*c) return do_check(chk_m, chk_w, chk_truth, out);
    if (*s) return do_solve(sol, out);
    return do_gap(gap_w, gap_min, gap_max, gap_transform, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
}

}  // namespace wlra::cli
