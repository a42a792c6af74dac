#include "lowmem/experiment.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <random>
#include <sstream>

#include "lowmem/accelerated.hpp"
#include "lowmem/classic.hpp"
#include "lowmem/clock.hpp"
#include "lowmem/constrained.hpp"
#include "lowmem/mirror_prox.hpp"
#include "lowmem/problems.hpp"
#include "lowmem/sparse_max.hpp"

namespace lowmem {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kBoundTol = 1e-9;

// Everything a method may need from the problem section.
struct Built {
  std::optional<ProblemInstance> problem;
  std::optional<MatrixGame> game;
  std::optional<TtdData> ttd;
  std::optional<HolderData> holder;
  // linf_residual: f = |A x - b|_inf over a ball of this radius, f* = 0
  std::optional<Eigen::MatrixXd> linf_A;
  std::optional<DenseVector> linf_b;
  double linf_radius = 1.0;
  std::string name;
};

int get_int(const json& j, const char* key) {
  if (!j.contains(key)) throw ConfigError(std::string("missing parameter '") + key + "'");
  if (!j.at(key).is_number_integer()) throw ConfigError(std::string("parameter '") + key + "' must be an integer");
  return j.at(key).get<int>();
}

int get_int_or(const json& j, const char* key, int fallback) { return j.contains(key) ? get_int(j, key) : fallback; }

double get_double(const json& j, const char* key) {
  if (!j.contains(key)) throw ConfigError(std::string("missing parameter '") + key + "'");
  if (!j.at(key).is_number()) throw ConfigError(std::string("parameter '") + key + "' must be a number");
  return j.at(key).get<double>();
}

std::optional<double> get_opt(const json& j, const char* key) {
  if (!j.contains(key)) return std::nullopt;
  return get_double(j, key);
}

Eigen::MatrixXd uniform_matrix(Index m, Index n, double lo, double hi, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(lo, hi);
  Eigen::MatrixXd A(m, n);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < n; ++j) A(i, j) = u(rng);
  return A;
}

DenseVector normal_vector(Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  DenseVector v(n);
  for (Index i = 0; i < n; ++i) v[i] = g(rng);
  return v;
}

GameSetup parse_game_setup(const json& p) {
  const std::string s = p.value("setup", std::string("entropy"));
  if (s == "entropy") return GameSetup::kEntropySimplex;
  if (s == "euclidean") return GameSetup::kEuclideanBox;
  throw ConfigError("matrix_game setup must be 'entropy' or 'euclidean'");
}

Built build_generator(const json& p, std::uint64_t seed) {
  const std::string gen = p.at("generator").get<std::string>();
  Built b;
  b.name = gen;
  std::mt19937_64 rng(seed);
  if (gen == "gen_box_lp") {
    b.problem = gen_box_lp(get_int(p, "n"), get_int(p, "m"), seed);
  } else if (gen == "gen_transport_dual") {
    b.problem = gen_transport_dual(get_int(p, "m"), get_int(p, "n"), seed);
  } else if (gen == "gen_ttd_dual") {
    TtdData data = gen_ttd_data(get_int(p, "nodes"), get_int(p, "bars"), seed);
    b.ttd = data;
    b.problem = make_ttd_dual(std::move(data));
  } else if (gen == "norm2") {
    b.problem = make_norm2(normal_vector(get_int(p, "n"), rng));
    b.holder = HolderData{0.0, 2.0};
  } else if (gen == "quadratic_box") {
    const int n = get_int(p, "n");
    std::uniform_real_distribution<double> diag(1.0, 4.0);
    std::uniform_real_distribution<double> centre(-2.0, 2.0);
    DenseVector h(n), c(n);
    for (int i = 0; i < n; ++i) h[i] = diag(rng);
    for (int i = 0; i < n; ++i) c[i] = centre(rng);
    b.holder = HolderData{1.0, h.maxCoeff()};
    b.problem = make_quadratic(Eigen::MatrixXd(h.asDiagonal()), c, FeasibleSet::box(n, -1.0, 1.0));
  } else if (gen == "simplex_linear") {
    const int n = get_int(p, "n");
    std::uniform_real_distribution<double> u(0.0, 1.0);
    DenseVector c(n);
    for (int i = 0; i < n; ++i) c[i] = u(rng);
    b.problem = make_linear(c, FeasibleSet::simplex(n));
  } else if (gen == "matrix_game") {
    b.game = gen_matrix_game(uniform_matrix(get_int(p, "m"), get_int(p, "n"), -1.0, 1.0, rng), parse_game_setup(p));
    b.holder = b.game->op.holder;
  } else if (gen == "linf_residual") {
    const int m = get_int(p, "m");
    const int n = get_int(p, "n");
    b.linf_radius = p.contains("radius") ? get_double(p, "radius") : 1.0;
    Eigen::MatrixXd A = uniform_matrix(m, n, -1.0, 1.0, rng);
    DenseVector dir = normal_vector(n, rng);
    const DenseVector x_true = 0.5 * b.linf_radius * dir / dir.norm();
    b.linf_b = A * x_true;
    b.linf_A = std::move(A);
  } else {
    std::string list;
    for (const auto& g : available_generators()) list += (list.empty() ? "" : ", ") + g;
    throw ConfigError("unknown generator '" + gen + "'; available: " + list);
  }
  return b;
}

Built build_inline(const json& p) {
  Built b;
  const std::string type = p.at("type").get<std::string>();
  b.name = type;
  if (type == "matrix_game") {
    b.game = gen_matrix_game(matrix_from_json(p.at("A")), parse_game_setup(p));
    b.holder = b.game->op.holder;
    return b;
  }
  if (type == "linf_residual") {
    b.linf_A = matrix_from_json(p.at("A"));
    b.linf_b = vector_from_json(p.at("b"));
    b.linf_radius = p.contains("radius") ? get_double(p, "radius") : 1.0;
    return b;
  }
  try {
    b.problem = problem_from_descriptor(p);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad problem descriptor: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (type == "abs_1d" || type == "norm2") b.holder = HolderData{0.0, 2.0};
  if (type == "quadratic") {
    const Eigen::MatrixXd H = matrix_from_json(p.at("H"));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
    b.holder = HolderData{1.0, es.eigenvalues().cwiseAbs().maxCoeff()};
  }
  if (type == "ttd_dual") b.ttd = TtdData{matrix_from_json(p.at("bars")), vector_from_json(p.at("force"))};
  return b;
}

Built build_problem(const json& cfg, std::uint64_t seed) {
  if (!cfg.contains("problem") || !cfg.at("problem").is_object()) throw ConfigError("missing 'problem' object");
  const json& p = cfg.at("problem");
  if (p.contains("generator")) return build_generator(p, seed);
  if (p.contains("type")) return build_inline(p);
  throw ConfigError("problem needs a 'generator' or an inline 'type'");
}

ProxSetup build_setup(const json& cfg, const FeasibleSet& set) {
  const json s = cfg.value("setup", json::object());
  const std::string kind = s.value("kind", std::string(set.is_simplex_like() ? "entropy" : "euclidean"));
  std::optional<double> theta0_sq = get_opt(s, "theta0_sq");
  if (kind == "euclidean") {
    DenseVector center = s.contains("center") ? vector_from_json(s.at("center")) : DenseVector();
    return ProxSetup::euclidean(set, std::move(center), theta0_sq);
  }
  if (kind == "entropy") {
    if (!set.is_simplex_like()) throw ConfigError("entropy setup needs a simplex or l1-ball set");
    return ProxSetup::entropy(set, theta0_sq);
  }
  throw ConfigError("setup kind must be 'euclidean' or 'entropy'");
}

std::optional<DenseVector> start_from(const json& cfg) {
  if (!cfg.contains("x0")) return std::nullopt;
  return vector_from_json(cfg.at("x0"));
}

HolderData holder_of(const json& m, const Built& b) {
  if (m.contains("holder")) return HolderData{get_double(m.at("holder"), "nu"), get_double(m.at("holder"), "L")};
  if (b.holder) return *b.holder;
  throw ConfigError("method needs 'holder': {nu, L} for this problem");
}

const ProblemInstance& need_problem(const Built& b, const std::string& method) {
  if (!b.problem) throw ConfigError("method '" + method + "' needs a function-minimization problem");
  return *b.problem;
}

void add_check(ExperimentResult& r, std::string name, double measured, double bound) {
  r.checks.push_back({std::move(name), measured, bound, measured <= bound + kBoundTol});
}

// The k where gap - bound is largest; nothing is added when no pair exists.
void add_every_k(ExperimentResult& r, const std::string& name, const std::vector<double>& gap,
                 const std::vector<double>& bound) {
  std::optional<std::size_t> worst;
  for (std::size_t i = 0; i < gap.size(); ++i) {
    if (std::isnan(gap[i]) || std::isnan(bound[i])) continue;
    if (!worst || gap[i] - bound[i] > gap[*worst] - bound[*worst]) worst = i;
  }
  if (worst) add_check(r, name, gap[*worst], bound[*worst]);
}

double f_star_or_nan(const ProblemInstance& p) { return p.known_opt ? p.known_opt->f_star : kNaN; }

// ------------------------------------------------------------------ methods

void run_classic(const std::string& name, const json& m, const json& cfg, const Built& b, ExperimentResult& r) {
  const ProblemInstance& prob = need_problem(b, name);
  RunOptions opts;
  opts.x0 = start_from(cfg);
  SolverReport rep;
  const int N = get_int(m, "N");
  if (name == "shor") {
    const DenseVector x0 = opts.x0 ? *opts.x0 : DenseVector(DenseVector::Zero(prob.dim()));
    const double lambda = get_double(m, "lambda");
    rep = run_shor(prob, x0, lambda, N, opts);
    if (rep.min_distance) {
      const double eps = get_opt(m, "eps").value_or(0.1);
      add_check(r, "min_distance", *rep.min_distance, lambda * (1.0 + eps) / 2.0);
    }
  } else {
    const ProxSetup setup = build_setup(cfg, prob.set);
    if (name == "fixed_md") rep = run_fixed_md(prob, setup, get_double(m, "R"), get_double(m, "M"), N, opts);
    else if (name == "adaptive_md") rep = run_adaptive_md(prob, setup, get_double(m, "eps"), N, opts);
    else if (name == "normalized_md") rep = run_normalized_md(prob, setup, get_double(m, "R"), N, opts);
    else rep = run_strongly_convex_md(prob, setup, get_double(m, "mu"), N, opts);
    if (prob.known_opt && rep.bound) add_check(r, "f_gap", rep.f_out - prob.known_opt->f_star, *rep.bound);
  }
  for (const IterationRecord& rec : rep.trace.records)
    r.rows.push_back({rec.k, rec.f_value, kNaN, rec.step, rec.dual_norm, rec.oracle_calls, rec.elapsed_ns, kNaN});
  r.summary["x_out"] = to_json(rep.x_out);
  r.summary["f_out"] = rep.f_out;
  r.summary["iterations"] = rep.iterations;
  r.summary["oracle_calls"] = rep.oracle_calls;
  r.summary["exact_optimum"] = rep.exact_optimum;
  r.summary["lipschitz_violation"] = rep.lipschitz_violation;
  r.summary["max_dual_norm"] = rep.max_dual_norm;
  if (rep.bound) r.summary["bound"] = *rep.bound;
  if (rep.min_distance) r.summary["min_distance"] = *rep.min_distance;
  r.summary["f_star"] = f_star_or_nan(prob);
}

void run_constrained(const std::string& name, const json& m, const json& cfg, const Built& b,
                     std::uint64_t seed, ExperimentResult& r) {
  const ProblemInstance& prob = need_problem(b, name);
  if (!prob.constraints) throw ConfigError("method '" + name + "' needs a constrained problem");
  const ProxSetup setup = build_setup(cfg, prob.set);
  const double eps = get_double(m, "eps");
  const double delta = get_opt(m, "delta").value_or(0.0);
  ConstrainedOptions opts;
  opts.theta0_sq = get_opt(m, "theta0_sq");
  if (m.contains("max_iterations")) opts.max_iterations = get_int(m, "max_iterations");
  ProblemInstance solved = prob;
  if (delta > 0.0) {
    if (!prob.lipschitz_f) throw ConfigError("delta-inexact runs need a known objective Lipschitz constant");
    solved.objective = make_inexact(prob.objective, delta, *prob.lipschitz_f, seed);
  }
  const ConstrainedReport rep = name == "constrained_nonsmooth" ? solve_constrained_nonsmooth(solved, setup, eps, opts)
                                                                : solve_constrained_general(solved, setup, eps, opts);
  for (const ConstrainedRecord& rec : rep.trace)
    r.rows.push_back({rec.k, rec.f_value, rec.g_value, rec.step, rec.dual_norm, rec.oracle_calls, rec.elapsed_ns, kNaN});
  const double f_exact = prob.f(rep.x_bar);
  const double g_exact = *prob.g(rep.x_bar);
  if (rep.iteration_bound)
    add_check(r, "iterations", rep.iterations, static_cast<double>(*rep.iteration_bound));
  if (!rep.no_productive_steps) add_check(r, "g_value", g_exact, eps);
  if (name == "constrained_nonsmooth" && !rep.no_productive_steps) {
    if (prob.known_opt) add_check(r, "f_gap", f_exact - prob.known_opt->f_star, eps + delta);
    if (prob.dual_function && rep.lambda_bar) {
      const Certificates c = certify(prob, rep.x_bar, *rep.lambda_bar, prob.dual_function, eps);
      add_check(r, "duality_gap", c.duality_gap, eps + delta);
      r.summary["lambda_bar"] = to_json(*rep.lambda_bar);
    }
  }
  if (rep.min_vf) add_check(r, "min_vf", *rep.min_vf, eps);
  r.summary["x_bar"] = to_json(rep.x_bar);
  r.summary["f_value"] = f_exact;
  r.summary["g_value"] = g_exact;
  r.summary["iterations"] = rep.iterations;
  r.summary["productive_count"] = rep.productive_count;
  r.summary["oracle_calls"] = rep.oracle_calls;
  r.summary["theta0_sq"] = rep.theta0_sq;
  r.summary["theta0_source"] = rep.theta0_source;
  r.summary["exact_optimum"] = rep.exact_optimum;
  r.summary["no_productive_steps"] = rep.no_productive_steps;
  r.summary["hit_iteration_cap"] = rep.hit_iteration_cap;
  r.summary["f_star"] = f_star_or_nan(prob);
}

double v_to_opt(const ProblemInstance& prob, const ProxSetup& setup, const DenseVector& x0) {
  return prob.known_opt ? setup.bregman(x0, prob.known_opt->x_star) : kNaN;
}

void push_agm_rows(const AgmReport& rep, const std::vector<double>& values, const std::vector<double>& bounds,
                   ExperimentResult& r) {
  for (std::size_t i = 0; i < rep.trace.size(); ++i) {
    const AgmRecord& rec = rep.trace[i];
    r.rows.push_back({rec.k, values[i], kNaN, rec.alpha, rec.M, rec.oracle_calls, rec.elapsed_ns, bounds[i]});
  }
  r.summary["y"] = to_json(rep.y);
  r.summary["iterations"] = rep.iterations;
  r.summary["oracle_calls"] = rep.oracle_calls;
}

std::optional<double> slope_of(const std::vector<TraceRow>& rows, double f_star) {
  try {
    return fit_rate(rows, "f_value", f_star);
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

void run_agm(const std::string& name, const json& m, const json& cfg, const Built& b, ExperimentResult& r) {
  const ProblemInstance& prob = need_problem(b, name);
  const ProxSetup setup = build_setup(cfg, prob.set);
  AgmOptions opts;
  opts.x0 = start_from(cfg);
  const int N = get_int(m, "N");
  const double f_star = f_star_or_nan(prob);
  AgmReport rep;
  std::vector<double> bounds;
  if (name == "agm") {
    double L = 0.0;
    if (m.contains("L")) L = get_double(m, "L");
    else if (b.holder && b.holder->nu == 1.0) L = b.holder->L_nu;
    else throw ConfigError("agm needs 'L'");
    rep = agm_solve(prob, setup, L, N, opts);
    const double V = v_to_opt(prob, setup, rep.x0);
    for (const AgmRecord& rec : rep.trace) bounds.push_back(4.0 * L * V / ((rec.k + 1.0) * (rec.k + 1.0)));
  } else {
    const HolderData h = holder_of(m, b);
    const double eps = get_double(m, "eps");
    const double L0 = get_opt(m, "L0").value_or(1.0);
    rep = universal_agm(prob, setup, eps, L0, N, opts);
    const double V = v_to_opt(prob, setup, rep.x0);
    std::vector<double> calls, call_bounds;
    for (const AgmRecord& rec : rep.trace) {
      const bool ok = rec.k >= 2 && !std::isnan(V);
      bounds.push_back(ok ? universal_agm_rate(h.nu, h.L_nu, eps, rec.k - 1, V) : kNaN);
      calls.push_back(static_cast<double>(rec.oracle_calls));
      call_bounds.push_back(ok ? universal_agm_call_bound(h.nu, h.L_nu, eps, rec.k - 1, V) : kNaN);
    }
    add_every_k(r, "oracle_calls", calls, call_bounds);
    r.summary["holder"] = {{"nu", h.nu}, {"L", h.L_nu}};
    r.summary["exact_optimum"] = rep.exact_optimum;
  }
  std::vector<double> values, gaps;
  for (const AgmRecord& rec : rep.trace) {
    values.push_back(rec.f_y);
    gaps.push_back(rec.f_y - f_star);
  }
  add_every_k(r, "f_gap_every_k", gaps, bounds);
  push_agm_rows(rep, values, bounds, r);
  r.summary["f_y"] = rep.f_y;
  r.summary["f_star"] = f_star;
  if (!std::isnan(f_star))
    if (auto s = slope_of(r.rows, f_star)) r.summary["fitted_slope"] = *s;
}

void run_smoothing(const json& m, const Built& b, ExperimentResult& r) {
  if (!b.linf_A) throw ConfigError("smoothing_agm needs a linf_residual problem");
  const int N = get_int(m, "N");
  const FeasibleSet set = FeasibleSet::ball(DenseVector::Zero(b.linf_A->cols()), b.linf_radius);
  const ProxSetup setup = ProxSetup::euclidean(set);
  const double D1 = *setup.max_d();
  // Probe oracle only for |A| and D2, which do not depend on mu.
  const SmoothedLinfOracle probe(*b.linf_A, *b.linf_b, 1.0);
  const double mu = get_opt(m, "mu").value_or(choose_mu(probe.operator_norm(), D1, probe.D2(), N));
  const SmoothedLinfOracle oracle(*b.linf_A, *b.linf_b, mu);
  const ProblemInstance prob = make_smoothed_problem(oracle, set);
  AgmOptions opts;
  opts.keep_iterates = true;
  const AgmReport rep = agm_solve(prob, setup, oracle.lipschitz(), N, opts);
  std::vector<double> values;
  for (const DenseVector& y : rep.iterates) values.push_back(oracle.exact_value(y));
  push_agm_rows(rep, values, std::vector<double>(values.size(), kNaN), r);
  const double bound = smoothing_bound(oracle.operator_norm(), D1, oracle.D2(), 0.0, N);
  add_check(r, "linf_error", oracle.exact_value(rep.y), bound);
  r.summary["mu"] = mu;
  r.summary["L_mu"] = oracle.lipschitz();
  r.summary["D1"] = D1;
  r.summary["D2"] = oracle.D2();
  r.summary["operator_norm"] = oracle.operator_norm();
  r.summary["f_y"] = rep.f_y;
  r.summary["exact_value"] = oracle.exact_value(rep.y);
  r.summary["f_star"] = 0.0;
}

void run_mp(const std::string& name, const json& m, const Built& b, ExperimentResult& r) {
  if (!b.game) throw ConfigError("method '" + name + "' needs a matrix_game problem");
  const MatrixGame& g = *b.game;
  const int N = get_int(m, "N");
  const double maxV = *g.setup.max_bregman_from_center();
  VIOptions opts;
  opts.certify_every = get_int_or(m, "certify_every", 1);
  opts.certificate = [&g](const DenseVector& w) { return saddle_gap(g.game, w); };
  VIReport rep;
  std::vector<double> bounds;
  if (name == "mirror_prox") {
    const double L = get_opt(m, "L").value_or(*g.op.lipschitz);
    rep = mirror_prox_solve(g.op, g.setup, L, N, opts);
    for (const VIRecord& rec : rep.trace) bounds.push_back(L * maxV / rec.k);
  } else {
    const HolderData h = holder_of(m, b);
    const double eps = get_double(m, "eps");
    const double M_init = get_opt(m, "M_init").value_or(1.0);
    opts.adaptive_stop = m.value("adaptive_stop", false);
    rep = universal_mirror_prox_solve(g.op, g.setup, eps, M_init, N, opts);
    std::vector<double> calls, call_bounds;
    double max_M = 0.0;
    for (const VIRecord& rec : rep.trace) {
      bounds.push_back(universal_mp_rate(h.nu, h.L_nu, eps, rec.k, maxV));
      calls.push_back(static_cast<double>(rec.oracle_calls));
      call_bounds.push_back(universal_mp_call_bound(h.nu, h.L_nu, eps, rec.k, M_init));
      max_M = std::max(max_M, rec.M);
    }
    if (!rep.trace.empty()) add_check(r, "accepted_M", max_M, 2.0 * holder_L_of_delta(h.nu, h.L_nu, eps / 2.0));
    add_every_k(r, "oracle_calls", calls, call_bounds);
    r.summary["stopped_adaptively"] = rep.stopped_adaptively;
    r.summary["exact_solution"] = rep.exact_solution;
    r.summary["holder"] = {{"nu", h.nu}, {"L", h.L_nu}};
  }
  std::vector<double> gaps;
  for (std::size_t i = 0; i < rep.trace.size(); ++i) {
    const VIRecord& rec = rep.trace[i];
    gaps.push_back(rec.certificate.value_or(kNaN));
    r.rows.push_back({rec.k, kNaN, gaps.back(), 1.0 / rec.M, rec.M, rec.oracle_calls, rec.elapsed_ns, bounds[i]});
  }
  add_every_k(r, "saddle_gap_every_k", gaps, bounds);
  r.summary["w_hat"] = to_json(rep.w_hat);
  r.summary["iterations"] = rep.iterations;
  r.summary["oracle_calls"] = rep.oracle_calls;
  r.summary["evaluations"] = rep.evaluations;
  r.summary["max_V"] = maxV;
  r.summary["final_gap"] = saddle_gap(g.game, rep.w_hat);
}

void run_ttd_sparse(const json& m, const Built& b, ExperimentResult& r) {
  if (!b.ttd || !b.problem) throw ConfigError("ttd_sparse needs a ttd_dual problem");
  const auto* box = std::get_if<Box>(&b.problem->set.variant());
  if (!box) throw ConfigError("ttd_sparse needs a box feasible set");
  const double eps = get_double(m, "eps");
  const long cap = m.contains("max_iterations") ? get_int(m, "max_iterations") : 50'000'000L;
  const SteadyTime start = now();
  const SparseTtdReport rep = solve_ttd_sparse(*b.ttd, box->upper[0], eps, cap);
  r.rows.push_back({rep.iterations, rep.f_value, rep.g_value, kNaN, kNaN, 2L * rep.iterations, elapsed_ns(start), kNaN});
  if (rep.productive_count > 0) {
    add_check(r, "g_value", rep.g_value, eps);
    if (b.problem->known_opt) add_check(r, "f_gap", rep.f_value - b.problem->known_opt->f_star, eps);
  }
  add_check(r, "touched_nodes", static_cast<double>(rep.touched_total), static_cast<double>(rep.touched_bound_total));
  r.summary["y_bar"] = to_json(rep.y_bar);
  r.summary["lambda_bar"] = to_json(rep.lambda_bar);
  r.summary["iterations"] = rep.iterations;
  r.summary["productive_count"] = rep.productive_count;
  r.summary["f_value"] = rep.f_value;
  r.summary["g_value"] = rep.g_value;
  r.summary["f_star"] = f_star_or_nan(*b.problem);
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream ss(line);
  while (std::getline(ss, cur, ',')) out.push_back(cur);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double column_value(const TraceRow& row, const std::string& column) {
  if (column == "f_value") return row.f_value;
  if (column == "g_value") return row.g_value;
  if (column == "step") return row.step;
  if (column == "M_k") return row.M_k;
  if (column == "oracle_calls") return static_cast<double>(row.oracle_calls);
  if (column == "elapsed_ns") return static_cast<double>(row.elapsed_ns);
  if (column == "bound_value") return row.bound_value;
  throw std::invalid_argument("unknown trace column '" + column + "'");
}

}  // namespace

bool ExperimentResult::all_bounds_ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const BoundCheck& c) { return c.ok; });
}

const std::vector<std::string>& available_methods() {
  static const std::vector<std::string> names = {
      "shor", "fixed_md", "adaptive_md", "normalized_md", "strongly_convex_md", "constrained_nonsmooth",
      "constrained_general", "agm", "universal_agm", "smoothing_agm", "mirror_prox", "universal_mirror_prox",
      "ttd_sparse"};
  return names;
}

const std::vector<std::string>& available_generators() {
  static const std::vector<std::string> names = {"gen_box_lp",    "gen_transport_dual", "gen_ttd_dual",
                                                 "norm2",         "quadratic_box",      "simplex_linear",
                                                 "matrix_game",   "linf_residual"};
  return names;
}

ExperimentResult run_experiment(const json& config) {
  if (!config.is_object()) throw ConfigError("config must be a JSON object");
  if (!config.contains("seed") || !config.at("seed").is_number_integer() || config.at("seed").get<std::int64_t>() < 0)
    throw ConfigError("config needs a non-negative integer 'seed'");
  const std::uint64_t seed = config.at("seed").get<std::uint64_t>();
  if (!config.contains("method") || !config.at("method").contains("name"))
    throw ConfigError("config needs 'method': {\"name\": ...}");
  const json& m = config.at("method");
  const std::string name = m.at("name").get<std::string>();
  const auto& names = available_methods();
  if (std::find(names.begin(), names.end(), name) == names.end()) {
    std::string list;
    for (const auto& n : names) list += (list.empty() ? "" : ", ") + n;
    throw ConfigError("unknown method '" + name + "'; available methods: " + list);
  }
  const Built b = build_problem(config, seed);

  ExperimentResult r;
  r.method = name;
  r.summary = json::object();
  try {
    if (name == "shor" || name == "fixed_md" || name == "adaptive_md" || name == "normalized_md" ||
        name == "strongly_convex_md")
      run_classic(name, m, config, b, r);
    else if (name == "constrained_nonsmooth" || name == "constrained_general")
      run_constrained(name, m, config, b, seed, r);
    else if (name == "agm" || name == "universal_agm")
      run_agm(name, m, config, b, r);
    else if (name == "smoothing_agm")
      run_smoothing(m, b, r);
    else if (name == "mirror_prox" || name == "universal_mirror_prox")
      run_mp(name, m, b, r);
    else
      run_ttd_sparse(m, b, r);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad parameter: ") + e.what());
  }

  json checks = json::array();
  for (const BoundCheck& c : r.checks)
    checks.push_back({{"name", c.name}, {"measured", c.measured}, {"bound", c.bound}, {"ok", c.ok}});
  r.summary["method"] = name;
  r.summary["problem"] = b.name;
  r.summary["seed"] = seed;
  r.summary["checks"] = checks;
  r.summary["all_bounds_ok"] = r.all_bounds_ok();
  r.summary["rows"] = r.rows.size();
  r.summary["trace_digest"] = trace_digest(r.rows);
  return r;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string trace_csv(const std::vector<TraceRow>& rows) {
  std::string out = kTraceHeader;
  out += '\n';
  for (const TraceRow& t : rows) {
    out += std::to_string(t.k) + ',' + format_double(t.f_value) + ',' + format_double(t.g_value) + ',' +
           format_double(t.step) + ',' + format_double(t.M_k) + ',' + std::to_string(t.oracle_calls) + ',' +
           std::to_string(t.elapsed_ns) + ',' + format_double(t.bound_value) + '\n';
  }
  return out;
}

std::vector<TraceRow> parse_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kTraceHeader) throw std::invalid_argument("trace CSV: unexpected header");
  std::vector<TraceRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != 8) throw std::invalid_argument("trace CSV: expected 8 fields, got " + std::to_string(f.size()));
    TraceRow t;
    try {
      t.k = std::stol(f[0]);
      t.f_value = std::strtod(f[1].c_str(), nullptr);
      t.g_value = std::strtod(f[2].c_str(), nullptr);
      t.step = std::strtod(f[3].c_str(), nullptr);
      t.M_k = std::strtod(f[4].c_str(), nullptr);
      t.oracle_calls = std::stol(f[5]);
      t.elapsed_ns = std::stoll(f[6]);
      t.bound_value = std::strtod(f[7].c_str(), nullptr);
    } catch (const std::logic_error&) {
      throw std::invalid_argument("trace CSV: malformed row '" + line + "'");
    }
    rows.push_back(t);
  }
  return rows;
}

std::string csv_digest(const std::string& csv_text) {
  std::istringstream in(csv_text);
  std::string line;
  std::string canon;
  std::optional<std::size_t> drop;
  bool header = true;
  while (std::getline(in, line)) {
    auto f = split_csv(line);
    if (header) {
      for (std::size_t i = 0; i < f.size(); ++i)
        if (f[i] == "elapsed_ns") drop = i;
      header = false;
    }
    for (std::size_t i = 0; i < f.size(); ++i) {
      if (drop && i == *drop) continue;
      canon += f[i];
      canon += ',';
    }
    canon += '\n';
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(canon)));
  return buf;
}

std::string trace_digest(const std::vector<TraceRow>& rows) { return csv_digest(trace_csv(rows)); }

double fit_rate(const std::vector<double>& k, const std::vector<double>& values) {
  if (k.size() != values.size()) throw std::invalid_argument("fit_rate: k and values differ in length");
  if (values.size() < 10) throw std::invalid_argument("fit_rate: need at least 10 points");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] > 0.0) || !std::isfinite(values[i]))
      throw std::invalid_argument("fit_rate: non-positive or non-finite value in column");
    if (!(k[i] > 0.0)) throw std::invalid_argument("fit_rate: k must be positive");
  }
  const std::size_t start = values.size() / 2;
  const double n = static_cast<double>(values.size() - start);
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = start; i < values.size(); ++i) {
    sx += std::log(k[i]);
    sy += std::log(values[i]);
  }
  const double mx = sx / n;
  const double my = sy / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = start; i < values.size(); ++i) {
    const double dx = std::log(k[i]) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(values[i]) - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_rate: k values are all equal");
  return sxy / sxx;
}

double fit_rate(const std::vector<TraceRow>& rows, const std::string& column, double subtract) {
  std::vector<double> ks, vs;
  for (const TraceRow& t : rows) {
    const double v = column_value(t, column);
    if (t.k < 1 || std::isnan(v)) continue;
    ks.push_back(static_cast<double>(t.k));
    vs.push_back(v - subtract);
  }
  return fit_rate(ks, vs);
}

int run_experiment_file(const std::string& config_path, const std::string& out_dir, bool check_bounds,
                        std::ostream& out, std::ostream& err) {
  std::ifstream in(config_path);
  if (!in) {
    err << "error: cannot read config '" << config_path << "'\n";
    return 1;
  }
  json config;
  try {
    config = json::parse(in);
  } catch (const json::parse_error& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  }
  ExperimentResult result;
  try {
    result = run_experiment(config);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  const json outputs = config.value("outputs", json::object());
  namespace fs = std::filesystem;
  const fs::path dir = out_dir.empty() ? fs::path(".") : fs::path(out_dir);
  const fs::path trace_path = dir / outputs.value("trace", std::string("trace.csv"));
  const fs::path summary_path = dir / outputs.value("summary", std::string("summary.json"));
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    err << "error: cannot create '" << dir.string() << "': " << ec.message() << "\n";
    return 1;
  }
  {
    std::ofstream t(trace_path, std::ios::binary);
    t << trace_csv(result.rows);
    std::ofstream s(summary_path, std::ios::binary);
    s << result.summary.dump(2) << '\n';
    if (!t || !s) {
      err << "error: cannot write outputs into '" << dir.string() << "'\n";
      return 1;
    }
  }
  for (const BoundCheck& c : result.checks)
    out << (c.ok ? "ok   " : "FAIL ") << c.name << ": measured " << format_double(c.measured) << " <= bound "
        << format_double(c.bound) << "\n";
  out << "trace " << trace_path.string() << " (" << result.rows.size() << " rows, digest "
      << result.summary["trace_digest"].get<std::string>() << ")\n";
  if (check_bounds && !result.all_bounds_ok()) {
    err << "bound violation\n";
    return 3;
  }
  return 0;
}

}  // namespace lowmem
