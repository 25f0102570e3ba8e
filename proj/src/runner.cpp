#include "runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <vector>

#include "umd/self_similarity.hpp"
#include "umd/spectrum_spreading.hpp"

namespace umd::cli {

namespace {

// Seed streams for the randomized identity suites; the library reserves the
// low primes for its own streams.
constexpr std::uint64_t kStreamRoundtrip = 23;
constexpr std::uint64_t kStreamMainProperty = 29;
constexpr std::uint64_t kStreamSelfSimilarity = 31;
constexpr std::uint64_t kStreamFactor2 = 37;

constexpr int kVerifyTrials = 20;
constexpr int kMaxIdentitiesLevel = 8;
constexpr int kMaxDepth = 12;

json load_json(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  return json::parse(in);
}

json provenance(const RunConfig& cfg) {
  json j;
  j["seed"] = cfg.seed;
  j["depth"] = cfg.depth;
  j["space"] = cfg.space;
  j["target_space"] = cfg.target_space.empty() ? cfg.space : cfg.target_space;
  json tol;
  tol["tau_spec"] = round12(cfg.tau_spec);
  tol["tol_theorem"] = round12(cfg.tol_theorem);
  tol["roundtrip"] = round12(cfg.roundtrip);
  j["tolerances"] = std::move(tol);
  json b;
  b["restarts"] = cfg.restarts;
  b["iterations"] = cfg.iterations;
  b["pattern_cutoff"] = cfg.pattern_cutoff;
  j["budget"] = std::move(b);
  return j;
}

/// The operator under study: an explicit matrix from --operator, otherwise
/// the identity on the configured spaces. Explicit --space/--target-space
/// renorm the matrix and must match its dimensions.
Operator<double> load_operator(const RunConfig& cfg) {
  if (!cfg.operator_file.empty()) {
    Operator<double> T = operator_from_json(load_json(cfg.operator_file));
    if (!cfg.space_set && !cfg.target_space_set) return T;
    const NormedSpace<double> src = cfg.space_set ? parse_space(cfg.space) : T.source();
    const NormedSpace<double> tgt =
        cfg.target_space_set ? parse_space(cfg.target_space) : T.target();
    if (src.dimension() != T.matrix().cols() || tgt.dimension() != T.matrix().rows())
      throw ConfigError("operator is " + std::to_string(T.matrix().rows()) + "x" +
                        std::to_string(T.matrix().cols()) + " but configured spaces are " +
                        tgt.name() + " <- " + src.name());
    return Operator<double>(T.matrix(), src, tgt);
  }
  const NormedSpace<double> src = parse_space(cfg.space);
  const NormedSpace<double> tgt =
      cfg.target_space.empty() ? src : parse_space(cfg.target_space);
  if (src.dimension() != tgt.dimension())
    throw ConfigError("identity operator requires equal dimensions, got " + src.name() +
                      " -> " + tgt.name());
  return Operator<double>::identity(src, tgt);
}

json estimate_json(const NormEstimate<double>& est, bool with_witness) {
  json j;
  j["family"] = to_string(est.family);
  j["value"] = round12(est.value);
  j["raw"] = round12(est.raw);
  j["depth"] = est.depth;
  j["method"] = est.method;
  json b;
  b["restarts"] = est.budget.restarts;
  b["iterations"] = est.budget.iterations;
  b["pattern_cutoff"] = est.budget.pattern_cutoff;
  b["seed"] = est.budget.seed;
  j["budget"] = std::move(b);
  if (with_witness) {
    j["witness"] = json_of(est.witness);
    j["witness_signs"] = json_of(est.witness_signs);
  }
  return j;
}

json theorem_json(double lhs, double rhs, double tol, bool heuristic) {
  json t;
  t["lhs"] = round12(lhs);
  t["rhs"] = round12(rhs);
  t["tolerance"] = round12(tol);
  t["slack"] = round12(rhs + tol - lhs);
  t["ok"] = rhs + tol - lhs >= 0;
  t["heuristic"] = heuristic;
  return t;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += '"';
  return out;
}

void flatten_csv(const json& j, const std::string& path, std::string& out) {
  if (j.is_object()) {
    for (const auto& el : j.items())
      flatten_csv(el.value(), path.empty() ? el.key() : path + "." + el.key(), out);
  } else if (j.is_array()) {
    std::size_t i = 0;
    for (const auto& v : j) flatten_csv(v, path + "[" + std::to_string(i++) + "]", out);
  } else {
    out += csv_escape(path);
    out += ',';
    out += j.is_string() ? csv_escape(j.get<std::string>()) : j.dump();
    out += '\n';
  }
}

}  // namespace

void RunConfig::validate() const {
  if (!(tau_spec > 0) || !(tol_theorem > 0) || !(roundtrip > 0))
    throw ConfigError("all tolerances must be positive");
  if (depth < 1) throw ConfigError("depth must be >= 1");
  if (depth > kMaxDepth) throw ConfigError("depth must be <= " + std::to_string(kMaxDepth));
  if (restarts < 1 || iterations < 1) throw ConfigError("optimizer budget must be positive");
  if (pattern_cutoff < 1) throw ConfigError("pattern cutoff must be >= 1");
  if (format != "json" && format != "csv") throw ConfigError("format must be json or csv");
}

OptimizerBudget RunConfig::budget() const {
  OptimizerBudget b;
  b.restarts = restarts;
  b.iterations = iterations;
  b.pattern_cutoff = pattern_cutoff;
  b.seed = seed;
  return b;
}

CommandResult cmd_identities(const RunConfig& cfg) {
  cfg.validate();
  const int L = cfg.depth;
  if (L > kMaxIdentitiesLevel)
    throw ConfigError("identities suite supports max level <= " +
                      std::to_string(kMaxIdentitiesLevel));
  const NormedSpace<double> X = parse_space(cfg.space);
  const Eigen::Index m = X.dimension();

  json suites = json::array();
  bool all_pass = true;
  const auto add_suite = [&](const char* name, std::int64_t cases, double residual, double tol,
                             int violations = 0) {
    const bool pass = residual <= tol && violations == 0;
    json row;
    row["suite"] = name;
    row["cases"] = cases;
    row["max_residual"] = round12(residual);
    row["tolerance"] = round12(tol);
    row["violations"] = violations;
    row["pass"] = pass;
    suites.push_back(std::move(row));
    all_pass = all_pass && pass;
  };

  {
    const std::vector<HaarIndex> indices = TreeRange(1, L).enumerate();
    std::vector<StepFunction<double>> cells;
    cells.reserve(indices.size());
    for (const HaarIndex& idx : indices) cells.push_back(haar_cells(idx, L));
    const double w = 1.0 / static_cast<double>(std::int64_t(1) << L);
    double residual = 0;
    std::int64_t cases = 0;
    for (std::size_t a = 0; a < cells.size(); ++a) {
      residual = std::max(residual, std::abs(cells[a].cells().row(0).sum() * w));
      ++cases;
      for (std::size_t b = a; b < cells.size(); ++b) {
        const double ip = cells[a].cells().row(0).cwiseProduct(cells[b].cells().row(0)).sum() * w;
        residual = std::max(residual, std::abs(ip - (a == b ? 1.0 : 0.0)));
        ++cases;
      }
    }
    add_suite("orthonormality", cases, residual, cfg.tau_spec);
  }

  {
    double residual = 0;
    const int trials = 20;
    for (int t = 0; t < trials; ++t) {
      Rng rng(Rng::derive(cfg.seed, kStreamRoundtrip, static_cast<std::uint64_t>(t)));
      const HaarExpansion<double> x = random_expansion<double>(rng, L, m);
      const HaarExpansion<double> y = analyze(synthesize(x, L));
      residual = std::max(residual,
                          (y.mean() - x.mean()).lpNorm<Eigen::Infinity>());
      residual = std::max(
          residual, (y.coefficients() - x.coefficients()).lpNorm<Eigen::Infinity>());
    }
    add_suite("round-trip", trials, residual, cfg.roundtrip);
  }

  {
    double residual = 0;
    std::int64_t cases = 0;
    int violations = 0;
    for (int h = 1; h + 1 <= L; ++h) {
      for (std::int64_t i = 1; i <= (std::int64_t(1) << (h - 1)); ++i) {
        const CellPermutation sigma = swap(h, i);
        std::vector<std::vector<std::int64_t>> images(static_cast<std::size_t>(L + 1));
        for (const HaarIndex& idx : TreeRange(1, L).enumerate()) {
          const HaarAction action = haar_action(h, i, idx);
          const int r = std::max(idx.level(), h + 1);
          const StepFunction<double> lhs = synthesize(action.expansion, r);
          const StepFunction<double> rhs = pushforward(haar_cells(idx, r), sigma);
          residual = std::max(
              residual, (lhs.cells() - rhs.cells()).lpNorm<Eigen::Infinity>());
          ++cases;
          if (action.kind == HaarActionKind::permuted_within_level)
            images[static_cast<std::size_t>(idx.level())].push_back(action.image->position());
        }
        // Within every deep level the image positions must form a permutation.
        for (int k = h + 2; k <= L; ++k) {
          auto& v = images[static_cast<std::size_t>(k)];
          std::sort(v.begin(), v.end());
          for (std::size_t t = 0; t < v.size(); ++t)
            if (v[t] != static_cast<std::int64_t>(t) + 1) {
              ++violations;
              break;
            }
        }
      }
    }
    add_suite("composition-table", cases, residual, cfg.tau_spec, violations);
  }

  {
    double residual = 0;
    std::int64_t cases = 0;
    if (L >= 2) {
      const int trials = 100;
      for (int t = 0; t < trials; ++t) {
        Rng rng(Rng::derive(cfg.seed, kStreamMainProperty, static_cast<std::uint64_t>(t)));
        const int h = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(L - 1)));
        const std::int64_t i =
            1 + static_cast<std::int64_t>(rng.below(std::uint64_t(1) << (h - 1)));
        HaarExpansion<double> x = random_expansion<double>(rng, L, m);
        const auto [left, right] = HaarIndex(h, i).children();
        x.coefficient(left).setZero();
        x.coefficient(right).setZero();
        residual = std::max(residual, check_main_property(x, h, i, cfg.tau_spec).max_residual());
        ++cases;
      }
    }
    add_suite("main-property", cases, residual, cfg.tau_spec);
  }

  {
    double residual = 0;
    std::int64_t cases = 0;
    for (int n = 1; 2 * n <= L; ++n) {
      for (int k = n + 1; k <= 2 * n; ++k)
        for (std::int64_t j = 1; j <= (std::int64_t(1) << (k - 1)); ++j)
          for (std::int64_t i = 1; i <= (std::int64_t(1) << n); ++i) {
            residual = std::max(residual, check_rescaling(HaarIndex(k, j), i, n).max_residual);
            ++cases;
          }
      for (int t = 0; t < 5; ++t) {
        Rng rng(Rng::derive(cfg.seed, kStreamSelfSimilarity,
                            static_cast<std::uint64_t>(n) * 1000 + static_cast<std::uint64_t>(t)));
        const HaarExpansion<double> x = random_expansion<double>(rng, 2 * n, m);
        const auto parts = split_lower_upper(x, n);
        HaarExpansion<double> back = parts.first.padded(2 * n);
        back.mean() += parts.second.mean();
        back.coefficients() += parts.second.coefficients();
        residual = std::max(
            residual, (back.coefficients() - x.coefficients()).lpNorm<Eigen::Infinity>());
        residual = std::max(residual, blockwise_norms(synthesize(x, 2 * n), n, X).residual);
        residual = std::max(residual,
                            check_restriction_identity(parts.second, n, X).max_residual);
        ++cases;
      }
    }
    add_suite("self-similarity", cases, residual, cfg.tau_spec);
  }

  {
    double worst = 0;  // largest violation of slack >= 0
    std::int64_t cases = 0;
    for (int n = 1; 2 * n <= L; ++n) {
      for (int t = 0; t < 50; ++t) {
        Rng rng(Rng::derive(cfg.seed, kStreamFactor2,
                            static_cast<std::uint64_t>(n) * 1000 + static_cast<std::uint64_t>(t)));
        const HaarExpansion<double> x = random_expansion<double>(rng, 2 * n, m);
        worst = std::max(worst, -check_upper_bound_factor2(x, n, X).slack);
        ++cases;
      }
    }
    add_suite("factor-2", cases, std::max(worst, 0.0), cfg.tau_spec);
  }

  json report;
  report["command"] = "identities";
  report["provenance"] = provenance(cfg);
  report["max_level"] = L;
  report["suites"] = std::move(suites);
  report["pass"] = all_pass;
  return {all_pass ? 0 : 1, std::move(report)};
}

CommandResult cmd_spread(const RunConfig& cfg) {
  cfg.validate();
  if (cfg.input_file.empty()) throw ConfigError("spread requires --input <file>");
  const json doc = load_json(cfg.input_file);
  const HaarExpansion<double> x = expansion_from_json(doc.at("expansion"));
  const SignPattern eps = sign_pattern_from_json(doc.at("signs"));
  if (x.depth() > kMaxDepth)
    throw ConfigError("input depth must be <= " + std::to_string(kMaxDepth));

  NormedSpace<double> X = NormedSpace<double>::euclidean(x.dimension());
  if (cfg.space_set) {
    X = parse_space(cfg.space);
    if (X.dimension() != x.dimension())
      throw ConfigError("input has dimension " + std::to_string(x.dimension()) +
                        " but --space is " + X.name());
  }

  const SpreadResult<double> sr = reduce_to_alternating(x, eps, X, cfg.tau_spec);

  json report;
  report["command"] = "spread";
  report["provenance"] = provenance(cfg);
  json input;
  input["dim"] = x.dimension();
  input["depth"] = x.depth();
  report["input"] = std::move(input);

  json schedule;
  schedule["source_depth"] = sr.schedule.source_depth;
  schedule["target_depth"] = sr.schedule.target_depth;
  json swaps = json::array();
  for (const IntervalSwap& s : sr.schedule.swaps) swaps.push_back(json::array({s.level, s.position}));
  schedule["swaps"] = std::move(swaps);
  report["schedule"] = std::move(schedule);

  json delta;
  delta["source_depth"] = sr.delta.source_depth;
  delta["depth"] = sr.delta.depth;
  json signs = json::array();
  for (const std::int8_t s : sr.delta.signs) signs.push_back(static_cast<int>(s));
  delta["signs"] = std::move(signs);
  json realized = json::array();
  for (const std::uint8_t r : sr.delta.realized) realized.push_back(static_cast<int>(r));
  delta["realized"] = std::move(realized);
  report["delta"] = std::move(delta);

  report["psi"] = json_of(sr.psi);
  report["psi1"] = json_of(sr.psi1);
  report["psi2"] = json_of(sr.psi2);
  report["transported"] = json_of(sr.transported);
  report["transported_signed"] = json_of(sr.transported_signed);

  json cert;
  cert["space"] = X.name();
  cert["max_residual"] = round12(sr.max_residual);
  cert["worst_index"] = json::array({sr.worst_index.level(), sr.worst_index.position()});
  cert["norm_residual_f"] = round12(sr.norm_residual_f);
  cert["norm_residual_feps"] = round12(sr.norm_residual_feps);
  cert["tolerance"] = round12(cfg.tau_spec);
  cert["pass"] = true;  // reduce_to_alternating throws when the certificate fails
  report["certificate"] = std::move(cert);
  report["pass"] = true;
  return {0, std::move(report)};
}

CommandResult cmd_estimate(const RunConfig& cfg) {
  cfg.validate();
  const Operator<double> T = load_operator(cfg);
  const ChainReport<double> rep = verify_chain(T, cfg.depth, cfg.budget());

  json report;
  report["command"] = "estimate";
  report["provenance"] = provenance(cfg);
  report["operator"] = json_of(T);
  json estimates = json::array();
  estimates.push_back(estimate_json(rep.alternating, true));
  estimates.push_back(estimate_json(rep.level, true));
  estimates.push_back(estimate_json(rep.free, true));
  report["estimates"] = std::move(estimates);
  report["chain_ok"] = rep.chain_ok;
  report["theorem"] =
      theorem_json(rep.theorem_lhs, rep.theorem_rhs, cfg.tol_theorem, rep.heuristic);
  report["pass"] = rep.chain_ok;
  return {rep.chain_ok ? 0 : 1, std::move(report)};
}

CommandResult cmd_verify(const RunConfig& cfg) {
  cfg.validate();
  const Operator<double> T = load_operator(cfg);
  const OptimizerBudget b = cfg.budget();

  json grid = json::array();
  json summary = json::array();
  int hard_violations = 0;
  int flagged = 0;

  for (int n = 1; n <= cfg.depth; ++n) {
    json cell;
    cell["key"] = "n=" + std::to_string(n);
    cell["depth"] = n;

    const ChainReport<double> chain = verify_chain(T, n, b);
    const double chain_slack = chain.theorem_rhs + cfg.tol_theorem - chain.theorem_lhs;
    {
      json jc;
      jc["alternating"] = estimate_json(chain.alternating, false);
      jc["level"] = estimate_json(chain.level, false);
      jc["free"] = estimate_json(chain.free, false);
      jc["chain_ok"] = chain.chain_ok;
      jc["heuristic"] = chain.heuristic;
      jc["theorem"] =
          theorem_json(chain.theorem_lhs, chain.theorem_rhs, cfg.tol_theorem, chain.heuristic);
      cell["chain"] = std::move(jc);
    }
    if (!chain.chain_ok) ++hard_violations;
    if (chain_slack < 0) {
      if (chain.heuristic) ++flagged;
      else ++hard_violations;
    }

    const Prop1Report<double> p1 = verify_prop1(T, n, kVerifyTrials, b);
    {
      json jp;
      jp["mu_n"] = estimate_json(p1.mu_n, false);
      jp["mu_2n"] = estimate_json(p1.mu_2n, false);
      jp["trials"] = static_cast<std::int64_t>(p1.trials.size());
      jp["violations"] = p1.violations;
      jp["max_identity_residual"] = round12(p1.max_identity_residual);
      jp["max_norm_residual"] = round12(p1.max_norm_residual);
      jp["aggregate_slack"] = round12(p1.aggregate_slack);
      jp["aggregate_ok"] = p1.aggregate_ok;
      cell["prop1"] = std::move(jp);
    }
    if (p1.violations > 0 || !p1.aggregate_ok) ++hard_violations;

    const Prop2Report<double> p2 = verify_prop2(T, n, b, kVerifyTrials);
    const double p2_slack = p2.theorem_rhs + cfg.tol_theorem - p2.theorem_lhs;
    {
      json jp;
      jp["mu_n"] = estimate_json(p2.mu_n, false);
      jp["mu_2n"] = estimate_json(p2.mu_2n, false);
      jp["trials"] = static_cast<std::int64_t>(p2.trials.size());
      jp["violations"] = p2.violations;
      jp["max_blockwise_residual"] = round12(p2.max_blockwise_residual);
      jp["max_restriction_residual"] = round12(p2.max_restriction_residual);
      jp["heuristic"] = p2.heuristic;
      jp["theorem"] =
          theorem_json(p2.theorem_lhs, p2.theorem_rhs, cfg.tol_theorem, p2.heuristic);
      cell["prop2"] = std::move(jp);
    }
    if (p2.violations > 0) ++hard_violations;
    if (p2_slack < 0) {
      if (p2.heuristic) ++flagged;
      else ++hard_violations;
    }

    grid.push_back(std::move(cell));

    json row;
    row["key"] = "n=" + std::to_string(n);
    row["chain_ok"] = chain.chain_ok;
    row["chain_theorem_slack"] = round12(chain_slack);
    row["prop1_aggregate_slack"] = round12(p1.aggregate_slack);
    row["prop2_theorem_slack"] = round12(p2_slack);
    row["heuristic"] = chain.heuristic || p2.heuristic;
    summary.push_back(std::move(row));
  }

  json report;
  report["command"] = "verify";
  report["provenance"] = provenance(cfg);
  report["operator"] = json_of(T);
  report["grid"] = std::move(grid);
  report["summary"] = std::move(summary);
  report["hard_violations"] = hard_violations;
  report["flagged"] = flagged;
  report["pass"] = hard_violations == 0;
  return {hard_violations == 0 ? 0 : 1, std::move(report)};
}

std::string render(const RunConfig& cfg, const json& report) {
  if (cfg.format == "csv") {
    std::string out = "key,value\n";
    flatten_csv(report, "", out);
    return out;
  }
  return report.dump(2) + "\n";
}

void write_report(const RunConfig& cfg, const json& report) {
  const std::string text = render(cfg, report);
  if (cfg.out.empty()) {
    std::cout << text << std::flush;
    return;
  }
  std::ofstream f(cfg.out, std::ios::binary);
  if (!f) throw ConfigError("cannot open output file '" + cfg.out + "'");
  f << text << std::flush;
  if (!f) throw ConfigError("failed to write output file '" + cfg.out + "'");
}

int run_command(const RunConfig& cfg, CommandResult (*command)(const RunConfig&)) {
  try {
    const CommandResult res = command(cfg);
    write_report(cfg, res.report);
    return res.exit_code;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace umd::cli
