#include <string>

#include "CLI11.hpp"

#include "runner.hpp"

using umd::cli::RunConfig;

namespace {

void add_common(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--seed", cfg.seed, "master seed")->envname("UMDNORM_SEED");
  cmd->add_option("--depth", cfg.depth, "martingale depth n (identities: max Haar level)");
  cmd->add_option("--space", cfg.space, "source space spec lp:<p>:<m>");
  cmd->add_option("--target-space", cfg.target_space, "target space spec (default: source)");
  cmd->add_option("--budget-restarts", cfg.restarts, "optimizer restarts per sign pattern");
  cmd->add_option("--budget-iters", cfg.iterations, "ascent iterations per restart");
  cmd->add_option("--pattern-cutoff", cfg.pattern_cutoff,
                  "max sign patterns enumerated exhaustively");
  cmd->add_option("--tau-spec", cfg.tau_spec, "spectrum / residual tolerance");
  cmd->add_option("--tol-theorem", cfg.tol_theorem, "tolerance for the factor-3 estimate");
  cmd->add_option("--roundtrip-tol", cfg.roundtrip, "analyze/synthesize round-trip tolerance");
  cmd->add_option("--format", cfg.format, "report format")
      ->check(CLI::IsMember({"json", "csv"}));
  cmd->add_option("--out", cfg.out, "write the report to a file instead of stdout");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dyadic Haar analysis and UMD-type ideal norm estimation"};
  app.require_subcommand(1);

  RunConfig cfg;

  CLI::App* c_identities =
      app.add_subcommand("identities", "run the orthonormality, composition, main-property, "
                                       "self-similarity, and factor-2 suites");
  CLI::App* c_spread =
      app.add_subcommand("spread", "reduce an expansion + sign pattern to alternating signs");
  CLI::App* c_estimate = app.add_subcommand("estimate", "estimate the three ideal norms");
  CLI::App* c_verify =
      app.add_subcommand("verify", "verify the norm chain and both reduction steps on a depth grid");

  add_common(c_identities, cfg);
  add_common(c_spread, cfg);
  add_common(c_estimate, cfg);
  add_common(c_verify, cfg);

  c_spread->add_option("--input", cfg.input_file, "document holding an expansion and a sign pattern")
      ->required();
  c_estimate->add_option("--operator", cfg.operator_file,
                         "operator document (default: identity on --space)");
  c_verify->add_option("--operator", cfg.operator_file,
                       "operator document (default: identity on --space)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  CLI::App* sub = app.get_subcommands().front();
  cfg.space_set = sub->count("--space") > 0;
  cfg.target_space_set = sub->count("--target-space") > 0;

  if (sub == c_identities) {
    if (sub->count("--depth") == 0) cfg.depth = 5;
    return umd::cli::run_command(cfg, umd::cli::cmd_identities);
  }
  if (sub == c_spread) return umd::cli::run_command(cfg, umd::cli::cmd_spread);
  if (sub == c_estimate) return umd::cli::run_command(cfg, umd::cli::cmd_estimate);
  return umd::cli::run_command(cfg, umd::cli::cmd_verify);
}
