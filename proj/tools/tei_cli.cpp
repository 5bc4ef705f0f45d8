#include <iostream>

#include "CLI11.hpp"
#include "tei/commands.hpp"
#include "tei/error.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Transport-entropy inequality toolkit"};
  app.set_version_flag("--version", std::string(TEI_VERSION));

  std::string command, instance, config_path;
  app.add_option("command", command, "validate | transport | minimize | constants | verify-ov | verify-restricted-lsi | "
                                     "verify-w2i | concentration | dual-check | ma-residual")
      ->required();
  app.add_option("instance", instance, "instance JSON");
  app.add_option("--config", config_path, "run configuration JSON (strict); flags override it");

  tei::RunConfig over;
  std::optional<std::uint64_t> seed;
  std::optional<double> a, slack, margin, bracket_tol, slope_radius, lambda_o, conc_a, conc_b, dual_tol, alpha_q, beta_q;
  std::optional<std::string> out_dir, alpha, beta, method, slope;
  std::optional<std::size_t> multistarts, max_iter, probes, stencil;
  std::vector<double> levels;
  app.add_option("--seed", seed, "seed for multistarts and test-density suites");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("-a,--a", a, "functional parameter a");
  app.add_option("--alpha", alpha, "sqrt | identity | power");
  app.add_option("--beta", beta, "sqrt | identity | power");
  app.add_option("--alpha-q", alpha_q, "exponent for --alpha power");
  app.add_option("--beta-q", beta_q, "exponent for --beta power");
  app.add_option("--slack", slack, "transport slack (distance units)");
  app.add_option("--method", method, "mirror | fixed_point | truncation");
  app.add_option("--multistarts", multistarts);
  app.add_option("--max-iter", max_iter);
  app.add_option("--levels", levels, "truncation schedule");
  app.add_option("--slope", slope, "graph | global");
  app.add_option("--slope-radius", slope_radius, "graph radius, 0 for the smallest distance");
  app.add_option("--margin", margin, "inflation of suite estimates in chain checks");
  app.add_option("--bracket-tol", bracket_tol);
  app.add_option("--probes", probes);
  app.add_option("--lambda-o", lambda_o, "semiconcavity level of the restricted class");
  app.add_option("--conc-a", conc_a, "concentration transfer a");
  app.add_option("--conc-b", conc_b, "concentration transfer b");
  app.add_option("--dual-tol", dual_tol);
  app.add_option("--ma-stencil", stencil, "0 selects round(sqrt(n)/2)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : tei::kExitInput;
  }

  tei::RunConfig cfg;
  try {
    if (!config_path.empty()) cfg = tei::config_from_json(tei::read_json(config_path));
  } catch (const tei::Error& e) {
    std::cerr << e.what() << '\n';
    return tei::kExitInput;
  }
  cfg.command = command;
  if (!instance.empty()) cfg.instance = instance;
  if (seed) cfg.seed = *seed;
  if (out_dir) cfg.output_dir = *out_dir;
  if (a) cfg.a = *a;
  if (alpha) cfg.alpha = *alpha;
  if (beta) cfg.beta = *beta;
  if (alpha_q) cfg.alpha_q = *alpha_q;
  if (beta_q) cfg.beta_q = *beta_q;
  if (slack) cfg.slack = *slack;
  if (method) cfg.method = *method;
  if (multistarts) cfg.multistarts = *multistarts;
  if (max_iter) cfg.max_iter = *max_iter;
  if (!levels.empty()) cfg.levels = levels;
  if (slope) cfg.slope = *slope;
  if (slope_radius) cfg.slope_radius = *slope_radius;
  if (margin) cfg.margin = *margin;
  if (bracket_tol) cfg.bracket_tol = *bracket_tol;
  if (probes) cfg.probes = *probes;
  if (lambda_o) cfg.lambda_o = *lambda_o;
  if (conc_a) cfg.concentration_a = *conc_a;
  if (conc_b) cfg.concentration_b = *conc_b;
  if (dual_tol) cfg.dual_tol = *dual_tol;
  if (stencil) cfg.ma_stencil = *stencil;
  return tei::run(cfg, std::cout, std::cerr);
}
