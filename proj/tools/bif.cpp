// bif: command-line front end. Exit codes: 0 ok, 2 config, 3 regime not
// applicable, 4 internal inconsistency, 5 numerical failure.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "bif/acceptance.hpp"
#include "bif/commands.hpp"

namespace {

struct Args {
  std::string config;
  std::optional<double> mu, lambda, mu_min, mu_max;
  std::optional<int> n;
  std::optional<std::string> out;
};

bif::RunConfig resolve(const Args& a) {
  bif::RunConfig c = a.config.empty() ? bif::RunConfig{} : bif::load_config(a.config);
  if (a.out) c.output_dir = *a.out;
  if (a.n) c.n_points = *a.n;
  c.validate();
  return c;
}

double need(const std::optional<double>& v, const char* flag) {
  if (!v) throw bif::Error(bif::ErrorKind::InvalidConfig, std::string("missing ") + flag);
  return *v;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bifurcation curves and exact multiplicity for the harvested Minkowski-curvature logistic problem"};
  app.require_subcommand(1);
  Args a;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", a.config, "JSON run configuration");
    sub->add_option("--n", a.n, "number of curve points (overrides n_points)");
    sub->add_option("--out", a.out, "output directory (overrides output_dir)");
  };
  auto* chars = app.add_subcommand("chars", "characteristic constants of g");
  auto* curve_s = app.add_subcommand("curve-s", "S_mu curve (mu = 0 gives the unharvested curve)");
  auto* curve_sigma = app.add_subcommand("curve-sigma", "Sigma_lambda curve");
  auto* bifset = app.add_subcommand("bifset", "bifurcation set B1, B2 with fold amplitudes");
  auto* classify = app.add_subcommand("classify", "region and multiplicity of (mu, lambda)");
  auto* solve = app.add_subcommand("solve", "solution profiles at (mu, lambda)");
  auto* verify = app.add_subcommand("verify", "run the acceptance criteria");
  for (auto* sub : {chars, curve_s, curve_sigma, bifset, classify, solve, verify}) add_common(sub);
  for (auto* sub : {curve_s, bifset, classify, solve}) sub->add_option("--mu", a.mu, "harvest rate mu");
  for (auto* sub : {curve_sigma, classify, solve}) sub->add_option("--lambda", a.lambda, "growth rate lambda");
  bifset->add_option("--mu-min", a.mu_min, "smallest mu (default 1e-4)");
  bifset->add_option("--mu-max", a.mu_max, "largest mu (default 0.5)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : bif::kExitConfig;
  }

  try {
    const bif::RunConfig cfg = resolve(a);
    if (chars->parsed()) {
      std::cout << bif::cmd_chars(cfg).str();
    } else if (curve_s->parsed()) {
      const auto t = bif::cmd_curve_s(cfg, need(a.mu, "--mu"), cfg.n_points);
      std::cout << "wrote " << t.rows.size() << " points to " << cfg.output_dir << "/s_mu.{csv,svg}\n";
    } else if (curve_sigma->parsed()) {
      const auto t = bif::cmd_curve_sigma(cfg, need(a.lambda, "--lambda"), cfg.n_points);
      std::cout << "wrote " << t.rows.size() << " points to " << cfg.output_dir << "/sigma_lambda.{csv,svg}\n";
    } else if (bifset->parsed()) {
      const int n = a.n.value_or(40);
      const auto t = bif::cmd_bifset(cfg, a.mu_min.value_or(1e-4), a.mu_max.value_or(0.5), n);
      std::cout << "wrote " << t.rows.size() << " rows to " << cfg.output_dir << "/bifset.{csv,svg}\n";
    } else if (classify->parsed()) {
      const auto rec = bif::cmd_classify(cfg, need(a.mu, "--mu"), need(a.lambda, "--lambda"));
      std::cout << rec.json.dump(2) << "\n";
      if (!rec.consistent) {
        std::cerr << "error: multiplicity " << rec.json["multiplicity"] << " disagrees with count_check "
                  << rec.json["count_check"] << "\n";
        return bif::kExitInconsistent;
      }
    } else if (solve->parsed()) {
      const auto t = bif::cmd_solve(cfg, need(a.mu, "--mu"), need(a.lambda, "--lambda"), cfg.n_points);
      std::cout << "wrote " << t.rows.size() << " rows to " << cfg.output_dir << "/profiles.csv\n";
    } else if (verify->parsed()) {
      return bif::cmd_verify(cfg, std::cout);
    }
  } catch (const bif::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return bif::exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return bif::kExitNumerical;
  }
  return bif::kExitOk;
}
