// cq: constrained-quantization solver CLI.

#include <CLI11.hpp>

#include "cq/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"constrained quantization of discrete measures on arcs and segment chains"};
  app.require_subcommand(1);

  cq::SolveArgs sa;
  auto* solve = app.add_subcommand("solve", "compute an optimal n-point set");
  solve->add_option("measure", sa.measure,
                    "measure JSON file or builtin (uniform7, nonuniform7, reciprocal)")
      ->required();
  solve->add_option("constraint", sa.constraint,
                    "constraint JSON file or builtin (semicircle3, triangle3, unit-semicircle, "
                    "unit-triangle)")
      ->required();
  solve->add_option("n", sa.n, "codebook size")->required();
  solve->add_option("--precision", sa.precision, "mantissa bits (default 256)");
  solve->add_option("--window", sa.window, "block-boundary search window (reciprocal measure)");
  solve->add_option("--format", sa.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

  cq::ReproduceArgs ra;
  auto* repro = app.add_subcommand("reproduce", "re-derive the bundled reference results");
  repro->add_option("--suite", ra.suite, "all, finite or infinite");
  repro->add_option("--max-n", ra.max_n, "largest reciprocal-measure n to verify");
  repro->add_option("--precision", ra.precision, "mantissa bits (default 256)");
  repro->add_option("--window", ra.window, "block-boundary search window");
  repro->add_option("--format", ra.format, "text or json")
      ->check(CLI::IsMember({"text", "json"}));

  cq::SeriesArgs se;
  auto* series = app.add_subcommand("series", "conditional weight/mean/error of a block [k, ell]");
  series->add_option("k", se.k, "first atom index")->required();
  series->add_option("ell", se.ell, "last atom index or 'inf'")->required();
  series->add_option("--precision", se.precision, "mantissa bits (default 256)");

  cq::OracleArgs oa;
  auto* oracle = app.add_subcommand("oracle", "grid-search verification run");
  oracle->add_option("measure", oa.measure, "measure JSON file or builtin")->required();
  oracle->add_option("constraint", oa.constraint, "constraint JSON file or builtin")->required();
  oracle->add_option("n", oa.n, "codebook size")->required();
  oracle->add_option("--res", oa.resolution, "grid resolution per parameter (>= 64)");
  oracle->add_option("--rounds", oa.rounds, "refinement rounds (>= 2)");
  oracle->add_option("--restarts", oa.restarts, "random restarts");
  oracle->add_option("--seed", oa.seed, "RNG seed");
  oracle->add_flag("--check", oa.check, "also run the exact solver and report the gap");
  oracle->add_option("--precision", oa.precision, "mantissa bits for --check");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (solve->parsed()) return cq::cmd_solve(sa, std::cout, std::cerr);
  if (repro->parsed()) return cq::cmd_reproduce(ra, std::cout, std::cerr);
  if (series->parsed()) return cq::cmd_series(se, std::cout, std::cerr);
  if (oracle->parsed()) return cq::cmd_oracle(oa, std::cout, std::cerr);
  return 2;
}
