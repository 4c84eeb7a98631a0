#include <ostream>

#include "CLI11.hpp"
#include "radwalk/cli/cli.hpp"
#include "radwalk/errors.hpp"

namespace radwalk::cli {

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Radial random walks on p x q matrices and their central limit theorems", "radwalk"};
  app.set_version_flag("--version", std::string(tool_version()));
  app.require_subcommand(1);

  RunOptions clt_opts;
  std::string manifest;
  std::uint64_t clt_seed = 0;
  unsigned clt_workers = 0;
  std::string clt_out;
  auto* clt = app.add_subcommand("clt", "Run the experiments of a manifest and write reports");
  clt->add_option("--manifest", manifest, "Run manifest (JSON)")->required();
  auto* clt_seed_opt = clt->add_option("--seed", clt_seed, "Master seed, overrides the manifest");
  auto* clt_workers_opt = clt->add_option("--workers", clt_workers, "Worker threads, 0 = all cores");
  auto* clt_out_opt = clt->add_option("--out", clt_out, "Output directory");
  clt->add_flag("--validate-decomposition", clt_opts.validate_decomposition,
                "Accumulate the cross terms directly and check Xi = A + B");

  std::uint64_t st_seed = 0;
  bool inject_fault = false;
  auto* selftest = app.add_subcommand("selftest", "Check the exact algebraic identities");
  auto* st_seed_opt = selftest->add_option("--seed", st_seed, "Seed for the random cases");
  // hidden negative control used by the test suite
  selftest->add_flag("--inject-kron-fault", inject_fault)->group("");

  MomentsOptions mom;
  std::string law_path, mom_out;
  std::uint64_t mom_seed = 0;
  auto* moments = app.add_subcommand("moments", "Parity and decay of radial moments m_kappa(nu_p)");
  moments->add_option("--law", law_path, "Radial law (JSON)")->required();
  moments->add_option("--kappa", mom.kappa, "Multi-index as row,col:exp;... (1-based)")->required();
  moments->add_option("--p-grid", mom.p_grid, "Comma separated dimensions, at least 3")->required();
  moments->add_option("--trials", mom.trials, "Monte Carlo draws per dimension");
  moments->add_option("--slope-tol", mom.slope_tol, "Allowed distance of the slope from -l");
  auto* mom_seed_opt = moments->add_option("--seed", mom_seed, "Seed");
  auto* mom_out_opt = moments->add_option("--out", mom_out, "Directory for moments.csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitPass : kExitUsage;
  }

  try {
    if (clt->parsed()) {
      if (*clt_seed_opt) clt_opts.seed = clt_seed;
      if (*clt_workers_opt) clt_opts.workers = clt_workers;
      if (*clt_out_opt) clt_opts.out = clt_out;
      return cmd_clt(manifest, clt_opts, out, err);
    }
    if (selftest->parsed()) {
      return cmd_selftest(*st_seed_opt ? std::optional<std::uint64_t>(st_seed) : std::nullopt, inject_fault, out);
    }
    mom.law = law_path;
    if (*mom_seed_opt) mom.seed = mom_seed;
    if (*mom_out_opt) mom.out = mom_out;
    return cmd_moments(mom, out, err);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const radwalk::Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitFail;
  }
}

}  // namespace radwalk::cli
