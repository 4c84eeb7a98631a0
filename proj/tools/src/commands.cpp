#include <chrono>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "radwalk/cli/cli.hpp"
#include "radwalk/errors.hpp"

namespace radwalk::cli {

using ojson = nlohmann::ordered_json;

namespace {

constexpr const char* kCsvHeader = "id,regime,n,p,q,predicted_var,empirical_var,stderr,rel_frob_err,ks_stat,verdict";

ojson matrix_json(const Mat& m) {
  ojson a = ojson::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    ojson row = ojson::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    a.push_back(std::move(row));
  }
  return a;
}

ojson provenance(const RunManifest& m, std::uint64_t seed, std::string_view id, std::string_view kind,
                 const std::string& canonical) {
  ojson j;
  j["tool"] = "radwalk";
  j["version"] = tool_version();
  j["seed"] = seed;
  j["config_hash"] = hex64(m.config_hash);
  j["entry_hash"] = hex64(fnv1a(canonical));
  j["suite"] = m.suite;
  j["id"] = id;
  j["kind"] = kind;
  j["config"] = ojson::parse(canonical);
  return j;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw ConfigError(path.string() + ": cannot write");
  f << text;
  if (!f) throw ConfigError(path.string() + ": write failed");
}

double trace(const SymMat& s) {
  double t = 0.0;
  for (std::size_t i = 0; i < s.dim(); ++i) t += s(i, i);
  return t;
}

struct CltOutcome {
  Verdict verdict;
  std::string csv_row;
};

CltOutcome run_clt_entry(const RunManifest& m, const CltEntry& e, std::uint64_t seed, unsigned workers,
                         bool validate, const std::filesystem::path& dir, std::ostream& out) {
  WalkConfig cfg = e.cfg;
  cfg.seed = seed;
  cfg.validate_decomposition = cfg.validate_decomposition || validate;
  const ExperimentReport rep = verify_clt(cfg, workers);

  ojson j = provenance(m, seed, e.id, "clt", e.canonical);
  j["regime"] = regime_name(cfg.regime);
  j["n"] = cfg.n;
  j["p"] = cfg.p;
  j["q"] = rep.q;
  j["c"] = cfg.c;
  j["trials"] = cfg.trials;
  j["stream"] = hex64(cfg.stream);
  j["fast_path"] = cfg.fast_path;
  j["validate_decomposition"] = cfg.validate_decomposition;
  j["scale"] = rep.scale;
  j["predicted_finite"] = matrix_json(rep.predicted_finite);
  j["predicted_limit"] = matrix_json(rep.predicted_limit);
  j["empirical"] = matrix_json(rep.empirical);
  j["std_error"] = matrix_json(rep.std_error);
  j["empirical_mean"] = rep.empirical_mean;
  j["rel_frob_err_finite"] = rep.rel_frob_err_finite;
  j["rel_frob_err_limit"] = rep.rel_frob_err_limit;
  j["z_scores"] = matrix_json(rep.z_scores);
  j["ks_stats"] = rep.ks_stats;
  j["ks_stat"] = rep.ks_stat;
  j["ks_critical"] = rep.ks_critical;
  j["max_cross_cov_z"] = rep.max_cross_cov_z;
  if (rep.max_decomposition_residual) j["max_decomposition_residual"] = *rep.max_decomposition_residual;
  ojson crit = ojson::array();
  for (const auto& c : rep.criteria)
    crit.push_back({{"name", c.name}, {"verdict", verdict_name(c.verdict)}, {"statistic", c.statistic},
                    {"threshold", c.threshold}});
  j["criteria"] = std::move(crit);
  j["verdict"] = verdict_name(rep.verdict);
  write_file(dir / (e.id + ".json"), j.dump(2) + "\n");

  double se2 = 0.0;
  for (std::size_t i = 0; i < rep.std_error.rows(); ++i) se2 += rep.std_error(i, i) * rep.std_error(i, i);
  std::ostringstream row;
  row << e.id << ',' << regime_name(cfg.regime) << ',' << cfg.n << ',' << cfg.p << ',' << rep.q << ','
      << format_double(trace(rep.predicted_limit)) << ',' << format_double(trace(rep.empirical)) << ','
      << format_double(std::sqrt(se2)) << ',' << format_double(rep.rel_frob_err_limit) << ','
      << format_double(rep.ks_stat) << ',' << verdict_name(rep.verdict);

  out << e.id << ": " << verdict_name(rep.verdict) << " (empirical " << format_double(trace(rep.empirical))
      << ", finite-n " << format_double(trace(rep.predicted_finite)) << ", limit "
      << format_double(trace(rep.predicted_limit)) << ", " << rep.wall_seconds << " s)\n";
  return {rep.verdict, row.str()};
}

ojson decay_json(const MomentDecayReport& rep) {
  ojson j;
  j["branch"] = rep.parity_branch ? "parity" : "decay";
  j["l"] = rep.l;
  ojson pts = ojson::array();
  for (const auto& pt : rep.points) pts.push_back({{"p", pt.p}, {"estimate", pt.estimate}, {"stderr", pt.std_error}});
  j["points"] = std::move(pts);
  if (rep.slope) {
    j["slope"] = *rep.slope;
    j["slope_stderr"] = *rep.slope_std_error;
    j["intercept"] = *rep.intercept;
    j["slope_target"] = -static_cast<double>(rep.l);
    j["slope_tol"] = rep.slope_tol;
  }
  j["max_abs_z"] = rep.max_abs_z;
  j["z_tol"] = rep.z_tol;
  j["verdict"] = verdict_name(rep.verdict);
  return j;
}

std::string decay_verdict_line(const MomentDecayReport& rep) {
  std::ostringstream s;
  if (rep.parity_branch) {
    s << "parity: " << verdict_name(rep.verdict) << " (max |z| = " << format_double(rep.max_abs_z) << " < "
      << format_double(rep.z_tol) << ")";
  } else {
    s << "decay: " << verdict_name(rep.verdict);
    if (rep.slope)
      s << " (slope " << format_double(*rep.slope) << ", target " << -static_cast<int>(rep.l) << " +/- "
        << format_double(rep.slope_tol) << ")";
  }
  return s.str();
}

std::string provenance_comments(std::uint64_t seed, std::uint64_t hash) {
  std::ostringstream s;
  s << "# radwalk " << tool_version() << "\n# seed " << seed << "\n# config_hash " << hex64(hash) << "\n";
  return s.str();
}

}  // namespace

std::string_view tool_version() noexcept { return RADWALK_VERSION; }

int cmd_clt(const std::filesystem::path& manifest_path, const RunOptions& opts, std::ostream& out,
            std::ostream& err) {
  RunManifest m;
  std::uint64_t seed = 0;
  unsigned workers = 0;
  std::filesystem::path dir;
  try {
    m = load_manifest(manifest_path);
    seed = opts.seed.value_or(m.seed);
    workers = resolve_workers(opts.workers, m.workers);
    dir = opts.out ? *opts.out : std::filesystem::path(m.out.value_or("."));
    std::filesystem::create_directories(dir);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "config error: " << e.what() << "\n";
    return kExitUsage;
  }

  std::string csv = provenance_comments(seed, m.config_hash) + kCsvHeader + "\n";
  bool all_pass = true;
  try {
    for (const ManifestEntry& entry : m.entries) {
      if (const auto* e = std::get_if<CltEntry>(&entry)) {
        const CltOutcome o = run_clt_entry(m, *e, seed, workers, opts.validate_decomposition, dir, out);
        csv += o.csv_row + "\n";
        all_pass = all_pass && o.verdict == Verdict::kPass;
      } else if (const auto* e = std::get_if<MomentsEntry>(&entry)) {
        const MomentDecayReport rep =
            moment_decay_experiment(e->law, e->kappa, e->p_grid, e->trials, seed, fnv1a(e->id), e->slope_tol, e->z_tol);
        ojson j = provenance(m, seed, e->id, "moments", e->canonical);
        j.update(decay_json(rep));
        write_file(dir / (e->id + ".json"), j.dump(2) + "\n");
        out << e->id << ": " << decay_verdict_line(rep) << "\n";
        all_pass = all_pass && rep.verdict == Verdict::kPass;
      } else {
        const auto& st = std::get<SelftestEntry>(entry);
        const std::vector<SuiteResult> results = run_selftest(seed);
        ojson j = provenance(m, seed, st.id, "selftest", st.canonical);
        ojson suites = ojson::array();
        bool pass = true;
        for (const auto& r : results) {
          suites.push_back({{"name", r.name}, {"verdict", r.pass ? "PASS" : "FAIL"}, {"cases", r.cases},
                            {"worst", r.worst}, {"tolerance", r.tolerance}});
          pass = pass && r.pass;
        }
        j["suites"] = std::move(suites);
        j["verdict"] = pass ? "PASS" : "FAIL";
        write_file(dir / (st.id + ".json"), j.dump(2) + "\n");
        out << st.id << ": " << (pass ? "PASS" : "FAIL") << "\n";
        all_pass = all_pass && pass;
      }
    }
    write_file(dir / (m.suite + ".csv"), csv);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return all_pass ? kExitPass : kExitFail;
}

int cmd_moments(const MomentsOptions& opts, std::ostream& out, std::ostream& err) {
  std::optional<RadialLaw> law;
  MultiIndex kappa;
  std::vector<std::size_t> grid;
  std::string law_text;
  try {
    std::ifstream in(opts.law, std::ios::binary);
    if (!in) throw ConfigError(opts.law.string() + ": cannot open file");
    law_text.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    law = parse_law(law_text);
    kappa = parse_kappa(opts.kappa);
    grid = parse_grid(opts.p_grid);
    if (grid.size() < 3) throw ConfigError("p-grid: needs at least 3 dimensions to fit a slope");
    if (opts.trials < 1000) throw ConfigError("trials: needs at least 1000");
    const std::size_t p_min = *std::ranges::min_element(grid);
    for (const auto& [e, power] : kappa.terms) {
      if (e.second >= law->q()) throw ConfigError("kappa: column " + std::to_string(e.second + 1) + " exceeds q");
      if (e.first >= p_min) throw ConfigError("kappa: row " + std::to_string(e.first + 1) + " exceeds the smallest p");
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitUsage;
  }

  const std::uint64_t seed = opts.seed.value_or(0);
  const MomentDecayReport rep =
      moment_decay_experiment(*law, kappa, grid, opts.trials, seed, 0, opts.slope_tol, 4.0);

  const std::string canonical = law_text + "|" + opts.kappa + "|" + opts.p_grid + "|" + std::to_string(opts.trials);
  std::ostringstream csv;
  csv << provenance_comments(seed, fnv1a(canonical)) << "p,estimate,stderr\n";
  for (const auto& pt : rep.points)
    csv << pt.p << ',' << format_double(pt.estimate) << ',' << format_double(pt.std_error) << '\n';
  if (rep.slope)
    csv << "# fit log|m| = " << format_double(*rep.intercept) << " + " << format_double(*rep.slope)
        << " log p, slope stderr " << format_double(*rep.slope_std_error) << '\n';

  out << csv.str() << decay_verdict_line(rep) << '\n';
  if (opts.out) {
    try {
      std::filesystem::create_directories(*opts.out);
      write_file(*opts.out / "moments.csv", csv.str());
    } catch (const std::exception& e) {
      err << "error: " << e.what() << "\n";
      return kExitUsage;
    }
  }
  return rep.verdict == Verdict::kPass ? kExitPass : kExitFail;
}

}  // namespace radwalk::cli
