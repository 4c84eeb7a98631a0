#pragma once

// Batch front-end: run manifests, laws and multi-index specs, the three
// subcommands, and the output formatting they share.
//
// Manifests and laws are JSON documents; see README.md for the schema.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "radwalk/clt_experiments.hpp"
#include "radwalk/radial_measures.hpp"

namespace radwalk::cli {

inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitUsage = 2;

/// Environment variable consulted when --workers is not given.
inline constexpr const char* kWorkersEnv = "RADWALK_WORKERS";

std::string_view tool_version() noexcept;

/// Bad manifest, law, kappa or grid. The message starts with the offending
/// field path, e.g. "entries[0].law.atoms[1].radius: ...".
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// `canonical` is the entry as parsed, re-serialized with sorted keys; it is
// echoed into reports and feeds the per-entry config hash.
struct CltEntry {
  std::string id;
  WalkConfig cfg;
  std::string canonical;
};

struct MomentsEntry {
  std::string id;
  RadialLaw law;
  MultiIndex kappa;
  std::vector<std::size_t> p_grid;
  std::size_t trials = 10000;
  double slope_tol = 0.5;
  double z_tol = 4.0;
  std::string canonical;
};

struct SelftestEntry {
  std::string id;
  std::string canonical;
};

using ManifestEntry = std::variant<CltEntry, MomentsEntry, SelftestEntry>;

struct RunManifest {
  std::string suite = "radwalk";
  std::uint64_t seed = 0;
  std::optional<unsigned> workers;
  std::optional<std::string> out;
  std::vector<ManifestEntry> entries;
  /// FNV-1a of the canonical manifest text (sorted keys, seed excluded).
  std::uint64_t config_hash = 0;
};

/// Parses a law document: {"q": .., "atoms": [{"weight": .., "radius": [..]}]}
/// or {"family": "point_mass" | "two_point" | "uniform_interval", ...}.
/// Numbers may be written {"sqrt": x}.
RadialLaw parse_law(std::string_view json_text);
RadialLaw load_law(const std::filesystem::path& path);

RunManifest parse_manifest(std::string_view json_text);
RunManifest load_manifest(const std::filesystem::path& path);

/// "row,col:exp;row,col:exp" with 1-based rows and columns.
MultiIndex parse_kappa(std::string_view spec);
/// Comma separated positive integers.
std::vector<std::size_t> parse_grid(std::string_view spec);

/// --workers, then RADWALK_WORKERS, then the manifest, then 0 (hardware).
unsigned resolve_workers(std::optional<unsigned> flag, std::optional<unsigned> manifest);

std::uint64_t fnv1a(std::string_view bytes) noexcept;
/// 17 significant digits, round-trip exact.
std::string format_double(double v);
std::string hex64(std::uint64_t v);

struct RunOptions {
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
  std::optional<std::filesystem::path> out;
  bool validate_decomposition = false;
};

/// Runs every manifest entry, writes <out>/<id>.json per entry and
/// <out>/<suite>.csv for the CLT entries. Returns an exit code.
int cmd_clt(const std::filesystem::path& manifest, const RunOptions& opts, std::ostream& out, std::ostream& err);

struct SuiteResult {
  std::string name;
  bool pass = false;
  std::size_t cases = 0;
  double worst = 0.0;  // largest discrepancy seen
  double tolerance = 0.0;
};

inline constexpr std::uint64_t kSelftestSeed = 20240607;

/// Exact-identity suites: Kronecker entry formula, multinomial expansion,
/// reordering permutations, Hadamard conjugation, univariate Wick moments,
/// sum_moment additivity.
std::vector<SuiteResult> run_selftest(std::uint64_t seed);

int cmd_selftest(std::optional<std::uint64_t> seed, bool inject_kron_fault, std::ostream& out);

struct MomentsOptions {
  std::filesystem::path law;
  std::string kappa;
  std::string p_grid;
  std::size_t trials = 10000;
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> out;
  double slope_tol = 0.5;
};

int cmd_moments(const MomentsOptions& opts, std::ostream& out, std::ostream& err);

/// Parses argv and dispatches. Exit code 2 on usage errors.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace radwalk::cli
