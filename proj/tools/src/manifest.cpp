#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "radwalk/cli/cli.hpp"
#include "radwalk/errors.hpp"

namespace radwalk::cli {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) { throw ConfigError(path + ": " + what); }

json parse_json(std::string_view text, const std::string& what) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ConfigError(what + ": invalid JSON (" + e.what() + ")");
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string() + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void expect_object(const json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
}

void check_keys(const json& j, std::initializer_list<std::string_view> allowed, const std::string& path) {
  for (const auto& [key, value] : j.items()) {
    if (std::ranges::find(allowed, key) == allowed.end()) fail(path + "." + key, "unknown field");
  }
}

// A number, or {"sqrt": x} for irrational radii.
double number(const json& j, const std::string& path) {
  if (j.is_number()) return j.get<double>();
  if (j.is_object() && j.size() == 1 && j.contains("sqrt") && j["sqrt"].is_number()) {
    const double x = j["sqrt"].get<double>();
    if (x < 0.0) fail(path, "sqrt of a negative number");
    return std::sqrt(x);
  }
  fail(path, "expected a number or {\"sqrt\": x}");
}

double get_number(const json& j, const char* key, const std::string& path) {
  if (!j.contains(key)) fail(path + "." + key, "missing");
  return number(j[key], path + "." + key);
}

std::uint64_t unsigned_value(const json& j, const std::string& path) {
  if (!j.is_number_integer() || (j.is_number_integer() && !j.is_number_unsigned() && j.get<std::int64_t>() < 0))
    fail(path, "expected a non-negative integer");
  return j.get<std::uint64_t>();
}

std::uint64_t get_unsigned(const json& j, const char* key, const std::string& path, std::uint64_t fallback) {
  if (!j.contains(key)) return fallback;
  return unsigned_value(j[key], path + "." + key);
}

bool get_bool(const json& j, const char* key, const std::string& path, bool fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_boolean()) fail(path + "." + key, "expected true or false");
  return j[key].get<bool>();
}

RadialLaw law_from_json(const json& j, const std::string& path) {
  expect_object(j, path);
  try {
    if (j.contains("family")) {
      if (!j["family"].is_string()) fail(path + ".family", "expected a string");
      const std::string family = j["family"].get<std::string>();
      if (family == "point_mass") {
        check_keys(j, {"family", "r"}, path);
        return RadialLaw::point_mass(get_number(j, "r", path));
      }
      if (family == "two_point") {
        if (j.contains("r_a_sq") || j.contains("r_b_sq")) {
          check_keys(j, {"family", "r_a_sq", "p_a", "r_b_sq"}, path);
          return RadialLaw::two_point_squared(get_number(j, "r_a_sq", path), get_number(j, "p_a", path),
                                              get_number(j, "r_b_sq", path));
        }
        check_keys(j, {"family", "r_a", "p_a", "r_b"}, path);
        return RadialLaw::two_point(get_number(j, "r_a", path), get_number(j, "p_a", path),
                                    get_number(j, "r_b", path));
      }
      if (family == "uniform_interval") {
        check_keys(j, {"family", "a", "b"}, path);
        return RadialLaw::uniform_interval(get_number(j, "a", path), get_number(j, "b", path));
      }
      fail(path + ".family", "unknown family '" + family + "'");
    }

    check_keys(j, {"q", "atoms"}, path);
    const std::size_t q = get_unsigned(j, "q", path, 0);
    if (q == 0) fail(path + ".q", "missing or zero");
    if (!j.contains("atoms") || !j["atoms"].is_array() || j["atoms"].empty())
      fail(path + ".atoms", "expected a non-empty list");
    std::vector<RadialAtom> atoms;
    for (std::size_t i = 0; i < j["atoms"].size(); ++i) {
      const json& a = j["atoms"][i];
      const std::string ap = path + ".atoms[" + std::to_string(i) + "]";
      expect_object(a, ap);
      check_keys(a, {"weight", "radius"}, ap);
      const double w = get_number(a, "weight", ap);
      if (!a.contains("radius") || !a["radius"].is_array()) fail(ap + ".radius", "expected a row-major list");
      const json& r = a["radius"];
      if (r.size() != q * q)
        fail(ap + ".radius", "expected " + std::to_string(q * q) + " entries, got " + std::to_string(r.size()));
      Mat m(q, q);
      for (std::size_t k = 0; k < q * q; ++k) m.data()[k] = number(r[k], ap + ".radius[" + std::to_string(k) + "]");
      for (std::size_t x = 0; x < q; ++x)
        for (std::size_t y = x + 1; y < q; ++y)
          if (std::abs(m(x, y) - m(y, x)) > 1e-12 * std::max(1.0, m.frobenius_norm()))
            fail(ap + ".radius", "atom " + std::to_string(i) + " radius is not symmetric");
      atoms.push_back({w, SymMat(m)});
    }
    return RadialLaw::discrete(q, std::move(atoms));
  } catch (const radwalk::Error& e) {
    fail(path, e.what());
  }
}

std::string canonical(const json& j) { return j.dump(); }

CltEntry clt_entry(const json& j, const std::string& id, const std::string& path) {
  check_keys(j, {"id", "kind", "law", "regime", "n", "p", "c", "gamma", "trials", "fast_path",
                 "validate_decomposition", "tolerances"},
             path);
  if (!j.contains("law")) fail(path + ".law", "missing");
  WalkConfig cfg(law_from_json(j["law"], path + ".law"));

  if (j.contains("regime")) {
    if (!j["regime"].is_string()) fail(path + ".regime", "expected CLT_I, CLT_II or MIXED");
    const auto r = parse_regime(j["regime"].get<std::string>());
    if (!r) fail(path + ".regime", "expected CLT_I, CLT_II or MIXED");
    cfg.regime = *r;
  }
  cfg.n = get_unsigned(j, "n", path, 0);
  if (cfg.n == 0) fail(path + ".n", "missing or zero");
  cfg.c = j.contains("c") ? get_number(j, "c", path) : 0.0;
  const double gamma = j.contains("gamma") ? get_number(j, "gamma", path) : 0.5;
  if (j.contains("p")) {
    cfg.p = get_unsigned(j, "p", path, 0);
  } else {
    try {
      cfg.p = schedule_dimension(cfg.regime, cfg.n, cfg.c, gamma);
    } catch (const radwalk::Error& e) {
      fail(path + ".p", e.what());
    }
  }
  cfg.trials = get_unsigned(j, "trials", path, cfg.trials);
  cfg.fast_path = get_bool(j, "fast_path", path, false);
  cfg.validate_decomposition = get_bool(j, "validate_decomposition", path, false);
  if (j.contains("tolerances")) {
    const json& t = j["tolerances"];
    const std::string tp = path + ".tolerances";
    expect_object(t, tp);
    check_keys(t, {"rel_finite", "rel_limit", "z", "ks_alpha"}, tp);
    if (t.contains("rel_finite")) cfg.tol.rel_finite = get_number(t, "rel_finite", tp);
    if (t.contains("rel_limit")) cfg.tol.rel_limit = get_number(t, "rel_limit", tp);
    if (t.contains("z")) cfg.tol.z = get_number(t, "z", tp);
    if (t.contains("ks_alpha")) cfg.tol.ks_alpha = get_number(t, "ks_alpha", tp);
  }
  cfg.stream = fnv1a(id);
  try {
    cfg.validate();
  } catch (const radwalk::Error& e) {
    fail(path, e.what());
  }
  return {id, std::move(cfg), canonical(j)};
}

void check_kappa_fits(const MultiIndex& kappa, std::size_t q, const std::vector<std::size_t>& grid,
                      const std::string& path) {
  const std::size_t p_min = *std::ranges::min_element(grid);
  for (const auto& [e, power] : kappa.terms) {
    if (e.second >= q) fail(path, "column " + std::to_string(e.second + 1) + " exceeds q = " + std::to_string(q));
    if (e.first >= p_min)
      fail(path, "row " + std::to_string(e.first + 1) + " exceeds the smallest p = " + std::to_string(p_min));
  }
}

MomentsEntry moments_entry(const json& j, const std::string& id, const std::string& path) {
  check_keys(j, {"id", "kind", "law", "kappa", "p_grid", "trials", "slope_tol", "z_tol"}, path);
  if (!j.contains("law")) fail(path + ".law", "missing");
  RadialLaw law = law_from_json(j["law"], path + ".law");
  if (!j.contains("kappa") || !j["kappa"].is_string()) fail(path + ".kappa", "expected a string like \"1,1:2\"");
  MultiIndex kappa;
  std::vector<std::size_t> grid;
  try {
    kappa = parse_kappa(j["kappa"].get<std::string>());
  } catch (const ConfigError& e) {
    fail(path + ".kappa", e.what());
  }
  if (!j.contains("p_grid") || !j["p_grid"].is_array()) fail(path + ".p_grid", "expected a list of dimensions");
  for (std::size_t i = 0; i < j["p_grid"].size(); ++i) {
    const std::uint64_t p = unsigned_value(j["p_grid"][i], path + ".p_grid[" + std::to_string(i) + "]");
    if (p == 0) fail(path + ".p_grid[" + std::to_string(i) + "]", "dimension must be positive");
    grid.push_back(p);
  }
  if (grid.size() < 3) fail(path + ".p_grid", "needs at least 3 dimensions to fit a slope");
  check_kappa_fits(kappa, law.q(), grid, path + ".kappa");
  MomentsEntry e{id, std::move(law), std::move(kappa), std::move(grid)};
  e.trials = get_unsigned(j, "trials", path, e.trials);
  if (e.trials < 1000) fail(path + ".trials", "needs at least 1000 trials");
  if (j.contains("slope_tol")) e.slope_tol = get_number(j, "slope_tol", path);
  if (j.contains("z_tol")) e.z_tol = get_number(j, "z_tol", path);
  e.canonical = canonical(j);
  return e;
}

bool valid_id(const std::string& id) {
  return !id.empty() && std::ranges::all_of(id, [](char ch) {
    return (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') || (ch >= '0' && ch <= '9') || ch == '_' ||
           ch == '-' || ch == '.';
  }) && id != "." && id != "..";
}

}  // namespace

RadialLaw parse_law(std::string_view json_text) { return law_from_json(parse_json(json_text, "law"), "law"); }

RadialLaw load_law(const std::filesystem::path& path) { return parse_law(read_file(path)); }

RunManifest parse_manifest(std::string_view json_text) {
  json root = parse_json(json_text, "manifest");
  expect_object(root, "manifest");
  check_keys(root, {"suite", "seed", "workers", "out", "entries"}, "manifest");

  RunManifest m;
  if (root.contains("suite")) {
    if (!root["suite"].is_string() || !valid_id(root["suite"].get<std::string>()))
      fail("suite", "expected a name made of letters, digits, '_', '-' or '.'");
    m.suite = root["suite"].get<std::string>();
  }
  m.seed = get_unsigned(root, "seed", "manifest", 0);
  if (root.contains("workers")) m.workers = static_cast<unsigned>(get_unsigned(root, "workers", "manifest", 0));
  if (root.contains("out")) {
    if (!root["out"].is_string()) fail("out", "expected a directory path");
    m.out = root["out"].get<std::string>();
  }

  std::set<std::string> ids;
  if (root.contains("entries")) {
    if (!root["entries"].is_array()) fail("entries", "expected a list");
    for (std::size_t i = 0; i < root["entries"].size(); ++i) {
      const json& e = root["entries"][i];
      const std::string path = "entries[" + std::to_string(i) + "]";
      expect_object(e, path);
      if (!e.contains("id") || !e["id"].is_string()) fail(path + ".id", "missing");
      const std::string id = e["id"].get<std::string>();
      if (!valid_id(id)) fail(path + ".id", "use letters, digits, '_', '-' or '.'");
      if (!ids.insert(id).second) fail(path + ".id", "duplicate id '" + id + "'");
      const std::string kind = e.contains("kind") && e["kind"].is_string() ? e["kind"].get<std::string>() : "clt";
      if (kind == "clt") {
        m.entries.emplace_back(clt_entry(e, id, path));
      } else if (kind == "moments") {
        m.entries.emplace_back(moments_entry(e, id, path));
      } else if (kind == "selftest") {
        check_keys(e, {"id", "kind"}, path);
        m.entries.emplace_back(SelftestEntry{id, canonical(e)});
      } else {
        fail(path + ".kind", "expected clt, moments or selftest");
      }
    }
  }

  root.erase("seed");
  m.config_hash = fnv1a(root.dump());
  return m;
}

RunManifest load_manifest(const std::filesystem::path& path) { return parse_manifest(read_file(path)); }

namespace {

std::size_t parse_positive(std::string_view s, std::string_view what) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || v == 0)
    throw ConfigError(std::string(what) + ": '" + std::string(s) + "' is not a positive integer");
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  return s;
}

}  // namespace

MultiIndex parse_kappa(std::string_view spec) {
  MultiIndex kappa;
  if (trim(spec).empty()) throw ConfigError("kappa: empty");
  std::set<EntryIndex> seen;
  for (std::string_view term : split(spec, ';')) {
    term = trim(term);
    const auto colon = split(term, ':');
    if (colon.size() != 2) throw ConfigError("kappa: term '" + std::string(term) + "' is not row,col:exp");
    const auto rc = split(colon[0], ',');
    if (rc.size() != 2) throw ConfigError("kappa: term '" + std::string(term) + "' is not row,col:exp");
    const std::size_t row = parse_positive(trim(rc[0]), "kappa row");
    const std::size_t col = parse_positive(trim(rc[1]), "kappa column");
    const std::size_t power = parse_positive(trim(colon[1]), "kappa exponent");
    const EntryIndex e{row - 1, col - 1};
    if (!seen.insert(e).second) throw ConfigError("kappa: entry (" + std::string(trim(colon[0])) + ") repeated");
    kappa.terms.emplace_back(e, static_cast<unsigned>(power));
  }
  if (kappa.degree() > 8) throw ConfigError("kappa: total degree " + std::to_string(kappa.degree()) + " exceeds 8");
  return kappa;
}

std::vector<std::size_t> parse_grid(std::string_view spec) {
  std::vector<std::size_t> grid;
  if (trim(spec).empty()) throw ConfigError("p-grid: empty");
  for (std::string_view s : split(spec, ',')) grid.push_back(parse_positive(trim(s), "p-grid"));
  return grid;
}

unsigned resolve_workers(std::optional<unsigned> flag, std::optional<unsigned> manifest) {
  if (flag) return *flag;
  if (const char* env = std::getenv(kWorkersEnv); env != nullptr && *env != '\0') {
    unsigned v = 0;
    const std::string_view s(env);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
      throw ConfigError(std::string(kWorkersEnv) + ": '" + std::string(s) + "' is not a worker count");
    return v;
  }
  return manifest.value_or(0);
}

std::uint64_t fnv1a(std::string_view bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string hex64(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace radwalk::cli
