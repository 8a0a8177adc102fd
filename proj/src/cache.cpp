#include "hambubble/cache.hpp"

#include <atomic>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>
#include <unistd.h>

#include "hambubble/errors.hpp"
#include "hambubble/version.hpp"

namespace hambubble {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string checksum_of(json j) {
  j.erase("checksum");
  return hex(fnv1a(j.dump()));
}

DecayRegime regime_from(const std::string& s) {
  for (auto r : {DecayRegime::q_above, DecayRegime::q_below, DecayRegime::q_log}) {
    if (s == to_string(r)) return r;
  }
  throw DomainError("bubble file: unknown regime '" + s + "'");
}

Crossing crossing_from(const std::string& s) {
  if (s == to_string(Crossing::U_first)) return Crossing::U_first;
  if (s == to_string(Crossing::V_first)) return Crossing::V_first;
  throw DomainError("bubble file: unknown crossing '" + s + "'");
}

}  // namespace

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string cache_key(int N, double p, double q, double tol, double r_max) {
  return hex(fnv1a(json::array({N, p, q, tol, r_max}).dump()));
}

json bubble_to_json(const BubbleSolution& sol) {
  const auto& t = sol.tail;
  const auto& m = sol.meta;
  json trace = json::array();
  for (const auto& r : m.trace) trace.push_back({r.beta, to_string(r.crossing), r.radius, r.by_indicator});
  json j = {
      {"meta",
       {{"N", sol.pair.N},
        {"p", sol.pair.p},
        {"q", sol.pair.q},
        {"tol", m.tol},
        {"r_max", m.r_max},
        {"beta_star", sol.beta_star},
        {"version", kBubbleFormat},
        {"software", kVersion},
        {"rtol", m.rtol},
        {"r_start", m.r_start},
        {"grid_ratio", m.grid_ratio},
        {"steps", m.steps},
        {"bracket", {m.bracket_lo, m.bracket_hi}},
        {"dichotomy_ok", m.dichotomy_ok},
        {"trace", trace}}},
      {"grid", sol.profile.r},
      {"U", sol.profile.U},
      {"V", sol.profile.V},
      {"dU", sol.profile.dU},
      {"dV", sol.profile.dV},
      {"tail",
       {{"a", t.a},
        {"b", t.b},
        {"gamma", t.gamma},
        {"regime", to_string(t.regime)},
        {"fit_variation", t.fit_variation},
        {"kU", t.kU},
        {"kV", t.kV},
        {"eU", t.eU},
        {"eV", t.eV},
        {"cU", t.cU},
        {"cV", t.cV},
        {"fit_window", {t.fit_lo, t.fit_hi}},
        {"fitted_kU", t.fitted_kU},
        {"fitted_kV", t.fitted_kV}}},
      {"residual", {{"ode_residual", sol.ode_residual}}},
  };
  j["checksum"] = checksum_of(j);
  return j;
}

BubbleSolution bubble_from_json(const json& j) {
  try {
    if (!j.contains("checksum") || j.at("checksum").get<std::string>() != checksum_of(j)) {
      throw DomainError("bubble file: checksum mismatch");
    }
    const json& meta = j.at("meta");
    if (meta.at("version").get<int>() != kBubbleFormat) throw DomainError("bubble file: format version mismatch");
    BubbleSolution sol;
    sol.pair = critical_pair(meta.at("N").get<int>(), meta.at("p").get<double>(), meta.at("q").get<double>());
    sol.beta_star = meta.at("beta_star").get<double>();
    auto& m = sol.meta;
    m.tol = meta.at("tol").get<double>();
    m.r_max = meta.at("r_max").get<double>();
    m.rtol = meta.at("rtol").get<double>();
    m.r_start = meta.at("r_start").get<double>();
    m.grid_ratio = meta.at("grid_ratio").get<double>();
    m.steps = meta.at("steps").get<long>();
    m.bracket_lo = meta.at("bracket").at(0).get<double>();
    m.bracket_hi = meta.at("bracket").at(1).get<double>();
    m.dichotomy_ok = meta.at("dichotomy_ok").get<bool>();
    for (const auto& r : meta.at("trace")) {
      m.trace.push_back({r.at(0).get<double>(), crossing_from(r.at(1).get<std::string>()), r.at(2).get<double>(),
                         r.at(3).get<bool>()});
    }
    auto& P = sol.profile;
    P.r = j.at("grid").get<std::vector<double>>();
    P.U = j.at("U").get<std::vector<double>>();
    P.V = j.at("V").get<std::vector<double>>();
    P.dU = j.at("dU").get<std::vector<double>>();
    P.dV = j.at("dV").get<std::vector<double>>();
    const std::size_t n = P.r.size();
    if (n < 2 || P.U.size() != n || P.V.size() != n || P.dU.size() != n || P.dV.size() != n) {
      throw DomainError("bubble file: profile arrays are inconsistent");
    }
    const json& t = j.at("tail");
    auto& T = sol.tail;
    T.a = t.at("a").get<double>();
    T.b = t.at("b").get<double>();
    T.gamma = t.at("gamma").get<double>();
    T.regime = regime_from(t.at("regime").get<std::string>());
    T.fit_variation = t.at("fit_variation").get<double>();
    T.kU = t.at("kU").get<double>();
    T.kV = t.at("kV").get<double>();
    T.eU = t.at("eU").get<double>();
    T.eV = t.at("eV").get<double>();
    T.cU = t.at("cU").get<double>();
    T.cV = t.at("cV").get<double>();
    T.fit_lo = t.at("fit_window").at(0).get<double>();
    T.fit_hi = t.at("fit_window").at(1).get<double>();
    T.fitted_kU = t.at("fitted_kU").get<double>();
    T.fitted_kV = t.at("fitted_kV").get<double>();
    sol.ode_residual = j.at("residual").at("ode_residual").get<double>();
    return sol;
  } catch (const json::exception& e) {
    throw DomainError(std::string("bubble file: ") + e.what());
  }
}

void write_bubble_file(const fs::path& path, const BubbleSolution& sol) {
  static std::atomic<unsigned> counter{0};
  const std::string text = bubble_to_json(sol).dump() + "\n";
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid()) + "." +
         std::to_string(std::hash<std::thread::id>()(std::this_thread::get_id()) % 100000) + "." +
         std::to_string(counter++);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << text;
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw Error("cannot write " + tmp.string());
    }
  }
  fs::rename(tmp, path);
}

BubbleSolution read_bubble_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DomainError("cannot open bubble file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  json j = json::parse(ss.str(), nullptr, false);
  if (j.is_discarded()) throw DomainError("bubble file " + path.string() + " is not valid JSON");
  return bubble_from_json(j);
}

CachedBubble cached_ground_state(const fs::path& dir, const ExponentPair& pair, double tol, double r_max) {
  CachedBubble out;
  out.path = dir / ("bubble-" + cache_key(pair.N, pair.p, pair.q, tol, r_max) + ".json");
  std::error_code ec;
  if (fs::exists(out.path, ec)) {
    try {
      BubbleSolution sol = read_bubble_file(out.path);
      if (sol.pair.N == pair.N && sol.pair.p == pair.p && sol.pair.q == pair.q && sol.meta.tol == tol &&
          sol.meta.r_max == r_max) {
        out.sol = std::move(sol);
        out.hit = true;
        return out;
      }
      out.warnings.push_back("cache entry " + out.path.filename().string() + " belongs to other inputs; recomputing");
    } catch (const Error& e) {
      out.warnings.push_back("ignoring cache entry " + out.path.filename().string() + " (" + e.what() +
                             "); recomputing");
    }
  }
  out.sol = solve_ground_state(pair, tol, r_max);
  write_bubble_file(out.path, out.sol);
  return out;
}

}  // namespace hambubble
