#include "omega_cube/common.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <thread>

namespace omega_cube {

std::string DirectionSet::str() const {
  std::string out;
  for (Direction d : to_vector()) {
    if (!out.empty()) out += ',';
    out += std::to_string(d);
  }
  return out;
}

DirectionSet DirectionSet::parse(std::string_view text) {
  DirectionSet s;
  int previous = 0;
  while (!text.empty()) {
    auto comma = text.find(',');
    auto part = text.substr(0, comma);
    int d = 0;
    auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), d);
    if (ec != std::errc() || ptr != part.data() + part.size() || d < 1 || d > kMaxDirections)
      throw LoadError("bad direction '" + std::string(part) + "'");
    if (d <= previous) throw LoadError("directions must be strictly increasing: '" + std::string(text) + "'");
    previous = d;
    s = s.with(d);
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
    if (text.empty()) throw LoadError("trailing comma in direction list");
  }
  return s;
}

bool operator<(DirectionSet a, DirectionSet b) {
  if (a.size() != b.size()) return a.size() < b.size();
  auto va = a.to_vector();
  auto vb = b.to_vector();
  return va < vb;
}

void TruncationConfig::validate() const {
  if (max_dim < 0) throw UsageError("max_dim must be >= 0");
  if (dir_universe < max_dim) throw UsageError("dir_universe must be >= max_dim");
  if (dir_universe > kMaxDirections) throw UsageError("dir_universe must be <= 32");
  if (term_depth < 0) throw UsageError("term_depth must be >= 0");
  if (saturation_budget < 1) throw UsageError("saturation_budget must be >= 1");
}

json TruncationConfig::to_json() const {
  return json{{"max_dim", max_dim},
              {"dir_universe", dir_universe},
              {"term_depth", term_depth},
              {"saturation_budget", saturation_budget}};
}

TruncationConfig TruncationConfig::from_json(const json& j, const TruncationConfig& defaults) {
  TruncationConfig cfg = defaults;
  if (!j.is_object()) throw LoadError("config must be an object");
  try {
    if (j.contains("max_dim")) cfg.max_dim = j.at("max_dim").get<int>();
    if (j.contains("dir_universe")) cfg.dir_universe = j.at("dir_universe").get<int>();
    if (j.contains("term_depth")) cfg.term_depth = j.at("term_depth").get<int>();
    if (j.contains("saturation_budget")) cfg.saturation_budget = j.at("saturation_budget").get<long>();
  } catch (const json::exception& e) {
    throw LoadError(std::string("bad config: ") + e.what());
  }
  try {
    cfg.validate();
  } catch (const UsageError& e) {
    throw LoadError(e.what());
  }
  return cfg;
}

TruncationConfig TruncationConfig::from_json(const json& j) { return from_json(j, TruncationConfig{}); }

long Report::count(std::string_view tag) const {
  return std::count_if(violations.begin(), violations.end(),
                       [&](const Violation& v) { return v.tag == tag; });
}

json Report::to_json(std::size_t max_listed) const {
  json out;
  out["name"] = name;
  out["ok"] = ok();
  out["checked"] = checked;
  out["violation_count"] = violations.size();
  json list = json::array();
  for (std::size_t i = 0; i < violations.size() && i < max_listed; ++i) {
    const auto& v = violations[i];
    list.push_back({{"tag", v.tag}, {"message", v.message}, {"witnesses", v.witnesses}});
  }
  out["violations"] = std::move(list);
  return out;
}

int worker_count() {
  int n = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (const char* env = std::getenv("OMEGA_CUBE_THREADS")) {
    int cap = std::atoi(env);
    if (cap >= 1) n = std::min(n, cap);
  }
  return n;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(worker_count()), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += workers) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace omega_cube
