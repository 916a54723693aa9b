#include "mopf/network.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "json.hpp"

namespace mopf::net {

using nlohmann::ordered_json;

int NetworkCase::bus_index(int id) const {
  for (size_t i = 0; i < buses.size(); ++i)
    if (buses[i].id == id) return static_cast<int>(i);
  return -1;
}

std::vector<int> NetworkCase::area_ids() const {
  std::set<int> s;
  for (const auto& b : buses) s.insert(b.area);
  return {s.begin(), s.end()};
}

bool NetworkCase::is_boundary_bus(int id) const {
  for (const auto& br : branches)
    if (br.tie && (br.from == id || br.to == id)) return true;
  return false;
}

namespace {

struct DisjointSet {
  std::vector<int> parent;
  explicit DisjointSet(int n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int a) { return parent[a] == a ? a : parent[a] = find(parent[a]); }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

}  // namespace

std::vector<std::string> NetworkCase::validate() const {
  std::vector<std::string> issues;
  std::ostringstream os;
  auto flag = [&](auto&&... parts) {
    std::ostringstream o;
    (o << ... << parts);
    issues.push_back(o.str());
  };

  std::map<int, int> area_of;
  std::set<int> seen;
  for (const auto& b : buses) {
    if (!seen.insert(b.id).second) flag("duplicate bus id ", b.id);
    area_of[b.id] = b.area;
  }
  int refs = 0;
  for (const auto& b : buses) refs += b.is_ref ? 1 : 0;
  if (refs != 1) flag("expected exactly one reference bus, found ", refs);

  for (const auto& br : branches) {
    if (!area_of.count(br.from) || !area_of.count(br.to)) {
      flag("branch ", br.from, "-", br.to, " references an unknown bus");
      continue;
    }
    const bool cross = area_of[br.from] != area_of[br.to];
    if (br.tie && !cross)
      flag("branch ", br.from, "-", br.to,
           " is labeled a tie-line but both ends are in area ",
           area_of[br.from]);
    if (!br.tie && cross)
      flag("branch ", br.from, "-", br.to, " crosses areas ", area_of[br.from],
           " and ", area_of[br.to], " but is not labeled a tie-line");
    if (br.b_pu <= 0)
      flag("branch ", br.from, "-", br.to, " has non-positive susceptance");
  }
  for (const auto& g : generators) {
    if (!area_of.count(g.bus)) {
      flag("generator references unknown bus ", g.bus);
      continue;
    }
    if (is_boundary_bus(g.bus))
      flag("generator on boundary bus ", g.bus,
           " (tie-line endpoints must be generator-free)");
    if (g.pmin_mw > g.pmax_mw)
      flag("generator at bus ", g.bus, " has pmin > pmax");
  }
  // per-area internal connectivity
  for (int area : area_ids()) {
    std::vector<int> members;
    std::map<int, int> local;
    for (const auto& b : buses)
      if (b.area == area) {
        local[b.id] = static_cast<int>(members.size());
        members.push_back(b.id);
      }
    if (members.size() <= 1) continue;
    DisjointSet ds(static_cast<int>(members.size()));
    for (const auto& br : branches)
      if (!br.tie && local.count(br.from) && local.count(br.to))
        ds.unite(local[br.from], local[br.to]);
    const int root = ds.find(0);
    for (size_t i = 1; i < members.size(); ++i)
      if (ds.find(static_cast<int>(i)) != root) {
        flag("area ", area, " internal subgraph is disconnected (bus ",
             members[i], " unreachable)");
        break;
      }
  }
  return issues;
}

namespace {

NetworkCase case_from_json(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("json parse error: ") + e.what());
  }
  NetworkCase c;
  try {
    c.name = j.value("name", "");
    c.base_mva = j.value("base_mva", 100.0);
    for (const auto& jb : j.at("buses")) {
      Bus b;
      b.id = jb.at("id").get<int>();
      b.area = jb.at("area").get<int>();
      b.load_mw = jb.value("load_mw", 0.0);
      b.is_ref = jb.value("ref", false);
      c.buses.push_back(b);
    }
    for (const auto& jb : j.at("branches")) {
      Branch br;
      br.from = jb.at("from").get<int>();
      br.to = jb.at("to").get<int>();
      br.b_pu = jb.at("b_pu").get<double>();
      br.limit_mw = jb.at("limit_mw").get<double>();
      br.tie = jb.value("tie", false);
      c.branches.push_back(br);
    }
    for (const auto& jg : j.at("generators")) {
      Generator g;
      g.bus = jg.at("bus").get<int>();
      g.pmin_mw = jg.at("pmin_mw").get<double>();
      g.pmax_mw = jg.at("pmax_mw").get<double>();
      g.q_cost = jg.at("q_cost").get<double>();
      g.c_cost = jg.at("c_cost").get<double>();
      c.generators.push_back(g);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("json schema error: ") + e.what());
  }
  return c;
}

}  // namespace

NetworkCase parse_case(const std::string& text, CaseFormat format) {
  NetworkCase c = format == CaseFormat::Json ? case_from_json(text)
                                             : parse_matpower(text);
  auto issues = c.validate();
  if (!issues.empty()) {
    std::ostringstream os;
    os << "invalid case";
    if (!c.name.empty()) os << " '" << c.name << "'";
    os << ":";
    for (const auto& issue : issues) os << "\n  - " << issue;
    throw ParseError(os.str());
  }
  return c;
}

std::string serialize_case(const NetworkCase& c) {
  ordered_json j;
  if (!c.name.empty()) j["name"] = c.name;
  j["base_mva"] = c.base_mva;
  j["buses"] = ordered_json::array();
  for (const auto& b : c.buses) {
    ordered_json jb{{"id", b.id}, {"area", b.area}, {"load_mw", b.load_mw}};
    if (b.is_ref) jb["ref"] = true;
    j["buses"].push_back(jb);
  }
  j["branches"] = ordered_json::array();
  for (const auto& br : c.branches) {
    ordered_json jb{{"from", br.from},
                    {"to", br.to},
                    {"b_pu", br.b_pu},
                    {"limit_mw", br.limit_mw}};
    if (br.tie) jb["tie"] = true;
    j["branches"].push_back(jb);
  }
  j["generators"] = ordered_json::array();
  for (const auto& g : c.generators) {
    j["generators"].push_back(ordered_json{{"bus", g.bus},
                                           {"pmin_mw", g.pmin_mw},
                                           {"pmax_mw", g.pmax_mw},
                                           {"q_cost", g.q_cost},
                                           {"c_cost", g.c_cost}});
  }
  return j.dump(2) + "\n";
}

NetworkCase stitch_two_area_case(const NetworkCase& a, const NetworkCase& b,
                                 const std::vector<TieSpec>& ties,
                                 double internal_limit_mw) {
  for (const auto* c : {&a, &b}) {
    auto issues = c->validate();
    if (!issues.empty())
      throw ParseError("stitch input invalid: " + issues.front());
    if (c->area_ids().size() != 1)
      throw ParseError("stitch inputs must be single-area cases");
  }
  int offset = 0;
  for (const auto& bus : a.buses) offset = std::max(offset, bus.id);

  NetworkCase out;
  out.name = a.name + "+" + b.name;
  out.base_mva = a.base_mva;
  for (auto bus : a.buses) {
    bus.area = 1;
    bus.is_ref = false;
    out.buses.push_back(bus);
  }
  for (auto bus : b.buses) {
    bus.id += offset;
    bus.area = 2;
    bus.is_ref = false;
    out.buses.push_back(bus);
  }
  for (auto br : a.branches) {
    br.limit_mw = internal_limit_mw;
    out.branches.push_back(br);
  }
  for (auto br : b.branches) {
    br.from += offset;
    br.to += offset;
    br.limit_mw = internal_limit_mw;
    out.branches.push_back(br);
  }
  for (const auto& t : ties) {
    if (a.bus_index(t.from_bus_a) < 0)
      throw ParseError("tie spec references unknown bus " +
                       std::to_string(t.from_bus_a) + " in first case");
    if (b.bus_index(t.to_bus_b) < 0)
      throw ParseError("tie spec references unknown bus " +
                       std::to_string(t.to_bus_b) + " in second case");
    Branch br;
    br.from = t.from_bus_a;
    br.to = t.to_bus_b + offset;
    br.b_pu = t.b_pu;
    br.limit_mw = t.limit_mw;
    br.tie = true;
    out.branches.push_back(br);
  }
  out.generators = a.generators;
  for (auto g : b.generators) {
    g.bus += offset;
    out.generators.push_back(g);
  }
  // reference: lowest-index non-boundary bus of area 1
  for (auto& bus : out.buses)
    if (bus.area == 1 && !out.is_boundary_bus(bus.id)) {
      bus.is_ref = true;
      break;
    }
  return out;
}

double NormalStream::uniform() {
  return static_cast<double>(rng_() >> 11) * 0x1.0p-53;
}

double NormalStream::next() {
  const double u1 = std::max(uniform(), 1e-300);
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

NetworkCase perturb_costs(const NetworkCase& c, std::uint64_t seed,
                          double spread) {
  NetworkCase out = c;
  NormalStream xi(seed);
  for (auto& g : out.generators) g.c_cost *= 0.99 + spread * xi.next();
  return out;
}

NetworkCase generate_case(const std::string& spec, std::uint64_t seed) {
  if (spec == "two-area-44") return two_area_44(seed);
  if (spec == "two-area-44-linear") return two_area_44(seed, false);
  if (spec == "four-area-472") return four_area_472(seed);
  if (spec == "four-area-472-linear") return four_area_472(seed, false);
  throw ParseError("unknown case spec '" + spec +
                   "' (expected two-area-44[-linear] or four-area-472[-linear])");
}

}  // namespace mopf::net
