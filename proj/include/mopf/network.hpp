#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

#include "mopf/types.hpp"

namespace mopf::net {

struct Bus {
  int id = 0;
  int area = 1;
  double load_mw = 0.0;
  bool is_ref = false;
  bool operator==(const Bus&) const = default;
};

struct Branch {
  int from = 0;
  int to = 0;
  double b_pu = 0.0;      // susceptance magnitude, p.u.
  double limit_mw = 0.0;  // thermal limit |flow|
  bool tie = false;
  bool operator==(const Branch&) const = default;
};

struct Generator {
  int bus = 0;
  double pmin_mw = 0.0;
  double pmax_mw = 0.0;
  double q_cost = 0.0;  // $/MW^2, cost = 1/2 q g^2 + c g
  double c_cost = 0.0;  // $/MW
  bool operator==(const Generator&) const = default;
};

struct NetworkCase {
  std::string name;
  double base_mva = 100.0;
  std::vector<Bus> buses;
  std::vector<Branch> branches;
  std::vector<Generator> generators;

  int bus_index(int id) const;
  std::vector<int> area_ids() const;  // distinct labels, ascending
  bool is_boundary_bus(int id) const;
  /// Empty when every case invariant holds; each entry names the violation.
  std::vector<std::string> validate() const;
  bool operator==(const NetworkCase&) const = default;
};

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class CaseFormat { Json, MatpowerM };

/// Parses and validates; throws ParseError with every violation listed.
NetworkCase parse_case(const std::string& text, CaseFormat format);
std::string serialize_case(const NetworkCase& c);

/// Subset MATPOWER .m reader: mpc.baseMVA/bus/branch/gen/gencost.
NetworkCase parse_matpower(const std::string& text);

struct TieSpec {
  int from_bus_a = 0;  // bus id in case A
  int to_bus_b = 0;    // bus id in case B, before renumbering
  double b_pu = 5.0;
  double limit_mw = 10.0;
};

/// Merge two validated single-area cases into a two-area case. B's bus ids
/// are shifted past A's, the areas are relabeled 1 and 2, all internal
/// branch limits are overridden and the tie branches added as specified.
/// The reference lands on the lowest-index non-boundary bus of area 1.
NetworkCase stitch_two_area_case(const NetworkCase& a, const NetworkCase& b,
                                 const std::vector<TieSpec>& ties,
                                 double internal_limit_mw = 100.0);

/// Deterministic stream of standard normals: mt19937_64 bits mapped through
/// an explicit Box-Muller transform, so draws are identical on every
/// platform for a given seed.
class NormalStream {
 public:
  explicit NormalStream(std::uint64_t seed) : rng_(seed) {}
  double next();
  double uniform();  // [0, 1)

 private:
  std::mt19937_64 rng_;
};

/// Scales each generator's linear cost by (0.99 + spread * xi), xi ~ N(0,1).
NetworkCase perturb_costs(const NetworkCase& c, std::uint64_t seed,
                          double spread = 0.02);

// Built-in test systems (verbatim MATPOWER-subset text).
const std::string& builtin_case14_m();
const std::string& builtin_case30_m();

/// 2-area system: IEEE 14 + IEEE 30 joined by two parallel tie-lines,
/// 10 MW tie / 100 MW internal limits, costs perturbed from `seed`.
NetworkCase two_area_44(std::uint64_t seed, bool quadratic_costs = true);

/// 4-area ring of 118-bus composites, 50 MW tie / 500 MW internal limits.
NetworkCase four_area_472(std::uint64_t seed, bool quadratic_costs = true);

/// Dispatch by generator spec name: two-area-44 | four-area-472.
NetworkCase generate_case(const std::string& spec, std::uint64_t seed);

}  // namespace mopf::net
