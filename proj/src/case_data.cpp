// Built-in test systems and the seeded fixture generators.
#include <set>

#include "mopf/network.hpp"

namespace mopf::net {

namespace {

const char* kCase14 = R"m(function mpc = case14
mpc.version = 2;
mpc.baseMVA = 100;

%% bus data
%	bus_i	type	Pd	Qd	Gs	Bs	area	Vm	Va	baseKV	zone	Vmax	Vmin
mpc.bus = [
	1	3	0	0	0	0	1	1.06	0	0	1	1.06	0.94;
	2	2	21.7	12.7	0	0	1	1.045	-4.98	0	1	1.06	0.94;
	3	2	94.2	19	0	0	1	1.01	-12.72	0	1	1.06	0.94;
	4	1	47.8	-3.9	0	0	1	1.019	-10.33	0	1	1.06	0.94;
	5	1	7.6	1.6	0	0	1	1.02	-8.78	0	1	1.06	0.94;
	6	2	11.2	7.5	0	0	1	1.07	-14.22	0	1	1.06	0.94;
	7	1	0	0	0	0	1	1.062	-13.37	0	1	1.06	0.94;
	8	2	0	0	0	0	1	1.09	-13.36	0	1	1.06	0.94;
	9	1	29.5	16.6	0	0.19	1	1.056	-14.94	0	1	1.06	0.94;
	10	1	9	5.8	0	0	1	1.051	-15.1	0	1	1.06	0.94;
	11	1	3.5	1.8	0	0	1	1.057	-14.79	0	1	1.06	0.94;
	12	1	6.1	1.6	0	0	1	1.055	-15.07	0	1	1.06	0.94;
	13	1	13.5	5.8	0	0	1	1.05	-15.16	0	1	1.06	0.94;
	14	1	14.9	5	0	0	1	1.036	-16.04	0	1	1.06	0.94;
];

%% generator data
%	bus	Pg	Qg	Qmax	Qmin	Vg	mBase	status	Pmax	Pmin
mpc.gen = [
	1	232.4	-16.9	10	0	1.06	100	1	332.4	0;
	2	40	42.4	50	-40	1.045	100	1	140	0;
	3	0	23.4	40	0	1.01	100	1	100	0;
	6	0	12.2	24	-6	1.07	100	1	100	0;
	8	0	17.4	24	-6	1.09	100	1	100	0;
];

%% branch data
%	fbus	tbus	r	x	b	rateA	rateB	rateC	ratio	angle	status
mpc.branch = [
	1	2	0.01938	0.05917	0.0528	0	0	0	0	0	1;
	1	5	0.05403	0.22304	0.0492	0	0	0	0	0	1;
	2	3	0.04699	0.19797	0.0438	0	0	0	0	0	1;
	2	4	0.05811	0.17632	0.034	0	0	0	0	0	1;
	2	5	0.05695	0.17388	0.0346	0	0	0	0	0	1;
	3	4	0.06701	0.17103	0.0128	0	0	0	0	0	1;
	4	5	0.01335	0.04211	0	0	0	0	0	0	1;
	4	7	0	0.20912	0	0	0	0	0	0	1;
	4	9	0	0.55618	0	0	0	0	0	0	1;
	5	6	0	0.25202	0	0	0	0	0	0	1;
	6	11	0.09498	0.1989	0	0	0	0	0	0	1;
	6	12	0.12291	0.25581	0	0	0	0	0	0	1;
	6	13	0.06615	0.13027	0	0	0	0	0	0	1;
	7	8	0	0.17615	0	0	0	0	0	0	1;
	7	9	0	0.11001	0	0	0	0	0	0	1;
	9	10	0.03181	0.0845	0	0	0	0	0	0	1;
	9	14	0.12711	0.27038	0	0	0	0	0	0	1;
	10	11	0.08205	0.19207	0	0	0	0	0	0	1;
	12	13	0.22092	0.19988	0	0	0	0	0	0	1;
	13	14	0.17093	0.34802	0	0	0	0	0	0	1;
];

%% generator cost data
%	model	startup	shutdown	n	c2	c1	c0
mpc.gencost = [
	2	0	0	3	0.0430293	20	0;
	2	0	0	3	0.25	20	0;
	2	0	0	3	0.01	40	0;
	2	0	0	3	0.01	40	0;
	2	0	0	3	0.01	40	0;
];
)m";

const char* kCase30 = R"m(function mpc = case30
mpc.version = 2;
mpc.baseMVA = 100;

%% bus data
%	bus_i	type	Pd	Qd	Gs	Bs	area	Vm	Va	baseKV	zone	Vmax	Vmin
mpc.bus = [
	1	3	0	0	0	0	1	1	0	135	1	1.05	0.95;
	2	2	21.7	12.7	0	0	1	1	0	135	1	1.1	0.95;
	3	1	2.4	1.2	0	0	1	1	0	135	1	1.05	0.95;
	4	1	7.6	1.6	0	0	1	1	0	135	1	1.05	0.95;
	5	1	0	0	0	0.19	1	1	0	135	1	1.05	0.95;
	6	1	0	0	0	0	1	1	0	135	1	1.05	0.95;
	7	1	22.8	10.9	0	0	1	1	0	135	1	1.05	0.95;
	8	1	30	30	0	0	1	1	0	135	1	1.05	0.95;
	9	1	0	0	0	0	1	1	0	135	1	1.05	0.95;
	10	1	5.8	2	0	0	1	1	0	135	1	1.05	0.95;
	11	1	0	0	0	0	1	1	0	135	1	1.05	0.95;
	12	1	11.2	7.5	0	0	1	1	0	135	1	1.05	0.95;
	13	2	0	0	0	0	1	1	0	135	1	1.1	0.95;
	14	1	6.2	1.6	0	0	1	1	0	135	1	1.05	0.95;
	15	1	8.2	2.5	0	0	1	1	0	135	1	1.05	0.95;
	16	1	3.5	1.8	0	0	1	1	0	135	1	1.05	0.95;
	17	1	9	5.8	0	0	1	1	0	135	1	1.05	0.95;
	18	1	3.2	0.9	0	0	1	1	0	135	1	1.05	0.95;
	19	1	9.5	3.4	0	0	1	1	0	135	1	1.05	0.95;
	20	1	2.2	0.7	0	0	1	1	0	135	1	1.05	0.95;
	21	1	17.5	11.2	0	0	1	1	0	135	1	1.05	0.95;
	22	2	0	0	0	0	1	1	0	135	1	1.1	0.95;
	23	2	3.2	1.6	0	0	1	1	0	135	1	1.1	0.95;
	24	1	8.7	6.7	0	0.04	1	1	0	135	1	1.05	0.95;
	25	1	0	0	0	0	1	1	0	135	1	1.05	0.95;
	26	1	3.5	2.3	0	0	1	1	0	135	1	1.05	0.95;
	27	2	0	0	0	0	1	1	0	135	1	1.1	0.95;
	28	1	0	0	0	0	1	1	0	135	1	1.05	0.95;
	29	1	2.4	0.9	0	0	1	1	0	135	1	1.05	0.95;
	30	1	10.6	1.9	0	0	1	1	0	135	1	1.05	0.95;
];

%% generator data
%	bus	Pg	Qg	Qmax	Qmin	Vg	mBase	status	Pmax	Pmin
mpc.gen = [
	1	23.54	0	150	-20	1	100	1	80	0;
	2	60.97	0	60	-20	1	100	1	80	0;
	22	21.59	0	62.5	-15	1	100	1	50	0;
	27	26.91	0	48.7	-15	1	100	1	55	0;
	23	19.2	0	40	-10	1	100	1	30	0;
	13	37	0	44.7	-15	1	100	1	40	0;
];

%% branch data
%	fbus	tbus	r	x	b	rateA	rateB	rateC	ratio	angle	status
mpc.branch = [
	1	2	0.02	0.06	0.03	130	130	130	0	0	1;
	1	3	0.05	0.19	0.02	130	130	130	0	0	1;
	2	4	0.06	0.17	0.02	65	65	65	0	0	1;
	3	4	0.01	0.04	0	130	130	130	0	0	1;
	2	5	0.05	0.2	0.02	130	130	130	0	0	1;
	2	6	0.06	0.18	0.02	65	65	65	0	0	1;
	4	6	0.01	0.04	0	90	90	90	0	0	1;
	5	7	0.05	0.12	0.01	70	70	70	0	0	1;
	6	7	0.03	0.08	0.01	130	130	130	0	0	1;
	6	8	0.01	0.04	0	32	32	32	0	0	1;
	6	9	0	0.21	0	65	65	65	0	0	1;
	6	10	0	0.56	0	32	32	32	0	0	1;
	9	11	0	0.21	0	65	65	65	0	0	1;
	9	10	0	0.11	0	65	65	65	0	0	1;
	4	12	0	0.26	0	65	65	65	0	0	1;
	12	13	0	0.14	0	65	65	65	0	0	1;
	12	14	0.12	0.26	0	32	32	32	0	0	1;
	12	15	0.07	0.13	0	32	32	32	0	0	1;
	12	16	0.09	0.2	0	32	32	32	0	0	1;
	14	15	0.22	0.2	0	16	16	16	0	0	1;
	16	17	0.08	0.19	0	16	16	16	0	0	1;
	15	18	0.11	0.22	0	16	16	16	0	0	1;
	18	19	0.06	0.13	0	16	16	16	0	0	1;
	19	20	0.03	0.07	0	32	32	32	0	0	1;
	10	20	0.09	0.21	0	32	32	32	0	0	1;
	10	17	0.03	0.08	0	32	32	32	0	0	1;
	10	21	0.03	0.07	0	32	32	32	0	0	1;
	10	22	0.07	0.15	0	32	32	32	0	0	1;
	21	22	0.01	0.02	0	32	32	32	0	0	1;
	15	23	0.1	0.2	0	16	16	16	0	0	1;
	22	24	0.12	0.18	0	16	16	16	0	0	1;
	23	24	0.13	0.27	0	16	16	16	0	0	1;
	24	25	0.19	0.33	0	16	16	16	0	0	1;
	25	26	0.25	0.38	0	16	16	16	0	0	1;
	25	27	0.11	0.21	0	16	16	16	0	0	1;
	28	27	0	0.4	0	65	65	65	0	0	1;
	27	29	0.22	0.42	0	16	16	16	0	0	1;
	27	30	0.32	0.6	0	16	16	16	0	0	1;
	29	30	0.24	0.45	0	16	16	16	0	0	1;
	8	28	0.06	0.2	0.02	32	32	32	0	0	1;
	6	28	0.02	0.06	0.01	32	32	32	0	0	1;
];

%% generator cost data
%	model	startup	shutdown	n	c2	c1	c0
mpc.gencost = [
	2	0	0	3	0.02	2	0;
	2	0	0	3	0.0175	1.75	0;
	2	0	0	3	0.0625	1	0;
	2	0	0	3	0.00834	3.25	0;
	2	0	0	3	0.025	3	0;
	2	0	0	3	0.025	3	0;
];
)m";

NetworkCase strip_quadratic(NetworkCase c) {
  for (auto& g : c.generators) g.q_cost = 0.0;
  return c;
}

/// Append `block` to `base` as additional buses of `area`, renumbering the
/// block's ids and joining it with plain internal branches.
struct Connector {
  int bus_in_base = 0;   // id already present in base
  int bus_in_block = 0;  // id within the block, before renumbering
};

int append_block(NetworkCase& base, const NetworkCase& block, int area,
                 const std::vector<Connector>& connectors, double b_pu,
                 double internal_limit_mw) {
  int offset = 0;
  for (const auto& bus : base.buses) offset = std::max(offset, bus.id);
  for (auto bus : block.buses) {
    bus.id += offset;
    bus.area = area;
    bus.is_ref = false;
    base.buses.push_back(bus);
  }
  for (auto br : block.branches) {
    br.from += offset;
    br.to += offset;
    br.limit_mw = internal_limit_mw;
    base.branches.push_back(br);
  }
  for (auto g : block.generators) {
    g.bus += offset;
    base.generators.push_back(g);
  }
  for (const auto& con : connectors) {
    Branch br;
    br.from = con.bus_in_base;
    br.to = con.bus_in_block + offset;
    br.b_pu = b_pu;
    br.limit_mw = internal_limit_mw;
    base.branches.push_back(br);
  }
  return offset;
}

}  // namespace

const std::string& builtin_case14_m() {
  static const std::string text = kCase14;
  return text;
}

const std::string& builtin_case30_m() {
  static const std::string text = kCase30;
  return text;
}

NetworkCase two_area_44(std::uint64_t seed, bool quadratic_costs) {
  NetworkCase a = parse_case(builtin_case14_m(), CaseFormat::MatpowerM);
  NetworkCase b = parse_case(builtin_case30_m(), CaseFormat::MatpowerM);
  // Two parallel tie-lines between generator-free buses; distinct
  // susceptances so neither tie row duplicates the other.
  std::vector<TieSpec> ties{{4, 21, 5.0, 10.0}, {4, 21, 4.0, 10.0}};
  NetworkCase out = stitch_two_area_case(a, b, ties, 100.0);
  out.name = quadratic_costs ? "two-area-44" : "two-area-44-linear";
  if (!quadratic_costs) out = strip_quadratic(out);
  return perturb_costs(out, seed);
}

NetworkCase four_area_472(std::uint64_t seed, bool quadratic_costs) {
  NetworkCase c14 = parse_case(builtin_case14_m(), CaseFormat::MatpowerM);
  NetworkCase c30 = parse_case(builtin_case30_m(), CaseFormat::MatpowerM);
  const double internal_limit = 500.0;
  const double tie_limit = 50.0;

  NetworkCase out;
  out.name = quadratic_costs ? "four-area-472" : "four-area-472-linear";
  out.base_mva = 100.0;

  // Each area is a 118-bus composite: 14 + 30 + 14 + 30 + 30 chained with
  // internal connector branches. Entry bus (ring tie landing) is the first
  // block's bus 4, exit bus is the last block's bus 21; both generator-free.
  std::vector<int> entry(4), exit_(4);
  for (int area = 1; area <= 4; ++area) {
    int base_off = 0;
    for (const auto& bus : out.buses) base_off = std::max(base_off, bus.id);
    append_block(out, c14, area, {}, 5.0, internal_limit);
    int off = append_block(out, c30, area, {{base_off + 14, 1}}, 5.0,
                           internal_limit);
    off = append_block(out, c14, area, {{off + 30, 1}}, 5.0, internal_limit);
    off = append_block(out, c30, area, {{off + 14, 1}}, 5.0, internal_limit);
    off = append_block(out, c30, area, {{off + 30, 1}}, 5.0, internal_limit);
    entry[area - 1] = base_off + 4;
    exit_[area - 1] = off + 21;
  }
  // ring of tie-lines: exit of area k feeds entry of area k+1
  for (int k = 0; k < 4; ++k) {
    Branch tie;
    tie.from = exit_[k];
    tie.to = entry[(k + 1) % 4];
    tie.b_pu = 5.0;
    tie.limit_mw = tie_limit;
    tie.tie = true;
    out.branches.push_back(tie);
  }
  for (auto& bus : out.buses)
    if (bus.area == 1 && !out.is_boundary_bus(bus.id)) {
      bus.is_ref = true;
      break;
    }
  if (!quadratic_costs) out = strip_quadratic(out);
  return perturb_costs(out, seed);
}

}  // namespace mopf::net
