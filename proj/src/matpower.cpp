#include <charconv>
#include <cmath>
#include <map>
#include <sstream>
#include <vector>

#include "mopf/network.hpp"

namespace mopf::net {

namespace {

struct Token {
  std::string text;
  int line = 0;
};

// Strip % comments, split into whitespace/punctuation tokens with line info.
std::vector<Token> tokenize(const std::string& text) {
  std::vector<Token> out;
  int line = 1;
  std::string cur;
  auto push = [&]() {
    if (!cur.empty()) {
      out.push_back({cur, line});
      cur.clear();
    }
  };
  for (size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (ch == '%') {
      push();
      while (i < text.size() && text[i] != '\n') ++i;
      ++line;
      continue;
    }
    if (ch == '\n') {
      push();
      out.push_back({"\n", line});
      ++line;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(ch))) {
      push();
      continue;
    }
    if (ch == '=' || ch == '[' || ch == ']' || ch == ';' || ch == ',') {
      push();
      out.push_back({std::string(1, ch), line});
      continue;
    }
    cur += ch;
  }
  push();
  return out;
}

double parse_number(const Token& t) {
  double v = 0;
  const char* begin = t.text.data();
  const char* end = begin + t.text.size();
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end)
    throw ParseError("matpower: expected a number at line " +
                     std::to_string(t.line) + ", got '" + t.text + "'");
  return v;
}

using Matrix = std::vector<std::vector<double>>;

struct MFile {
  double base_mva = 100.0;
  std::string name;
  std::map<std::string, Matrix> matrices;
};

MFile parse_mfile(const std::string& text) {
  MFile f;
  auto toks = tokenize(text);
  size_t i = 0;
  auto skip_newlines = [&]() {
    while (i < toks.size() && toks[i].text == "\n") ++i;
  };
  while (i < toks.size()) {
    skip_newlines();
    if (i >= toks.size()) break;
    const Token& t = toks[i];
    if (t.text == "function") {
      // function mpc = casename
      while (i < toks.size() && toks[i].text != "\n") {
        f.name = toks[i].text;
        ++i;
      }
      continue;
    }
    if (t.text.rfind("mpc.", 0) == 0) {
      std::string field = t.text.substr(4);
      ++i;
      if (i >= toks.size() || toks[i].text != "=")
        throw ParseError("matpower: expected '=' after mpc." + field +
                         " at line " + std::to_string(t.line));
      ++i;
      skip_newlines();
      if (i < toks.size() && toks[i].text == "[") {
        ++i;
        Matrix m;
        std::vector<double> row;
        while (i < toks.size() && toks[i].text != "]") {
          const std::string& s = toks[i].text;
          if (s == ";" || s == "\n") {
            if (!row.empty()) m.push_back(std::move(row)), row.clear();
          } else if (s != ",") {
            row.push_back(parse_number(toks[i]));
          }
          ++i;
        }
        if (i >= toks.size())
          throw ParseError("matpower: unterminated matrix mpc." + field);
        ++i;  // consume ']'
        if (!row.empty()) m.push_back(std::move(row));
        f.matrices[field] = std::move(m);
      } else {
        // scalar or string assignment; keep numbers, ignore strings
        if (i < toks.size() && !toks[i].text.empty() &&
            (std::isdigit(static_cast<unsigned char>(toks[i].text[0])) ||
             toks[i].text[0] == '-' || toks[i].text[0] == '.')) {
          const double v = parse_number(toks[i]);
          if (field == "baseMVA") f.base_mva = v;
        }
        while (i < toks.size() && toks[i].text != "\n") ++i;
      }
      // trailing ';'
      while (i < toks.size() && (toks[i].text == ";" || toks[i].text == "\n"))
        ++i;
      continue;
    }
    ++i;
  }
  return f;
}

const Matrix& require(const MFile& f, const std::string& key) {
  auto it = f.matrices.find(key);
  if (it == f.matrices.end())
    throw ParseError("matpower: missing mpc." + key + " matrix");
  return it->second;
}

double col(const std::vector<double>& row, size_t c, const std::string& what) {
  if (c >= row.size())
    throw ParseError("matpower: row of mpc." + what + " has only " +
                     std::to_string(row.size()) + " columns, need " +
                     std::to_string(c + 1));
  return row[c];
}

}  // namespace

NetworkCase parse_matpower(const std::string& text) {
  MFile f = parse_mfile(text);
  NetworkCase c;
  c.name = f.name;
  c.base_mva = f.base_mva;

  for (const auto& row : require(f, "bus")) {
    Bus b;
    b.id = static_cast<int>(col(row, 0, "bus"));
    const int type = static_cast<int>(col(row, 1, "bus"));
    b.load_mw = col(row, 2, "bus");
    b.area = static_cast<int>(col(row, 6, "bus"));
    b.is_ref = type == 3;
    c.buses.push_back(b);
  }
  for (const auto& row : require(f, "branch")) {
    const double status = row.size() > 10 ? col(row, 10, "branch") : 1.0;
    if (status == 0.0) continue;
    Branch br;
    br.from = static_cast<int>(col(row, 0, "branch"));
    br.to = static_cast<int>(col(row, 1, "branch"));
    const double x = col(row, 3, "branch");
    if (x <= 0)
      throw ParseError("matpower: branch " + std::to_string(br.from) + "-" +
                       std::to_string(br.to) + " has non-positive reactance");
    br.b_pu = 1.0 / x;
    const double rate_a = col(row, 5, "branch");
    br.limit_mw = rate_a > 0 ? rate_a : 1e5;  // 0 means unlimited
    c.branches.push_back(br);
  }
  const Matrix& gen = require(f, "gen");
  const Matrix& gencost = require(f, "gencost");
  if (gencost.size() != gen.size())
    throw ParseError("matpower: gencost rows (" +
                     std::to_string(gencost.size()) +
                     ") do not match gen rows (" + std::to_string(gen.size()) +
                     ")");
  for (size_t k = 0; k < gen.size(); ++k) {
    const auto& row = gen[k];
    const double status = row.size() > 7 ? col(row, 7, "gen") : 1.0;
    if (status == 0.0) continue;
    Generator g;
    g.bus = static_cast<int>(col(row, 0, "gen"));
    g.pmax_mw = col(row, 8, "gen");
    g.pmin_mw = col(row, 9, "gen");
    const auto& cost = gencost[k];
    const int model = static_cast<int>(col(cost, 0, "gencost"));
    if (model != 2)
      throw ParseError("matpower: only polynomial gencost (model 2) is "
                       "supported, row " + std::to_string(k + 1));
    const int ncost = static_cast<int>(col(cost, 3, "gencost"));
    if (ncost == 3) {
      g.q_cost = 2.0 * col(cost, 4, "gencost");
      g.c_cost = col(cost, 5, "gencost");
    } else if (ncost == 2) {
      g.q_cost = 0.0;
      g.c_cost = col(cost, 4, "gencost");
    } else {
      throw ParseError("matpower: gencost row " + std::to_string(k + 1) +
                       " must have 2 or 3 polynomial coefficients");
    }
    c.generators.push_back(g);
  }
  return c;
}

}  // namespace mopf::net
