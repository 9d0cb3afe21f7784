#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "forge/field.hpp"

namespace forge {

enum class Op : std::uint8_t { Input, Const, Add, Mul };

struct Gate {
  Op op = Op::Const;
  int var = -1;
  Fe c;
  std::vector<int> ch;
};

struct Metrics {
  long long size = 0;   // wires
  long long gates = 0;  // reachable gates, leaves included
  int depth = 0;        // alternating layers, top layer a sum
  long long formal_degree = 0;
};

// Append-only gate DAG. Every gate refers to lower-indexed gates only, so the
// gate vector is already a topological order.
class Circuit {
 public:
  Circuit() = default;
  Circuit(const FieldConfig& f, int nvars, bool share_leaves = true)
      : field_(f), nvars_(nvars), share_leaves_(share_leaves) {}

  const FieldConfig& field() const { return field_; }
  int nvars() const { return nvars_; }
  void grow_vars(int n) { nvars_ = std::max(nvars_, n); }
  const std::vector<Gate>& gates() const { return gates_; }
  const Gate& gate(int g) const { return gates_[static_cast<std::size_t>(g)]; }
  int num_gates() const { return static_cast<int>(gates_.size()); }

  const std::vector<int>& outputs() const { return outputs_; }
  void add_output(int g) { outputs_.push_back(g); }
  void set_outputs(std::vector<int> o) { outputs_ = std::move(o); }
  int output() const {
    if (outputs_.empty()) fail(ErrorKind::InvalidArgument, "circuit has no output");
    return outputs_.front();
  }

  // Raw append with structural validation only; the parser uses this so a
  // file's gates survive unchanged.
  int push(Gate g) {
    int idx = num_gates();
    if (g.op == Op::Input && (g.var < 0 || g.var >= nvars_))
      fail(ErrorKind::ArityMismatch, "input x" + std::to_string(g.var + 1) + " outside nvars");
    if (g.op == Op::Const && g.c.modulus() != field_.modulus)
      fail(ErrorKind::MixedFieldConfig, "constant from another field");
    if (g.op == Op::Add || g.op == Op::Mul) {
      if (g.ch.size() < 2) fail(ErrorKind::InvalidArgument, "sum/product gates need two or more children");
      for (int c : g.ch)
        if (c < 0 || c >= idx) fail(ErrorKind::CyclicReference, "child must precede its gate");
    }
    gates_.push_back(std::move(g));
    return idx;
  }

  int input(int v) {
    if (share_leaves_) {
      auto it = input_cache_.find(v);
      if (it != input_cache_.end()) return it->second;
    }
    Gate g;
    g.op = Op::Input;
    g.var = v;
    int idx = push(std::move(g));
    if (share_leaves_) input_cache_[v] = idx;
    return idx;
  }

  int constant(const Fe& c) {
    if (share_leaves_) {
      auto it = const_cache_.find(c);
      if (it != const_cache_.end()) return it->second;
    }
    Gate g;
    g.op = Op::Const;
    g.c = c;
    int idx = push(std::move(g));
    if (share_leaves_) const_cache_[c] = idx;
    return idx;
  }
  int constant(long long v) { return constant(Fe::from_int(field_, v)); }

  bool is_const(int g) const { return gate(g).op == Op::Const; }
  bool is_zero_const(int g) const { return is_const(g) && gate(g).c.is_zero(); }

  // Folding builders: constants are combined, neutral elements dropped and
  // unary sums/products collapse to their child.
  int add(const std::vector<int>& kids) {
    Fe acc = Fe::zero(field_);
    std::vector<int> rest;
    bool any_const = false;
    for (int k : kids) {
      if (is_const(k)) {
        acc += gate(k).c;
        any_const = true;
      } else {
        rest.push_back(k);
      }
    }
    if (rest.empty()) return constant(acc);
    if (any_const && !acc.is_zero()) rest.push_back(constant(acc));
    if (rest.size() == 1) return rest[0];
    Gate g;
    g.op = Op::Add;
    g.ch = std::move(rest);
    return push(std::move(g));
  }

  int mul(const std::vector<int>& kids) {
    Fe acc = Fe::one(field_);
    std::vector<int> rest;
    for (int k : kids) {
      if (is_const(k))
        acc *= gate(k).c;
      else
        rest.push_back(k);
    }
    if (acc.is_zero() || rest.empty()) return constant(acc);
    if (!acc.is_one()) rest.insert(rest.begin(), constant(acc));
    if (rest.size() == 1) return rest[0];
    Gate g;
    g.op = Op::Mul;
    g.ch = std::move(rest);
    return push(std::move(g));
  }

  int add(int a, int b) { return add(std::vector<int>{a, b}); }
  int mul(int a, int b) { return mul(std::vector<int>{a, b}); }
  int scale(const Fe& c, int a) { return mul({constant(c), a}); }
  int neg(int a) { return scale(-Fe::one(field_), a); }
  int sub(int a, int b) { return add(a, neg(b)); }

  // If g is c*h with a single constant factor, return (h, c); else (g, 1).
  std::pair<int, Fe> unscale(int g) const {
    const Gate& gt = gate(g);
    if (gt.op == Op::Mul && gt.ch.size() == 2 && is_const(gt.ch[0]) && !is_const(gt.ch[1]))
      return {gt.ch[1], gate(gt.ch[0]).c};
    return {g, Fe::one(field_)};
  }

  // Sum of coef*gate. With flatten_top, a sum gate among the terms is opened
  // one level so its children merge into the new sum (weights go onto the
  // top layer instead of adding one).
  int lincomb(const std::vector<std::pair<int, Fe>>& terms, bool flatten_top = false) {
    std::map<int, Fe> acc;
    Fe cst = Fe::zero(field_);
    auto put = [&](int g, const Fe& c) {
      if (c.is_zero()) return;
      auto [h, s] = unscale(g);
      Fe w = c * s;
      if (is_const(h)) {
        cst += w * gate(h).c;
        return;
      }
      auto it = acc.find(h);
      if (it == acc.end())
        acc.emplace(h, w);
      else
        it->second += w;
    };
    for (const auto& [g, c] : terms) {
      auto [h, s] = unscale(g);
      if (flatten_top && gate(h).op == Op::Add) {
        for (int k : gate(h).ch) put(k, c * s);
      } else {
        put(g, c);
      }
    }
    std::vector<int> kids;
    for (const auto& [h, w] : acc) {
      if (w.is_zero()) continue;
      kids.push_back(w.is_one() ? h : scale(w, h));
    }
    if (!cst.is_zero()) kids.push_back(constant(cst));
    if (kids.empty()) return constant(Fe::zero(field_));
    return add(kids);
  }

  std::vector<char> reachable() const { return reachable_from(outputs_); }

  std::vector<char> reachable_from(const std::vector<int>& roots) const {
    std::vector<char> live(gates_.size(), 0);
    for (int o : roots) live[static_cast<std::size_t>(o)] = 1;
    for (int g = num_gates() - 1; g >= 0; --g) {
      if (!live[static_cast<std::size_t>(g)]) continue;
      for (int c : gates_[static_cast<std::size_t>(g)].ch) live[static_cast<std::size_t>(c)] = 1;
    }
    return live;
  }

  // standalone copy of one output's cone
  Circuit single(std::size_t out_index) const;

  bool share_leaves() const { return share_leaves_; }

 private:
  FieldConfig field_;
  int nvars_ = 0;
  bool share_leaves_ = true;
  std::vector<Gate> gates_;
  std::vector<int> outputs_;
  std::map<int, int> input_cache_;
  std::map<Fe, int> const_cache_;
};

// Copy the cone of src's outputs into dst, sending input v to var_gate[v]
// (or to dst's own input v when var_gate[v] < 0). Returns the gate map, -1 for
// gates outside the cone.
inline std::vector<int> embed(Circuit& dst, const Circuit& src, const std::vector<int>& var_gate) {
  if (!(dst.field() == src.field())) fail(ErrorKind::MixedFieldConfig, "embedding circuits over different fields");
  std::vector<char> live = src.reachable();
  std::vector<int> map(static_cast<std::size_t>(src.num_gates()), -1);
  std::vector<int> kids;
  for (int g = 0; g < src.num_gates(); ++g) {
    if (!live[static_cast<std::size_t>(g)]) continue;
    const Gate& gt = src.gate(g);
    int r = -1;
    switch (gt.op) {
      case Op::Input: {
        int v = gt.var;
        if (v < static_cast<int>(var_gate.size()) && var_gate[static_cast<std::size_t>(v)] >= 0)
          r = var_gate[static_cast<std::size_t>(v)];
        else
          r = dst.input(v);
        break;
      }
      case Op::Const: r = dst.constant(gt.c); break;
      case Op::Add:
      case Op::Mul:
        kids.clear();
        for (int c : gt.ch) kids.push_back(map[static_cast<std::size_t>(c)]);
        r = gt.op == Op::Add ? dst.add(kids) : dst.mul(kids);
        break;
    }
    map[static_cast<std::size_t>(g)] = r;
  }
  return map;
}

// Embed src and return the dst gate of its first output.
inline int embed_output(Circuit& dst, const Circuit& src, const std::vector<int>& var_gate) {
  return embed(dst, src, var_gate)[static_cast<std::size_t>(src.output())];
}

inline Circuit Circuit::single(std::size_t out_index) const {
  Circuit c(field_, nvars_, share_leaves_);
  // raw copy keeps gate structure (no refolding)
  std::vector<char> live = reachable_from({outputs_.at(out_index)});
  std::vector<int> map(gates_.size(), -1);
  for (int g = 0; g < num_gates(); ++g) {
    if (!live[static_cast<std::size_t>(g)]) continue;
    Gate ng = gates_[static_cast<std::size_t>(g)];
    for (int& k : ng.ch) k = map[static_cast<std::size_t>(k)];
    map[static_cast<std::size_t>(g)] = c.push(std::move(ng));
  }
  c.outputs_ = {map[static_cast<std::size_t>(outputs_.at(out_index))]};
  return c;
}

inline Circuit constant_circuit(const FieldConfig& f, int nvars, const Fe& c) {
  Circuit r(f, nvars);
  r.add_output(r.constant(c));
  return r;
}

inline Circuit variable_circuit(const FieldConfig& f, int nvars, int v) {
  Circuit r(f, nvars);
  r.add_output(r.input(v));
  return r;
}

inline std::vector<Fe> evaluate(const Circuit& C, const std::vector<Fe>& point) {
  if (static_cast<int>(point.size()) != C.nvars())
    fail(ErrorKind::ArityMismatch, "point has " + std::to_string(point.size()) + " coordinates, circuit has " +
                                       std::to_string(C.nvars()) + " variables");
  for (const Fe& v : point)
    if (v.modulus() != C.field().modulus) fail(ErrorKind::MixedFieldConfig, "point from another field");
  std::vector<char> live = C.reachable();
  std::vector<Fe> val(static_cast<std::size_t>(C.num_gates()));
  for (int g = 0; g < C.num_gates(); ++g) {
    if (!live[static_cast<std::size_t>(g)]) continue;
    const Gate& gt = C.gate(g);
    Fe& out = val[static_cast<std::size_t>(g)];
    switch (gt.op) {
      case Op::Input: out = point[static_cast<std::size_t>(gt.var)]; break;
      case Op::Const: out = gt.c; break;
      case Op::Add:
        out = val[static_cast<std::size_t>(gt.ch[0])];
        for (std::size_t i = 1; i < gt.ch.size(); ++i) out += val[static_cast<std::size_t>(gt.ch[i])];
        break;
      case Op::Mul:
        out = val[static_cast<std::size_t>(gt.ch[0])];
        for (std::size_t i = 1; i < gt.ch.size(); ++i) out *= val[static_cast<std::size_t>(gt.ch[i])];
        break;
    }
  }
  std::vector<Fe> res;
  for (int o : C.outputs()) res.push_back(val[static_cast<std::size_t>(o)]);
  return res;
}

inline Fe evaluate1(const Circuit& C, const std::vector<Fe>& point) { return evaluate(C, point).at(0); }

// Per-gate formal degree counting only the variables selected by mask
// (all variables when mask is empty).
inline std::vector<long long> formal_degrees(const Circuit& C, const std::vector<char>& mask = {}) {
  std::vector<long long> deg(static_cast<std::size_t>(C.num_gates()), 0);
  for (int g = 0; g < C.num_gates(); ++g) {
    const Gate& gt = C.gate(g);
    long long d = 0;
    switch (gt.op) {
      case Op::Input:
        d = (mask.empty() || (gt.var < static_cast<int>(mask.size()) && mask[static_cast<std::size_t>(gt.var)])) ? 1 : 0;
        break;
      case Op::Const: d = 0; break;
      case Op::Add:
        for (int c : gt.ch) d = std::max(d, deg[static_cast<std::size_t>(c)]);
        break;
      case Op::Mul:
        for (int c : gt.ch) d += deg[static_cast<std::size_t>(c)];
        break;
    }
    deg[static_cast<std::size_t>(g)] = d;
  }
  return deg;
}

inline long long formal_degree(const Circuit& C, const std::vector<char>& mask = {}) {
  auto deg = formal_degrees(C, mask);
  long long m = 0;
  for (int o : C.outputs()) m = std::max(m, deg[static_cast<std::size_t>(o)]);
  return m;
}

inline long long formal_degree_in(const Circuit& C, int var) {
  std::vector<char> mask(static_cast<std::size_t>(std::max(C.nvars(), var + 1)), 0);
  mask[static_cast<std::size_t>(var)] = 1;
  return formal_degree(C, mask);
}

// Mask selecting every variable except `skip` (pass -1 to select all).
inline std::vector<char> all_but(int nvars, int skip) {
  std::vector<char> m(static_cast<std::size_t>(nvars), 1);
  if (skip >= 0 && skip < nvars) m[static_cast<std::size_t>(skip)] = 0;
  return m;
}

namespace detail {
enum class Layer : std::uint8_t { Leaf, Sum, Prod };
}

// Layered depth. Adjacent gates of the same kind merge into one layer, a
// product by a single constant counts as a weighted wire, and a top sum
// layer is added when the output is a product.
inline int layered_depth(const Circuit& C) {
  using detail::Layer;
  std::vector<Layer> kind(static_cast<std::size_t>(C.num_gates()), Layer::Leaf);
  std::vector<int> lay(static_cast<std::size_t>(C.num_gates()), 0);
  for (int g = 0; g < C.num_gates(); ++g) {
    const Gate& gt = C.gate(g);
    auto gi = static_cast<std::size_t>(g);
    if (gt.op == Op::Input || gt.op == Op::Const) continue;
    std::vector<int> kids;
    for (int c : gt.ch)
      if (!(gt.op == Op::Mul && C.is_const(c))) kids.push_back(c);
    if (gt.op == Op::Mul && kids.size() == 1) {
      kind[gi] = kind[static_cast<std::size_t>(kids[0])];
      lay[gi] = lay[static_cast<std::size_t>(kids[0])];
      continue;
    }
    Layer me = gt.op == Op::Add ? Layer::Sum : Layer::Prod;
    int d = 0;
    for (int c : kids) {
      auto ci = static_cast<std::size_t>(c);
      d = std::max(d, kind[ci] == me ? lay[ci] : lay[ci] + 1);
    }
    kind[gi] = me;
    lay[gi] = d;
  }
  int best = 0;
  for (int o : C.outputs()) {
    auto oi = static_cast<std::size_t>(o);
    best = std::max(best, kind[oi] == Layer::Prod ? lay[oi] + 1 : lay[oi]);
  }
  return best;
}

// Longest output-to-leaf path in gates, no normalization.
inline int raw_depth(const Circuit& C) {
  std::vector<int> d(static_cast<std::size_t>(C.num_gates()), 0);
  for (int g = 0; g < C.num_gates(); ++g)
    for (int c : C.gate(g).ch)
      d[static_cast<std::size_t>(g)] = std::max(d[static_cast<std::size_t>(g)], d[static_cast<std::size_t>(c)] + 1);
  int best = 0;
  for (int o : C.outputs()) best = std::max(best, d[static_cast<std::size_t>(o)]);
  return best;
}

inline Metrics metrics(const Circuit& C) {
  Metrics m;
  std::vector<char> live = C.reachable();
  for (int g = 0; g < C.num_gates(); ++g) {
    if (!live[static_cast<std::size_t>(g)]) continue;
    m.gates += 1;
    m.size += static_cast<long long>(C.gate(g).ch.size());
  }
  m.depth = layered_depth(C);
  m.formal_degree = formal_degree(C);
  return m;
}

// Gates that feed more than one consumer (outputs count as consumers).
inline bool is_formula(const Circuit& C) {
  std::vector<int> uses(static_cast<std::size_t>(C.num_gates()), 0);
  std::vector<char> live = C.reachable();
  for (int o : C.outputs()) uses[static_cast<std::size_t>(o)]++;
  for (int g = 0; g < C.num_gates(); ++g) {
    if (!live[static_cast<std::size_t>(g)]) continue;
    for (int c : C.gate(g).ch) uses[static_cast<std::size_t>(c)]++;
  }
  for (int g = 0; g < C.num_gates(); ++g)
    if (live[static_cast<std::size_t>(g)] && uses[static_cast<std::size_t>(g)] > 1) return false;
  return true;
}

// Replace bound variables by circuits. Each binding is copied once and every
// use of the variable points at that single copy.
inline Circuit substitute(const Circuit& C, const std::map<int, Circuit>& bindings) {
  int n = C.nvars();
  for (const auto& [v, B] : bindings) {
    if (!(B.field() == C.field())) fail(ErrorKind::MixedFieldConfig, "binding over a different field");
    n = std::max(n, B.nvars());
  }
  Circuit out(C.field(), n);
  std::vector<int> var_gate(static_cast<std::size_t>(n), -1);
  for (const auto& [v, B] : bindings) {
    if (v < 0 || v >= C.nvars()) fail(ErrorKind::ArityMismatch, "binding for unknown variable");
    var_gate[static_cast<std::size_t>(v)] = embed_output(out, B, {});
  }
  std::vector<int> map = embed(out, C, var_gate);
  for (int o : C.outputs()) out.add_output(map[static_cast<std::size_t>(o)]);
  return out;
}

inline std::string emit_circuit(const Circuit& C) {
  std::ostringstream os;
  os << "field " << C.field().str() << "\n";
  os << "nvars " << C.nvars() << "\n";
  std::vector<char> live = C.reachable();
  std::vector<int> id(static_cast<std::size_t>(C.num_gates()), 0);
  int next = 1;
  for (int g = 0; g < C.num_gates(); ++g) {
    if (!live[static_cast<std::size_t>(g)]) continue;
    id[static_cast<std::size_t>(g)] = next++;
    const Gate& gt = C.gate(g);
    os << "g" << id[static_cast<std::size_t>(g)] << " = ";
    switch (gt.op) {
      case Op::Input: os << "input x" << gt.var + 1; break;
      case Op::Const: os << "const " << gt.c.str(); break;
      case Op::Add:
      case Op::Mul:
        os << (gt.op == Op::Add ? "add" : "mul");
        for (int c : gt.ch) os << " g" << id[static_cast<std::size_t>(c)];
        break;
    }
    os << "\n";
  }
  for (int o : C.outputs()) os << "output g" << id[static_cast<std::size_t>(o)] << "\n";
  return os.str();
}

namespace detail {

inline std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream is(s);
  std::vector<std::string> out;
  std::string t;
  while (is >> t) out.push_back(t);
  return out;
}

inline long long parse_index(const std::string& tok, char prefix, int line) {
  if (tok.size() < 2 || tok[0] != prefix) fail(ErrorKind::SyntaxError, "expected " + std::string(1, prefix) + "<k>, got '" + tok + "'", line);
  long long v = 0;
  for (std::size_t i = 1; i < tok.size(); ++i) {
    if (tok[i] < '0' || tok[i] > '9') fail(ErrorKind::SyntaxError, "bad index '" + tok + "'", line);
    v = v * 10 + (tok[i] - '0');
    if (v > (1LL << 40)) fail(ErrorKind::SyntaxError, "index too large '" + tok + "'", line);
  }
  return v;
}

}  // namespace detail

// Line-based circuit format; '#' starts a comment. Unknown header lines are
// handed to `extra` (returns false to reject) so wrappers can add headers.
template <typename Extra>
Circuit parse_circuit_with(const std::string& text, Extra&& extra) {
  std::istringstream is(text);
  std::string raw;
  int line = 0;
  bool have_field = false, have_nvars = false;
  FieldConfig field;
  int nvars = 0;
  Circuit C;
  std::map<long long, int> ids;     // file index -> gate
  std::map<long long, int> defined_at;
  std::vector<std::pair<long long, int>> pending_outputs;
  // first pass records which indices exist anywhere, so a forward reference
  // can be told apart from a dangling one
  {
    std::istringstream pre(text);
    std::string l;
    int ln = 0;
    while (std::getline(pre, l)) {
      ++ln;
      auto h = l.find('#');
      if (h != std::string::npos) l = l.substr(0, h);
      auto tok = detail::split_ws(l);
      if (tok.size() >= 2 && tok[1] == "=" && !tok[0].empty() && tok[0][0] == 'g') {
        try {
          defined_at[detail::parse_index(tok[0], 'g', ln)] = ln;
        } catch (const Error&) {
        }
      }
    }
  }
  long long last = -1;
  while (std::getline(is, raw)) {
    ++line;
    auto h = raw.find('#');
    if (h != std::string::npos) raw = raw.substr(0, h);
    auto tok = detail::split_ws(raw);
    if (tok.empty()) continue;
    if (tok[0] == "field") {
      if (have_field) fail(ErrorKind::SyntaxError, "duplicate field line", line);
      if (tok.size() == 2 && tok[1] == "rationals") {
        field = FieldConfig::rationals();
      } else if (tok.size() == 3 && tok[1] == "prime") {
        try {
          field = FieldConfig::prime(std::stoull(tok[2]));
        } catch (const Error& e) {
          fail(ErrorKind::SyntaxError, e.what(), line);
        } catch (const std::exception&) {
          fail(ErrorKind::SyntaxError, "bad modulus '" + tok[2] + "'", line);
        }
      } else {
        fail(ErrorKind::SyntaxError, "expected 'field rationals' or 'field prime <p>'", line);
      }
      have_field = true;
      continue;
    }
    if (tok[0] == "nvars") {
      if (!have_field) fail(ErrorKind::SyntaxError, "nvars before field", line);
      if (tok.size() != 2) fail(ErrorKind::SyntaxError, "expected 'nvars <n>'", line);
      try {
        nvars = std::stoi(tok[1]);
      } catch (const std::exception&) {
        fail(ErrorKind::SyntaxError, "bad nvars", line);
      }
      if (nvars < 0) fail(ErrorKind::SyntaxError, "negative nvars", line);
      have_nvars = true;
      C = Circuit(field, nvars, false);
      continue;
    }
    if (tok[0] == "output") {
      if (tok.size() != 2) fail(ErrorKind::SyntaxError, "expected 'output g<k>'", line);
      pending_outputs.emplace_back(detail::parse_index(tok[1], 'g', line), line);
      continue;
    }
    if (tok.size() >= 3 && tok[1] == "=") {
      if (!have_field || !have_nvars) fail(ErrorKind::SyntaxError, "gate before field/nvars header", line);
      long long k = detail::parse_index(tok[0], 'g', line);
      if (k <= last) fail(ErrorKind::SyntaxError, "gate indices must be strictly increasing", line);
      last = k;
      Gate g;
      const std::string& kw = tok[2];
      if (kw == "input") {
        if (tok.size() != 4) fail(ErrorKind::SyntaxError, "expected 'input x<i>'", line);
        long long v = detail::parse_index(tok[3], 'x', line);
        if (v < 1 || v > nvars) fail(ErrorKind::SyntaxError, "variable " + tok[3] + " outside nvars", line);
        g.op = Op::Input;
        g.var = static_cast<int>(v - 1);
      } else if (kw == "const") {
        if (tok.size() != 4) fail(ErrorKind::SyntaxError, "expected 'const <num>[/<den>]'", line);
        g.op = Op::Const;
        try {
          g.c = Fe::parse(field, tok[3]);
        } catch (const Error& e) {
          fail(ErrorKind::SyntaxError, e.what(), line);
        }
      } else if (kw == "add" || kw == "mul") {
        g.op = kw == "add" ? Op::Add : Op::Mul;
        if (tok.size() < 5) fail(ErrorKind::SyntaxError, kw + " needs at least two children", line);
        for (std::size_t i = 3; i < tok.size(); ++i) {
          long long c = detail::parse_index(tok[i], 'g', line);
          auto it = ids.find(c);
          if (it == ids.end()) {
            if (defined_at.count(c)) fail(ErrorKind::CyclicReference, "g" + std::to_string(k) + " refers to g" + std::to_string(c) + " which is not defined before it", line);
            fail(ErrorKind::DanglingReference, "reference to undefined gate g" + std::to_string(c), line);
          }
          g.ch.push_back(it->second);
        }
      } else {
        fail(ErrorKind::SyntaxError, "unknown gate kind '" + kw + "'", line);
      }
      ids[k] = C.push(std::move(g));
      continue;
    }
    if (!extra(tok, line)) fail(ErrorKind::SyntaxError, "unrecognized line", line);
  }
  if (!have_field || !have_nvars) fail(ErrorKind::SyntaxError, "missing field or nvars header", line);
  if (pending_outputs.empty()) fail(ErrorKind::SyntaxError, "no output line", line);
  for (auto [k, ln] : pending_outputs) {
    auto it = ids.find(k);
    if (it == ids.end()) fail(ErrorKind::DanglingReference, "output refers to undefined gate g" + std::to_string(k), ln);
    C.add_output(it->second);
  }
  return C;
}

inline Circuit parse_circuit(const std::string& text) {
  return parse_circuit_with(text, [](const std::vector<std::string>&, int) { return false; });
}

}  // namespace forge
