#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>

#include "forge/certificate.hpp"
#include "forge/nw_pit.hpp"

using namespace forge;
namespace fs = std::filesystem;

namespace {

struct Session {
  std::string field;  // empty: take the field from the input file
  u64 seed = 0;
  Budget budget;
  bool json_out = false;

  FieldConfig config() const {
    if (field.empty() || field == "rationals" || field == "Q") return FieldConfig::rationals();
    std::string p = field;
    for (const char* pre : {"prime:", "prime ", "p:"})
      if (p.rfind(pre, 0) == 0) p = p.substr(std::string(pre).size());
    try {
      return FieldConfig::prime(std::stoull(p));
    } catch (const std::logic_error&) {
      fail(ErrorKind::InvalidArgument, "bad --field " + field);
    }
  }
  void check(const FieldConfig& f) const {
    if (!field.empty() && !(config() == f)) fail(ErrorKind::MixedFieldConfig, "file is over " + f.str() + ", --field says " + config().str());
    f.require_degree(budget.max_degree);
  }
  json params() const {
    return {{"seed", seed}, {"budget_terms", budget.max_terms}, {"budget_degree", budget.max_degree}};
  }
};

int parse_var(const std::string& s) {
  std::string t = (!s.empty() && (s[0] == 'x' || s[0] == 'y')) ? s.substr(1) : s;
  try {
    int v = std::stoi(t);
    if (v < 1) throw std::invalid_argument("");
    return v - 1;
  } catch (const std::logic_error&) {
    fail(ErrorKind::InvalidArgument, "variable must look like x3 or 3, got " + s);
  }
}

std::vector<Fe> parse_point(const FieldConfig& f, const std::string& s) {
  std::vector<Fe> pt;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) pt.push_back(Fe::parse(f, tok));
  return pt;
}

std::string point_str(const std::vector<Fe>& pt) {
  std::string s;
  for (std::size_t i = 0; i < pt.size(); ++i) s += (i ? "," : "") + pt[i].str();
  return s;
}

Circuit load(const Session& S, const std::string& path) {
  Circuit C = parse_circuit(read_file(path));
  S.check(C.field());
  return C;
}

std::string sidecar(const std::string& out) { return fs::path(out).replace_extension(".metrics.json").string(); }

void write_circuit(const std::string& path, const Circuit& C) {
  write_file(path, emit_circuit(C));
  write_file(sidecar(path), metrics_json(C).dump(2) + "\n");
}

std::string numbered(const std::string& out, int j) {
  fs::path p(out);
  std::string ext = p.has_extension() ? p.extension().string() : ".circ";
  return (p.parent_path() / (p.stem().string() + "_" + std::to_string(j) + ext)).string();
}

json design_json(const Design& D) {
  json sets = json::array();
  for (const auto& S : D.sets) {
    json a = json::array();
    for (int e : S) a.push_back(e + 1);
    sets.push_back(a);
  }
  return {{"n", D.n}, {"m", D.m}, {"l", D.l}, {"q", D.q}, {"dprime", D.dprime}, {"sets", sets}};
}

Design design_from(const json& j) {
  Design D;
  D.n = j.at("n");
  D.m = j.at("m");
  D.l = j.at("l");
  D.q = j.at("q");
  D.dprime = j.at("dprime");
  for (const auto& S : j.at("sets")) {
    std::vector<int> s;
    for (int e : S) s.push_back(e - 1);
    D.sets.push_back(s);
  }
  if (static_cast<int>(D.sets.size()) != D.n) fail(ErrorKind::SyntaxError, "design lists the wrong number of sets");
  return D;
}

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::BudgetExceeded: return 3;
    case ErrorKind::SyntaxError:
    case ErrorKind::DanglingReference:
    case ErrorKind::CyclicReference:
    case ErrorKind::InvalidArgument:
    case ErrorKind::ArityMismatch:
    case ErrorKind::MixedFieldConfig:
    case ErrorKind::FieldTooSmall:
    case ErrorKind::BoundExceedsField:
    case ErrorKind::ParameterViolation:
      return 2;
    default: return 1;
  }
}

// Runs body; on a library error records it in the certificate and returns its exit code.
template <class F>
int certified(json& cert, const std::string& cert_path, F&& body) {
  int code = 0;
  try {
    body();
  } catch (const Error& e) {
    cert["error"] = {{"kind", kind_name(e.kind())}, {"message", e.what()}};
    code = exit_code(e.kind());
  }
  if (!cert_path.empty()) write_file(cert_path, dump_certificate(cert));
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"forge: arithmetic circuit workbench"};
  app.require_subcommand(1);
  app.fallthrough();
  Session S;
  app.add_option("--field", S.field, "rationals or prime:<p>");
  app.add_option("--seed", S.seed, "session seed")->envname("FORGE_SEED");
  app.add_option("--budget-terms", S.budget.max_terms, "largest dense expansion allowed");
  app.add_option("--budget-degree", S.budget.max_degree, "largest degree allowed (D_max)");
  app.add_flag("--json", S.json_out, "machine-readable output");

  std::string in, out, cert_path, yvar = "x1", alpha, point, subset_s, hard, design_path, mode = "sz";
  int k = 0, d = 0, j = 0, n = 0, m = 0, D = 0, trials = 20;
  long long r = -1;
  u64 limit = 0;
  bool do_expand = false;
  int code = 0;

  auto* eval = app.add_subcommand("eval", "evaluate a circuit at a point");
  eval->add_option("in", in)->required();
  eval->add_option("--point", point)->required();
  eval->callback([&] {
    Circuit C = load(S, in);
    Fe v = evaluate1(C, parse_point(C.field(), point));
    if (S.json_out) std::cout << json{{"value", v.str()}}.dump() << "\n";
    else std::cout << v.str() << "\n";
  });

  auto* expand_c = app.add_subcommand("expand", "dense expansion, one term per line");
  expand_c->add_option("in", in)->required();
  expand_c->callback([&] { std::cout << expand(load(S, in), S.budget).text(); });

  auto* met = app.add_subcommand("metrics", "size, depth and formal degree");
  met->add_option("in", in)->required();
  met->callback([&] { std::cout << metrics_json(load(S, in)).dump() << "\n"; });

  auto* homog = app.add_subcommand("homog", "degree-k homogeneous component");
  homog->add_option("-k", k)->required();
  homog->add_option("in", in)->required();
  homog->add_option("-o", out)->default_val("homog.circ");
  homog->callback([&] { write_circuit(out, homogenize(load(S, in), k)); });

  auto* coeffs = app.add_subcommand("coeffs", "coefficients of y^0..y^d, written to <out>_<j>");
  coeffs->add_option("-y", yvar)->required();
  coeffs->add_option("-d", d)->required();
  coeffs->add_option("in", in)->required();
  coeffs->add_option("-o", out)->default_val("coeff.circ");
  coeffs->callback([&] {
    auto cs = extract_y_coeffs(load(S, in), parse_var(yvar), d);
    for (int t = 0; t <= d; ++t) write_circuit(numbered(out, t), cs[static_cast<std::size_t>(t)]);
  });

  auto* deriv = app.add_subcommand("deriv", "j-th Hasse derivative in y");
  deriv->add_option("-y", yvar)->required();
  deriv->add_option("-j", j)->required();
  deriv->add_option("in", in)->required();
  deriv->add_option("-o", out)->default_val("deriv.circ");
  deriv->callback([&] { write_circuit(out, hasse_derivative_circuit(load(S, in), parse_var(yvar), j)); });

  auto* monic = app.add_subcommand("monic", "shift x_i -> x_i + a_i y so the circuit is monic in y");
  monic->add_option("-y", yvar);
  monic->add_option("-r", r, "total degree (default: formal degree)");
  monic->add_option("in", in)->required();
  monic->add_option("-o", out)->default_val("monic.circ");
  monic->callback([&] {
    Circuit C = load(S, in);
    MonicForm M = make_monic(C, parse_var(yvar), r >= 0 ? r : formal_degree(C), S.seed);
    write_circuit(out, M.circuit);
    json meta = metrics_json(M.circuit);
    meta["shift"] = fe_list(M.shift);
    meta["leading_unit"] = M.leading_unit.str();
    meta["trials"] = M.trials;
    write_file(sidecar(out), meta.dump(2) + "\n");
  });

  auto* genset = app.add_subcommand("genset", "generator set at y = alpha, members written to <out>_<j>");
  genset->add_option("-y", yvar);
  genset->add_option("--alpha", alpha)->required();
  genset->add_option("-d", d)->required();
  genset->add_option("in", in)->required();
  genset->add_option("-o", out)->default_val("gen.circ");
  genset->callback([&] {
    Circuit C = load(S, in);
    GeneratorSet G = generator_set(C, parse_var(yvar), Fe::parse(C.field(), alpha), d, S.budget, S.seed);
    json idx = json::array();
    for (const auto& g : G.members) {
      write_circuit(numbered(out, g.j), g.g);
      idx.push_back({{"j", g.j}, {"file", fs::path(numbered(out, g.j)).filename().string()}});
    }
    json meta = {{"members", idx}, {"zero_test", G.zero_test}, {"max_member_size", G.max_member_size}, {"h0", fe_list(G.h0)}};
    write_file(sidecar(out), meta.dump(2) + "\n");
    if (S.json_out) std::cout << meta.dump() << "\n";
  });

  auto* lift = app.add_subcommand("lift-root", "root y = f(x) of P(x, y) by Hensel lifting");
  lift->add_option("-y", yvar)->required();
  lift->add_option("-d", d)->required();
  lift->add_option("--alpha", alpha);
  lift->add_option("in", in)->required();
  lift->add_option("-o", out)->default_val("root.circ");
  lift->add_option("--cert", cert_path)->default_val("cert.json");
  lift->callback([&] {
    Circuit P = load(S, in);
    json cert = {{"command", "lift-root"}, {"field", P.field().str()}, {"params", S.params()}};
    cert["params"]["y"] = parse_var(yvar);
    cert["params"]["d"] = d;
    if (!alpha.empty()) cert["params"]["alpha"] = alpha;
    cert["inputs"]["circuit"] = artifact(in, cert_path);
    code = certified(cert, cert_path, [&] {
      std::optional<Fe> a;
      if (!alpha.empty()) a = Fe::parse(P.field(), alpha);
      RootCertificate R = lift_root(P, parse_var(yvar), d, S.seed, a, S.budget);
      write_circuit(out, R.root);
      cert["outputs"]["root"] = artifact(out, cert_path);
      cert["result"] = {{"alpha", R.alpha.str()},   {"delta", R.delta.str()},          {"multiplicity", R.multiplicity},
                        {"shift", fe_list(R.shift)}, {"generators", R.generators},     {"residual_mode", R.residual_mode},
                        {"residual_ok", R.residual_ok}, {"metrics", metrics_json(R.root)}};
      cert["stages"] = chain_json(R.chain);
    });
  });

  auto* factor = app.add_subcommand("factor", "factor of P from a subset of its approximate roots");
  factor->add_option("-y", yvar)->required();
  factor->add_option("-d", d)->required();
  factor->add_option("--subset", subset_s, "1-based root indices, comma separated");
  factor->add_option("in", in)->required();
  factor->add_option("-o", out)->default_val("factor.circ");
  factor->add_option("--cert", cert_path)->default_val("cert.json");
  factor->callback([&] {
    Circuit P = load(S, in);
    json cert = {{"command", "factor"}, {"field", P.field().str()}, {"params", S.params()}};
    cert["params"]["y"] = parse_var(yvar);
    cert["params"]["d"] = d;
    std::optional<std::vector<int>> sub;
    if (!subset_s.empty()) {
      std::vector<int> s;
      std::stringstream ss(subset_s);
      std::string tok;
      while (std::getline(ss, tok, ',')) s.push_back(parse_var(tok));
      sub = s;
      cert["params"]["subset"] = s;
    }
    cert["inputs"]["circuit"] = artifact(in, cert_path);
    code = certified(cert, cert_path, [&] {
      FactorResult F = extract_factor(P, parse_var(yvar), d, S.seed, sub, S.budget);
      write_circuit(out, F.factor);
      cert["outputs"]["factor"] = artifact(out, cert_path);
      json alphas = json::array();
      for (int i : F.subset) alphas.push_back(F.context.bundle.alphas[static_cast<std::size_t>(i)].str());
      cert["result"] = {{"subset", F.subset},       {"roots", alphas},        {"multiplicity", F.multiplicity},
                        {"generators", F.generators}, {"unit", F.unit.str()}, {"level", F.context.level},
                        {"shift", fe_list(F.context.monic.shift)}, {"metrics", metrics_json(F.factor)}};
      cert["stages"] = chain_json(F.chain);
    });
  });

  auto* design = app.add_subcommand("design", "Reed-Solomon combinatorial design");
  design->add_option("-n", n)->required();
  design->add_option("-m", m)->required();
  design->add_option("-o", out)->default_val("design.json");
  design->callback([&] { write_file(out, design_json(nw_design(n, m)).dump(2) + "\n"); });

  auto* hitset = app.add_subcommand("hitset", "print hitting-set points, one per line");
  hitset->add_option("--hard", hard)->required();
  hitset->add_option("--design", design_path)->required();
  hitset->add_option("-D", D)->required();
  hitset->add_option("-d", d)->required();
  hitset->add_option("--limit", limit)->default_val(1000);
  hitset->callback([&] {
    FieldConfig f = S.config();
    f.require_degree(S.budget.max_degree);
    HittingSet H(parse_table(read_file(hard), f), design_from(json::parse(read_file(design_path))), D, d);
    std::vector<Fe> pt;
    for (u64 i = 0; (limit == 0 || i < limit) && H.next(pt); ++i) std::cout << point_str(pt) << "\n";
  });

  auto* pit = app.add_subcommand("pit", "zero test");
  pit->add_option("--mode", mode)->check(CLI::IsMember({"hitset", "sz", "exhaustive"}));
  pit->add_option("in", in)->required();
  pit->add_option("--hard", hard);
  pit->add_option("--design", design_path);
  pit->add_option("-D", D);
  pit->add_option("-d", d, "degree bound (default: formal degree)");
  pit->add_option("--trials", trials);
  pit->add_option("--limit", limit, "hitset points to try, 0 for all");
  pit->callback([&] {
    Circuit C = load(S, in);
    int deg = d > 0 ? d : static_cast<int>(formal_degree(C));
    PitResult R;
    if (mode == "hitset") {
      if (hard.empty() || design_path.empty() || D <= 0) fail(ErrorKind::InvalidArgument, "hitset mode needs --hard, --design and -D");
      HittingSet H(parse_table(read_file(hard), C.field()), design_from(json::parse(read_file(design_path))), D, deg);
      R = pit_hitset(C, H, limit);
    } else {
      R = pit_sz(C, deg, trials, S.seed, mode == "exhaustive");
    }
    json res = {{"mode", mode}, {"zero", R.zero}, {"definitive", R.definitive}, {"points", R.points}};
    if (R.witness) res["witness"] = point_str(*R.witness);
    if (S.json_out) std::cout << res.dump() << "\n";
    else std::cout << (R.zero ? "zero" : "nonzero") << (R.definitive ? "" : " (not definitive)") << "\n";
  });

  auto* vsum = app.add_subcommand("vnp-sum", "expand or evaluate an exponential sum");
  vsum->add_option("in", in)->required();
  auto* ex = vsum->add_flag("--expand", do_expand);
  vsum->add_option("--eval", point)->excludes(ex);
  vsum->callback([&] {
    ExpSumPoly E = parse_exp_sum(read_file(in));
    S.check(E.Q.field());
    if (!point.empty()) {
      Fe v = exp_sum_eval(E, parse_point(E.Q.field(), point));
      std::cout << (S.json_out ? json{{"value", v.str()}}.dump() : v.str()) << "\n";
    } else {
      std::cout << exp_sum_expand(E, S.budget).text();
    }
  });

  auto* vfac = app.add_subcommand("vnp-factor", "factor of an exponential sum, as an exponential sum");
  vfac->add_option("-y", yvar)->required();
  vfac->add_option("-d", d)->required();
  vfac->add_option("--subset", subset_s);
  vfac->add_option("in", in)->required();
  vfac->add_option("-o", out)->default_val("factor.esum");
  vfac->add_option("--cert", cert_path)->default_val("cert.json");
  vfac->callback([&] {
    ExpSumPoly E = parse_exp_sum(read_file(in));
    S.check(E.Q.field());
    json cert = {{"command", "vnp-factor"}, {"field", E.Q.field().str()}, {"params", S.params()}};
    cert["params"]["y"] = parse_var(yvar);
    cert["params"]["d"] = d;
    std::optional<std::vector<int>> sub;
    if (!subset_s.empty()) {
      std::vector<int> s;
      std::stringstream ss(subset_s);
      std::string tok;
      while (std::getline(ss, tok, ',')) s.push_back(parse_var(tok));
      sub = s;
      cert["params"]["subset"] = s;
    }
    cert["inputs"]["exp_sum"] = artifact(in, cert_path);
    code = certified(cert, cert_path, [&] {
      VnpFactorResult V = factor_vnp(E, parse_var(yvar), d, S.seed, sub, S.budget);
      write_file(out, emit_exp_sum(V.factor));
      cert["outputs"]["factor"] = artifact(out, cert_path);
      cert["result"] = {{"aux", V.factor.m}, {"leaves", V.leaves}, {"formula_size", V.formula_size}, {"verified", V.verified}};
      if (!V.verified) fail(ErrorKind::ResidualNonzero, "factor exp-sum does not expand to the factor");
    });
  });

  auto* ver = app.add_subcommand("verify", "re-run a certificate's check");
  ver->add_option("cert", in)->required();
  ver->callback([&] {
    VerifyResult R = verify_certificate(in);
    json res = {{"pass", R.pass}, {"mode", R.mode}, {"digest", R.digest}};
    if (!R.pass) res["reason"] = R.reason;
    if (S.json_out) std::cout << res.dump() << "\n";
    else std::cout << (R.pass ? "pass" : "fail: " + R.reason) << " (" << R.mode << ") " << R.digest << "\n";
    if (!R.pass) code = 1;
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  } catch (const Error& e) {
    std::cerr << "forge: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "forge: bad JSON: " << e.what() << "\n";
    return 2;
  }
  return code;
}
