#pragma once

#include <openssl/evp.h>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "forge/vnp.hpp"

namespace forge {

using json = nlohmann::json;

inline std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr)) throw std::runtime_error("sha256 failed");
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  return os.str();
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::MissingArtifact, "cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline void write_file(const std::string& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::InvalidArgument, "cannot write " + path);
  out << data;
}

inline json metrics_json(const Circuit& C) {
  Metrics m = metrics(C);
  return {{"size", m.size}, {"gates", m.gates}, {"depth", m.depth}, {"formal_degree", m.formal_degree}};
}

inline json chain_json(const std::vector<StageMetric>& chain) {
  json a = json::array();
  for (const auto& s : chain) a.push_back({{"stage", s.stage}, {"size", s.size}, {"depth", s.depth}});
  return a;
}

inline json fe_list(const std::vector<Fe>& v) {
  json a = json::array();
  for (const Fe& x : v) a.push_back(x.str());
  return a;
}

// Artifact paths are stored relative to the certificate's directory so the
// same run in another directory writes the same bytes.
inline json artifact(const std::string& path, const std::string& cert_path) {
  namespace fs = std::filesystem;
  fs::path base = fs::absolute(cert_path).parent_path();
  std::string rel = fs::relative(fs::absolute(path), base).generic_string();
  return {{"path", rel}, {"sha256", sha256_hex(read_file(path))}};
}

inline std::string resolve(const json& art, const std::string& cert_path) {
  namespace fs = std::filesystem;
  return (fs::absolute(cert_path).parent_path() / art.at("path").get<std::string>()).string();
}

inline std::string dump_certificate(const json& cert) { return cert.dump(2) + "\n"; }

struct VerifyResult {
  bool pass = false;
  std::string mode;
  std::string reason;
  std::string digest;  // sha256 over the certificate and every artifact it names
};

inline Budget budget_of(const json& params) {
  Budget b;
  b.max_terms = params.value("budget_terms", b.max_terms);
  b.max_degree = params.value("budget_degree", b.max_degree);
  return b;
}

// Re-run the certificate's check on the files it names.
inline VerifyResult verify_certificate(const std::string& cert_path) {
  VerifyResult R;
  std::string text = read_file(cert_path);
  json cert;
  try {
    cert = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorKind::SyntaxError, std::string("certificate is not JSON: ") + e.what());
  }
  std::string digest_src = text;
  std::map<std::string, std::string> files;
  for (const char* group : {"inputs", "outputs"}) {
    if (!cert.contains(group)) continue;
    for (const auto& [role, art] : cert[group].items()) {
      std::string p = resolve(art, cert_path);
      std::string data = read_file(p);
      if (sha256_hex(data) != art.at("sha256").get<std::string>()) fail(ErrorKind::HashMismatch, role + " (" + p + ") changed since the certificate was written");
      files[role] = data;
      digest_src += data;
    }
  }
  R.digest = sha256_hex(digest_src);
  const std::string cmd = cert.at("command");
  const json& params = cert.at("params");
  Budget budget = budget_of(params);
  u64 seed = params.value("seed", u64{0});
  if (cert.contains("error")) {
    // a recorded failure verifies by failing the same way again
    std::string want = cert["error"].at("kind");
    std::string got = "none";
    try {
      Circuit P = parse_circuit(files.at("circuit"));
      int y = params.at("y"), d = params.at("d");
      if (cmd == "lift-root") {
        std::optional<Fe> alpha;
        if (params.contains("alpha")) alpha = Fe::parse(P.field(), params["alpha"]);
        lift_root(P, y, d, seed, alpha, budget);
      } else if (cmd == "factor") {
        std::optional<std::vector<int>> sub;
        if (params.contains("subset")) sub = params["subset"].get<std::vector<int>>();
        extract_factor(P, y, d, seed, sub, budget);
      }
    } catch (const Error& e) {
      got = kind_name(e.kind());
    }
    R.mode = "replay";
    R.pass = got == want;
    if (!R.pass) R.reason = "recorded " + want + ", replay gave " + got;
    return R;
  }
  if (cmd == "lift-root") {
    Circuit P = parse_circuit(files.at("circuit"));
    Circuit f = parse_circuit(files.at("root"));
    std::string mode;
    bool ok = residual_zero(P, params.at("y"), f, budget, seed, mode);
    R.mode = mode;
    R.pass = ok && mode == cert.at("result").at("residual_mode");
    if (!R.pass) R.reason = ok ? "residual mode differs" : "P(x, f) is not zero";
  } else if (cmd == "factor") {
    Circuit P = parse_circuit(files.at("circuit"));
    Circuit F = parse_circuit(files.at("factor"));
    Divisibility dv = divides(expand(F, budget).with_nvars(P.nvars()), expand(P, budget));
    R.mode = "oracle";
    R.pass = dv.divides && dv.multiplicity == cert.at("result").at("multiplicity").get<int>();
    if (!R.pass) R.reason = "factor does not divide P with the recorded multiplicity";
  } else if (cmd == "vnp-factor") {
    ExpSumPoly E = parse_exp_sum(files.at("exp_sum"));
    ExpSumPoly F = parse_exp_sum(files.at("factor"));
    DensePoly Pd = exp_sum_expand(E, budget);
    Divisibility dv = divides(exp_sum_expand(F, budget).with_nvars(Pd.nvars()), Pd);
    R.mode = "oracle";
    R.pass = dv.divides;
    if (!R.pass) R.reason = "factor exp-sum does not divide the input's polynomial";
  } else {
    fail(ErrorKind::InvalidArgument, "no verifier for command " + cmd);
  }
  return R;
}

}  // namespace forge
