#include "kam/serialize.hpp"

#include <limits>
#include <sstream>

namespace kam {

namespace {

json zpow_to_json(const ZPow& z) {
  json out = json::array();
  for (auto& [mode, pow] : z) out.push_back(json::array({mode, pow}));
  return out;
}

ZPow zpow_from_json(const json& j) {
  ZPow z;
  for (auto& e : j) z.emplace_back(e[0].get<int>(), e[1].get<int>());
  return z;
}

}  // namespace

json to_json(const TorusFourier& f) {
  json out;
  out["index_set"] = f.index_set;
  out["cutoff"] = f.cutoff;
  json cs = json::array();
  for (auto& [k, c] : f.coeffs) {
    json e;
    e["k"] = k;
    e["re"] = c.real();
    e["im"] = c.imag();
    cs.push_back(std::move(e));
  }
  out["coeffs"] = std::move(cs);
  return out;
}

TorusFourier fourier_from_json(const json& j) {
  TorusFourier f;
  f.index_set = j.at("index_set").get<ivec>();
  f.cutoff = j.at("cutoff").get<int>();
  for (auto& e : j.at("coeffs"))
    f.coeffs[e.at("k").get<ivec>()] =
        cplx(e.at("re").get<double>(), e.at("im").get<double>());
  return f;
}

json to_json(const HamiltonianPoly& P) {
  json out;
  out["tangent"] = P.tangent;
  out["jmax"] = P.jmax;
  out["degree_cap"] = P.degree_cap;
  out["kcap"] = P.kcap;
  out["tail"] = P.tail;
  json ts = json::array();
  for (auto& [m, c] : P.terms) {
    json e;
    e["k"] = m.k;
    e["l"] = m.l;
    e["alpha"] = zpow_to_json(m.alpha);
    e["beta"] = zpow_to_json(m.beta);
    e["re"] = c.real();
    e["im"] = c.imag();
    ts.push_back(std::move(e));
  }
  out["terms"] = std::move(ts);
  return out;
}

HamiltonianPoly poly_from_json(const json& j) {
  HamiltonianPoly P;
  P.tangent = j.at("tangent").get<ivec>();
  P.jmax = j.at("jmax").get<int>();
  P.degree_cap = j.at("degree_cap").get<int>();
  P.kcap = j.at("kcap").get<int>();
  P.tail = j.at("tail").get<double>();
  for (auto& e : j.at("terms")) {
    MonoKey m;
    m.k = e.at("k").get<ivec>();
    m.l = e.at("l").get<ivec>();
    m.alpha = zpow_from_json(e.at("alpha"));
    m.beta = zpow_from_json(e.at("beta"));
    P.terms[m] = cplx(e.at("re").get<double>(), e.at("im").get<double>());
  }
  return P;
}

json to_json(const NormalForm& N) {
  json out;
  json om = json::array();
  for (auto& [j, w] : N.omega) om.push_back(json::array({j, w}));
  out["omega"] = std::move(om);
  json oc = json::array();
  for (auto& [j, v] : N.Omega_const) oc.push_back(json::array({j, v}));
  out["Omega_const"] = std::move(oc);
  json os = json::array();
  for (auto& [j, stages] : N.Omega_stages) {
    json e;
    e["mode"] = j;
    json st = json::array();
    for (auto& f : stages) st.push_back(to_json(f));
    e["stages"] = std::move(st);
    os.push_back(std::move(e));
  }
  out["Omega_stages"] = std::move(os);
  return out;
}

NormalForm normal_form_from_json(const json& j) {
  NormalForm N;
  for (auto& e : j.at("omega"))
    N.omega[e[0].get<int>()] = e[1].get<double>();
  for (auto& e : j.at("Omega_const"))
    N.Omega_const[e[0].get<int>()] = e[1].get<double>();
  for (auto& e : j.at("Omega_stages")) {
    std::vector<TorusFourier> stages;
    for (auto& f : e.at("stages")) stages.push_back(fourier_from_json(f));
    N.Omega_stages[e.at("mode").get<int>()] = std::move(stages);
  }
  return N;
}

std::string config_hash(const json& j) {
  const std::string s = j.dump();
  unsigned long long h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::ostringstream os;
  os << std::hex << h;
  return os.str();
}

json solver_report_json(const BlockSolveResult& sol, const json& inputs) {
  json out;
  out["inputs_hash"] = config_hash(inputs);
  out["min_divisor"] = sol.min_divisor;
  out["max_residual_rel"] = sol.max_residual_rel;
  json rr;
  for (auto& [cls, r] : sol.residual_rel) rr[cls] = r;
  out["residual_rel"] = std::move(rr);
  out["tail"] = sol.tail;
  out["Rx_avg"] = sol.Rx_avg;
  json drift = json::array();
  for (auto& [j, c] : sol.Ry_avg)
    drift.push_back(json::array({j, c.real(), c.imag()}));
  out["tangential_drift"] = std::move(drift);
  json diag = json::array();
  for (auto& [j, f] : sol.diag) {
    auto [avg, tilde] = average_and_tilde(f);
    diag.push_back(json::array(
        {j, avg.real(), avg.imag(), sup_norm_bound(tilde, 0.0)}));
  }
  out["normal_drift"] = std::move(diag);
  json left = json::array();
  for (auto& [ij, f] : sol.leftover)
    left.push_back(
        json::array({ij.first, ij.second, sup_norm_bound(f, 0.0)}));
  out["leftover_majorants"] = std::move(left);
  return out;
}

}  // namespace kam
