#include "plap/certificates.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "json.hpp"
#include "plap/errors.hpp"

namespace plap {

namespace {

using nlohmann::json;

void check_evidence(const std::vector<Evidence>& links, const char* what) {
  if (links.empty()) throw ParameterError(std::string(what) + ": no link eigenvalues supplied");
  for (const Evidence& e : links) {
    if (!std::isfinite(e.lambda)) throw ParameterError(std::string(what) + ": non-finite eigenvalue for link " + e.link);
  }
}

double min_lambda(const std::vector<Evidence>& links) {
  double lo = links.front().lambda;
  for (const Evidence& e : links) lo = std::min(lo, e.lambda);
  return lo;
}

bool all_exact(const std::vector<Evidence>& links) {
  return std::all_of(links.begin(), links.end(), [](const Evidence& e) { return e.method == kMethodExact; });
}

CertifiedProperty property_from(const std::string& s) {
  if (s == "FLp") return CertifiedProperty::flp;
  if (s == "KazhdanT") return CertifiedProperty::kazhdan_t;
  if (s == "ConfdimBounds") return CertifiedProperty::confdim_bounds;
  throw InputError("unknown certified property '" + s + "'");
}

Rigor rigor_from(const std::string& s) {
  if (s == "exact-p2") return Rigor::exact_p2;
  if (s == "iterative-upper-bound") return Rigor::iterative_upper_bound;
  throw InputError("unknown rigor '" + s + "'");
}

std::string fmt(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

}  // namespace

const char* to_string(CertifiedProperty p) {
  switch (p) {
    case CertifiedProperty::flp:
      return "FLp";
    case CertifiedProperty::kazhdan_t:
      return "KazhdanT";
    case CertifiedProperty::confdim_bounds:
      return "ConfdimBounds";
  }
  return "?";
}

const char* to_string(Rigor r) { return r == Rigor::exact_p2 ? "exact-p2" : "iterative-upper-bound"; }

double flp_lipschitz(double p, double epsilon) { return std::pow(2.0 - 2.0 * epsilon, 1.0 / (2.0 * p)); }

Certificate flp_certificate(const std::vector<Evidence>& links, double p, double epsilon, int max_link_vertices) {
  if (!(p >= 2.0)) throw ParameterError("flp_certificate requires p >= 2");
  if (!(epsilon > 0.0 && epsilon < 0.5)) throw ParameterError("flp_certificate requires epsilon in (0, 1/2)");
  if (max_link_vertices < 1) throw ParameterError("flp_certificate needs max_link_vertices >= 1");
  check_evidence(links, "flp_certificate");

  Certificate c;
  c.property = CertifiedProperty::flp;
  c.p = p;
  c.epsilon = epsilon;
  c.lipschitz = flp_lipschitz(p, epsilon);
  c.evidence = links;
  c.parameters["m"] = max_link_vertices;
  c.parameters["dimension"] = max_link_vertices + 1.0;
  c.parameters["epsilon"] = epsilon;
  // Only the exact p=2 solver gives rigorous lambda values.
  c.rigor = p == 2.0 && all_exact(links) ? Rigor::exact_p2 : Rigor::iterative_upper_bound;
  if (p == 2.0 && !all_exact(links)) c.warnings.push_back("iterative evidence at p=2; rigor downgraded");

  const double lo = min_lambda(links);
  c.issued = lo > 1.0 - epsilon;
  c.reason = c.issued ? "min lambda " + fmt(lo) + " > 1 - epsilon = " + fmt(1.0 - epsilon)
                      : "min lambda " + fmt(lo) + " <= 1 - epsilon = " + fmt(1.0 - epsilon);
  return c;
}

Certificate kazhdan_certificate(const std::vector<Evidence>& links) {
  check_evidence(links, "kazhdan_certificate");
  Certificate c;
  c.property = CertifiedProperty::kazhdan_t;
  c.p = 2.0;
  c.epsilon = 0.5;
  c.evidence = links;
  c.rigor = Rigor::exact_p2;
  if (!all_exact(links)) {
    c.rigor = Rigor::iterative_upper_bound;
    c.warnings.push_back("evidence not from the exact p=2 solver; rigor downgraded");
  }
  const double lo = min_lambda(links);
  c.issued = lo > 0.5;
  c.reason = c.issued ? "min lambda_{1,2} " + fmt(lo) + " > 1/2" : "min lambda_{1,2} " + fmt(lo) + " <= 1/2";
  return c;
}

Interval flp_range(long long m, double f_of_m, double C) {
  if (m < 1) throw ParameterError("flp_range needs m >= 1");
  if (!(f_of_m >= 16.0)) throw ParameterError("flp_range needs f(m) >= 16");
  if (!(C > 0.0)) throw ParameterError("flp_range needs C > 0");
  const double lf = std::log(f_of_m);
  const double upper = std::sqrt(lf / std::log(lf)) / C;
  return {2.0, std::max(2.0, upper)};
}

std::optional<double> certified_p_sup(const std::vector<Certificate>& certs) {
  std::optional<double> sup;
  for (const Certificate& c : certs) {
    if (c.property != CertifiedProperty::flp || !c.issued) continue;
    sup = sup ? std::max(*sup, c.p) : c.p;
  }
  return sup;
}

ConfdimReport hyperbolicity_and_confdim(long long m, double d, std::optional<double> certified_p,
                                        double isoperimetric_epsilon) {
  if (m < 1) throw ParameterError("hyperbolicity_and_confdim needs m >= 1");
  if (!(d < 0.5)) throw ParameterError("hyperbolicity_and_confdim: the bounds diverge at d >= 1/2");
  if (!(d > 0.0)) throw ParameterError("hyperbolicity_and_confdim needs d > 0");
  ConfdimReport r;
  r.m = m;
  r.d = d;
  r.delta = 5.0 / (1.0 - 2.0 * d);
  r.confdim_upper = 30.0 / (1.0 - 2.0 * d) * std::log(2.0 * static_cast<double>(m) - 1.0);
  r.isoperimetric_epsilon = isoperimetric_epsilon;
  r.isoperimetric_coefficient = 3.0 * (1.0 - 2.0 * d - isoperimetric_epsilon);
  r.confdim_lower = certified_p;
  r.sandwich_holds = !certified_p || *certified_p <= r.confdim_upper;
  return r;
}

TransferStatement monotone_transfer(bool holds_in_source, Monotonicity monotonicity, const std::string& model) {
  TransferStatement t;
  std::string coupling;
  if (model == "triangular") {
    coupling = "rho = f(m) (2m)^-3 + O(sqrt(f(m)) (2m)^-3)";
  } else if (model == "gromov") {
    coupling = "rho = f(l) (2k-1)^-l + O(sqrt(f(l)) (2k-1)^-l)";
  } else {
    throw ParameterError("monotone_transfer: model must be 'triangular' or 'gromov'");
  }
  t.coupling = coupling;
  switch (monotonicity) {
    case Monotonicity::unflagged:
      t.reason = "property is not declared monotone";
      return t;
    case Monotonicity::increasing:
      t.direction = "binomial -> density";
      break;
    case Monotonicity::decreasing:
      t.direction = "density -> binomial";
      break;
  }
  if (!holds_in_source) {
    t.reason = "property does not hold a.a.s. in the source model";
    return t;
  }
  t.permitted = true;
  t.reason = "monotone property; a.a.s. statements transfer under the coupling";
  return t;
}

std::string to_json(const Certificate& c, int indent) {
  json j;
  j["property"] = to_string(c.property);
  j["issued"] = c.issued;
  j["p"] = c.p;
  j["epsilon"] = c.epsilon;
  j["lipschitz"] = c.lipschitz ? json(*c.lipschitz) : json(nullptr);
  j["rigor"] = to_string(c.rigor);
  j["evidence"] = json::array();
  for (const Evidence& e : c.evidence) j["evidence"].push_back({{"link", e.link}, {"lambda", e.lambda}, {"method", e.method}});
  j["parameters"] = json::object();
  for (const auto& [k, v] : c.parameters) j["parameters"][k] = v;
  j["regime"] = c.regime;
  j["reason"] = c.reason;
  j["warnings"] = c.warnings;
  return j.dump(indent);
}

Certificate certificate_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    Certificate c;
    c.property = property_from(j.at("property").get<std::string>());
    c.issued = j.at("issued").get<bool>();
    c.p = j.at("p").get<double>();
    c.epsilon = j.at("epsilon").get<double>();
    if (!j.at("lipschitz").is_null()) c.lipschitz = j.at("lipschitz").get<double>();
    c.rigor = rigor_from(j.at("rigor").get<std::string>());
    for (const auto& e : j.at("evidence")) {
      c.evidence.push_back({e.at("link").get<std::string>(), e.at("lambda").get<double>(), e.at("method").get<std::string>()});
    }
    for (const auto& [k, v] : j.at("parameters").items()) c.parameters[k] = v.get<double>();
    c.regime = j.value("regime", std::string("asymptotic"));
    c.reason = j.value("reason", std::string());
    c.warnings = j.value("warnings", std::vector<std::string>{});
    return c;
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed certificate JSON: ") + e.what());
  }
}

std::string to_json(const ConfdimReport& r, int indent) {
  json j;
  j["property"] = to_string(CertifiedProperty::confdim_bounds);
  j["m"] = r.m;
  j["d"] = r.d;
  j["delta"] = r.delta;
  j["confdim_upper"] = r.confdim_upper;
  j["isoperimetric_coefficient"] = r.isoperimetric_coefficient;
  j["isoperimetric_epsilon"] = r.isoperimetric_epsilon;
  j["confdim_lower"] = r.confdim_lower ? json(*r.confdim_lower) : json(nullptr);
  j["sandwich_holds"] = r.sandwich_holds;
  return j.dump(indent);
}

}  // namespace plap
