#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace plap {

enum class CertifiedProperty { flp, kazhdan_t, confdim_bounds };
/// exact_p2: every lambda came from the exact p=2 eigensolver.
/// iterative_upper_bound: some lambda is a solver value, an upper bound on
/// the true infimum, so the implication is not rigorous.
enum class Rigor { exact_p2, iterative_upper_bound };

const char* to_string(CertifiedProperty p);
const char* to_string(Rigor r);

/// Method labels recorded with each eigenvalue.
inline constexpr const char* kMethodExact = "exact";
inline constexpr const char* kMethodIterative = "iterative-upper-bound";

struct Evidence {
  std::string link;
  double lambda = 0.0;
  std::string method = kMethodExact;

  friend bool operator==(const Evidence&, const Evidence&) = default;
};

struct Certificate {
  CertifiedProperty property = CertifiedProperty::flp;
  /// Whether the implication's threshold was met; a refusal keeps the
  /// evidence and the reason.
  bool issued = false;
  double p = 2.0;
  double epsilon = 0.0;
  /// (2 - 2 eps)^{1/(2p)} for FL^p; absent for (T).
  std::optional<double> lipschitz;
  Rigor rigor = Rigor::exact_p2;
  std::vector<Evidence> evidence;
  std::map<std::string, double> parameters;
  /// The statement is a deterministic implication for this complex; the
  /// random-group theorems it feeds are asymptotic.
  std::string regime = "asymptotic";
  std::string reason;
  std::vector<std::string> warnings;

  friend bool operator==(const Certificate&, const Certificate&) = default;
};

/// (2 - 2 eps)^{1/(2p)}
double flp_lipschitz(double p, double epsilon);

/// Issues FL^p_{m+1, (2-2eps)^{1/(2p)}} iff every lambda exceeds 1 - eps,
/// where m = max_link_vertices. Requires p >= 2 and eps in (0, 1/2).
Certificate flp_certificate(const std::vector<Evidence>& links, double p, double epsilon, int max_link_vertices);

/// Property (T) iff every lambda_{1,2} exceeds 1/2. Evidence that is not
/// from the exact p=2 solver downgrades the rigor with a warning.
Certificate kazhdan_certificate(const std::vector<Evidence>& links);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// [2, max(2, (1/C) (log f / log log f)^{1/2})] for f >= 16, C > 0.
Interval flp_range(long long m, double f_of_m, double C);

/// Supremum of p over issued FL^p certificates; the certified-p range
/// [2, sup] stands in for the true sup of the FL^p set.
std::optional<double> certified_p_sup(const std::vector<Certificate>& certs);

struct ConfdimReport {
  long long m = 0;
  double d = 0.0;
  /// 5 / (1 - 2d)
  double delta = 0.0;
  /// 30 / (1 - 2d) log(2m - 1)
  double confdim_upper = 0.0;
  /// 3 (1 - 2d - eps)
  double isoperimetric_coefficient = 0.0;
  double isoperimetric_epsilon = 0.01;
  /// The certified p, when one was supplied.
  std::optional<double> confdim_lower;
  bool sandwich_holds = true;
};

/// Requires m >= 1 and 0 < d < 1/2.
ConfdimReport hyperbolicity_and_confdim(long long m, double d, std::optional<double> certified_p,
                                        double isoperimetric_epsilon = 0.01);

enum class Monotonicity { increasing, decreasing, unflagged };

struct TransferStatement {
  bool permitted = false;
  /// "binomial -> density" for increasing properties, the reverse for
  /// decreasing ones.
  std::string direction;
  std::string coupling;
  std::string reason;
};

/// Bookkeeping for moving an a.a.s. statement between the binomial and
/// density models. `model` is "triangular" or "gromov".
TransferStatement monotone_transfer(bool holds_in_source, Monotonicity monotonicity, const std::string& model);

std::string to_json(const Certificate& c, int indent = 2);
Certificate certificate_from_json(const std::string& text);
std::string to_json(const ConfdimReport& r, int indent = 2);

}  // namespace plap
