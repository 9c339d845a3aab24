#include "plap/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "plap/certificates.hpp"
#include "plap/errors.hpp"
#include "plap/groups.hpp"
#include "plap/random_graphs.hpp"

namespace plap {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

double parse_real(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("bad number '" + s + "' for " + what);
  }
}

long long parse_integer(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("bad integer '" + s + "' for " + what);
  }
}

template <typename T>
std::vector<T> parse_axis(const std::string& text, const std::string& what) {
  std::vector<T> out;
  for (const std::string& item : split_list(text, ',')) {
    if (item.empty()) throw ConfigError("empty entry in list for " + what);
    if constexpr (std::is_same_v<T, int>) {
      out.push_back(static_cast<int>(parse_integer(item, what)));
    } else {
      out.push_back(parse_real(item, what));
    }
  }
  if (out.empty()) throw ConfigError("empty list for " + what);
  return out;
}

// Edge multiplicity statistics of one multigraph.
struct Multiplicity {
  long long multi_pairs = 0;
  long long triple_pairs = 0;
  int max_multiplicity = 0;
};

Multiplicity multiplicity_of(const Multigraph& g) {
  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(g.edge_count());
  for (const Edge& e : g.edges()) pairs.push_back(std::minmax(e.tail, e.head));
  std::sort(pairs.begin(), pairs.end());
  Multiplicity out;
  for (std::size_t i = 0; i < pairs.size();) {
    std::size_t j = i;
    while (j < pairs.size() && pairs[j] == pairs[i]) ++j;
    const int mult = static_cast<int>(j - i);
    out.max_multiplicity = std::max(out.max_multiplicity, mult);
    if (mult >= 2) ++out.multi_pairs;
    if (mult >= 3) ++out.triple_pairs;
    i = j;
  }
  return out;
}

std::string sanitize(std::string s) {
  for (char& c : s) {
    if (c == ',' || c == '\n' || c == '\r' || c == '"') c = ';';
  }
  return s;
}

RngSeed trial_seed(const ExperimentConfig& config, int cell, int trial) {
  return split(split({config.seed, 0}, static_cast<std::uint64_t>(cell)), static_cast<std::uint64_t>(trial));
}

// Linear interpolation between order statistics of sorted values.
double quantile(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return kNaN;
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

void write_row(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out << ',';
    out << fields[i];
  }
  out << '\n';
}

void write_record_rows(std::ostream& out, const TrialRecord& r) {
  for (const PEstimate& e : r.estimates) {
    write_row(out, {std::to_string(r.cell), std::to_string(r.trial), std::to_string(r.coords.m),
                    std::to_string(r.coords.k), std::to_string(r.coords.part_size), std::to_string(r.coords.degree),
                    format_real(r.coords.rho_value), format_real(r.rho), std::to_string(r.stream), sanitize(r.status),
                    std::to_string(r.vertices), std::to_string(r.edges), std::to_string(r.min_degree),
                    std::to_string(r.max_degree), std::to_string(r.multi_pairs), std::to_string(r.triple_pairs),
                    std::to_string(r.max_multiplicity), std::to_string(r.relators), format_real(e.p),
                    format_real(e.lambda), e.method, e.converged ? "1" : "0"});
  }
}

ExperimentModel model_from(const std::string& s) {
  if (s == "er") return ExperimentModel::er;
  if (s == "config") return ExperimentModel::configuration;
  if (s == "multi-er") return ExperimentModel::multipartite_er;
  if (s == "complete") return ExperimentModel::complete;
  if (s == "triangular-link") return ExperimentModel::triangular_link;
  throw ConfigError("unknown model '" + s + "' (er, config, multi-er, complete, triangular-link)");
}

}  // namespace

std::optional<std::string> IniFile::get(const std::string& section, const std::string& key) const {
  const auto s = sections.find(section);
  if (s == sections.end()) return std::nullopt;
  const auto k = s->second.find(key);
  if (k == s->second.end()) return std::nullopt;
  return k->second;
}

IniFile parse_ini(std::istream& in) {
  IniFile ini;
  std::string section;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto comment = line.find_first_of("#;");
    if (comment != std::string::npos) line.erase(comment);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("line " + std::to_string(number) + ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      ini.sections[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(number) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError("line " + std::to_string(number) + ": empty key");
    if (!ini.sections[section].emplace(key, trim(line.substr(eq + 1))).second) {
      throw ConfigError("line " + std::to_string(number) + ": duplicate key '" + key + "'");
    }
  }
  return ini;
}

const char* to_string(ExperimentModel m) {
  switch (m) {
    case ExperimentModel::er:
      return "er";
    case ExperimentModel::configuration:
      return "config";
    case ExperimentModel::multipartite_er:
      return "multi-er";
    case ExperimentModel::complete:
      return "complete";
    case ExperimentModel::triangular_link:
      return "triangular-link";
  }
  return "?";
}

std::vector<Cell> ExperimentConfig::grid() const {
  std::vector<Cell> out;
  switch (model) {
    case ExperimentModel::er:
    case ExperimentModel::triangular_link:
      for (int mv : m)
        for (double r : rho) out.push_back({mv, 0, 0, 0, r});
      break;
    case ExperimentModel::configuration:
      for (int mv : m)
        for (int d : degree) out.push_back({mv, 0, 0, d, 0.0});
      break;
    case ExperimentModel::multipartite_er:
      for (int kv : k)
        for (int mv : part_size)
          for (double r : rho) out.push_back({0, kv, mv, 0, r});
      break;
    case ExperimentModel::complete:
      for (int mv : m) out.push_back({mv, 0, 0, 0, 0.0});
      break;
  }
  return out;
}

double ExperimentConfig::effective_rho(const Cell& c) const {
  if (model == ExperimentModel::configuration || model == ExperimentModel::complete) return 0.0;
  const double n = model == ExperimentModel::multipartite_er ? static_cast<double>(c.k) * c.part_size : c.m;
  switch (rho_rule) {
    case RhoRule::literal:
      return c.rho_value;
    case RhoRule::log_scaled:
      return c.rho_value * std::log(n) / n;
    case RhoRule::power:
      return std::pow(n, c.rho_value) / (n * n);
  }
  return c.rho_value;
}

ExperimentConfig parse_experiment_config(std::istream& in) {
  const IniFile ini = parse_ini(in);
  static const std::map<std::string, std::set<std::string>> known{
      {"experiment", {"model", "trials", "seed", "threads"}},
      {"grid", {"m", "k", "M", "degree", "rho", "rho_log", "rho_power", "p"}},
      {"solver", {"restarts", "max_iters", "grad_tol"}},
      {"output", {"csv", "json", "summary", "envelope_C"}}};
  for (const auto& [name, keys] : ini.sections) {
    const auto it = known.find(name);
    if (it == known.end()) throw ConfigError("unknown section [" + name + "]");
    for (const auto& kv : keys) {
      if (!it->second.count(kv.first)) throw ConfigError("unknown key '" + kv.first + "' in [" + name + "]");
    }
  }

  ExperimentConfig c;
  const auto model = ini.get("experiment", "model");
  if (!model) throw ConfigError("[experiment] model is required");
  c.model = model_from(*model);
  if (auto v = ini.get("experiment", "trials")) c.trials = static_cast<int>(parse_integer(*v, "trials"));
  if (auto v = ini.get("experiment", "seed")) c.seed = static_cast<std::uint64_t>(parse_integer(*v, "seed"));
  if (auto v = ini.get("experiment", "threads")) c.threads = static_cast<int>(parse_integer(*v, "threads"));
  if (c.trials < 1) throw ConfigError("trials must be >= 1");
  if (c.threads < 1) throw ConfigError("threads must be >= 1");

  if (auto v = ini.get("grid", "m")) c.m = parse_axis<int>(*v, "m");
  if (auto v = ini.get("grid", "k")) c.k = parse_axis<int>(*v, "k");
  if (auto v = ini.get("grid", "M")) c.part_size = parse_axis<int>(*v, "M");
  if (auto v = ini.get("grid", "degree")) c.degree = parse_axis<int>(*v, "degree");
  if (auto v = ini.get("grid", "p")) c.p = parse_axis<double>(*v, "p");
  int rho_keys = 0;
  for (const auto& [key, rule] : {std::pair{"rho", RhoRule::literal}, std::pair{"rho_log", RhoRule::log_scaled},
                                  std::pair{"rho_power", RhoRule::power}}) {
    if (auto v = ini.get("grid", key)) {
      c.rho = parse_axis<double>(*v, key);
      c.rho_rule = rule;
      ++rho_keys;
    }
  }
  if (rho_keys > 1) throw ConfigError("give only one of rho, rho_log, rho_power");

  auto require = [&](bool present, const char* axis) {
    if (!present) throw ConfigError(std::string("model ") + to_string(c.model) + " needs the grid axis " + axis);
  };
  switch (c.model) {
    case ExperimentModel::er:
    case ExperimentModel::triangular_link:
      require(!c.m.empty(), "m");
      require(!c.rho.empty(), "rho");
      break;
    case ExperimentModel::configuration:
      require(!c.m.empty(), "m");
      require(!c.degree.empty(), "degree");
      break;
    case ExperimentModel::multipartite_er:
      require(!c.k.empty(), "k");
      require(!c.part_size.empty(), "M");
      require(!c.rho.empty(), "rho");
      break;
    case ExperimentModel::complete:
      require(!c.m.empty(), "m");
      break;
  }
  for (double p : c.p) {
    if (!(p >= 1.5)) throw ConfigError("every p must be >= 1.5");
  }

  if (auto v = ini.get("solver", "restarts")) c.solver.restarts = static_cast<int>(parse_integer(*v, "restarts"));
  if (auto v = ini.get("solver", "max_iters")) c.solver.max_iters = static_cast<int>(parse_integer(*v, "max_iters"));
  if (auto v = ini.get("solver", "grad_tol")) c.solver.grad_tol = parse_real(*v, "grad_tol");
  if (c.solver.restarts < 1 || c.solver.max_iters < 1 || !(c.solver.grad_tol > 0.0)) {
    throw ConfigError("solver options must be positive");
  }
  c.solver.threads = 1;

  if (auto v = ini.get("output", "csv")) c.csv_path = *v;
  if (auto v = ini.get("output", "json")) c.json_path = *v;
  if (auto v = ini.get("output", "summary")) c.summary_path = *v;
  if (auto v = ini.get("output", "envelope_C")) c.envelope_C = parse_real(*v, "envelope_C");

  const auto cells = c.grid();
  if (cells.empty()) throw ConfigError("the parameter grid is empty");
  for (const Cell& cell : cells) {
    const bool tri = c.model == ExperimentModel::triangular_link;
    if (c.model != ExperimentModel::multipartite_er && cell.m < (tri ? 1 : 2)) throw ConfigError("m is too small");
    if (c.model == ExperimentModel::multipartite_er && (cell.k < 2 || cell.part_size < 1)) {
      throw ConfigError("multi-er needs k >= 2 and M >= 1");
    }
    if (c.model == ExperimentModel::configuration &&
        (cell.degree < 1 || (static_cast<long long>(cell.m) * cell.degree) % 2 != 0)) {
      throw ConfigError("config model needs degree >= 1 and m * degree even");
    }
    const double r = c.effective_rho(cell);
    if (!(r >= 0.0 && r <= 1.0)) throw ConfigError("edge probability outside [0, 1] in the grid");
  }
  return c;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  return parse_experiment_config(in);
}

TrialRecord run_trial(const ExperimentConfig& config, int cell_index, int trial) {
  const auto start = std::chrono::steady_clock::now();
  const auto cells = config.grid();
  if (cell_index < 0 || cell_index >= static_cast<int>(cells.size())) throw ParameterError("run_trial: no such cell");
  TrialRecord rec;
  rec.cell = cell_index;
  rec.trial = trial;
  rec.coords = cells[static_cast<std::size_t>(cell_index)];
  rec.rho = config.effective_rho(rec.coords);
  const RngSeed seed = trial_seed(config, cell_index, trial);
  rec.stream = seed.stream;

  Multigraph g;
  Multiplicity mult;
  try {
    switch (config.model) {
      case ExperimentModel::er:
        g = sample_er(rec.coords.m, rec.rho, seed);
        break;
      case ExperimentModel::configuration:
        g = sample_configuration(DegreeSequence(std::vector<int>(static_cast<std::size_t>(rec.coords.m), rec.coords.degree)),
                                 seed)
                .graph;
        break;
      case ExperimentModel::multipartite_er:
        g = sample_multipartite_er(rec.coords.k, rec.coords.part_size, rec.rho, seed);
        break;
      case ExperimentModel::complete:
        g = complete_graph(rec.coords.m);
        break;
      case ExperimentModel::triangular_link: {
        const auto pres = sample_triangular(rec.coords.m, SamplingMode::binomial(rec.rho), seed);
        rec.relators = static_cast<long long>(pres.relators.size());
        const auto link = build_link_graph(pres);
        const auto rep = link_structure_report(link);
        for (const auto& c : rep.classes) {
          mult.multi_pairs += c.multi_pairs;
          mult.triple_pairs += c.triple_pairs;
          mult.max_multiplicity = std::max(mult.max_multiplicity, c.max_multiplicity);
        }
        g = link.base;
        break;
      }
    }
  } catch (const std::exception& e) {
    rec.status = std::string("failed: ") + e.what();
    for (double p : config.p) rec.estimates.push_back({p, kNaN, "failed", false});
    rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rec;
  }
  if (config.model != ExperimentModel::triangular_link) mult = multiplicity_of(g);
  rec.vertices = g.vertex_count();
  rec.edges = static_cast<long long>(g.edge_count());
  rec.min_degree = g.degrees().min();
  rec.max_degree = g.degrees().max();
  rec.multi_pairs = mult.multi_pairs;
  rec.triple_pairs = mult.triple_pairs;
  rec.max_multiplicity = mult.max_multiplicity;

  SolverOptions opts = config.solver;
  opts.threads = 1;
  opts.seed = seed.stream;
  for (double p : config.p) {
    try {
      if (p == 2.0) {
        rec.estimates.push_back({p, lambda_exact_p2(g), kMethodExact, true});
      } else {
        const auto est = lambda_estimate(g, p, opts);
        rec.estimates.push_back({p, est.lambda, kMethodIterative, est.converged});
      }
    } catch (const std::exception& e) {
      if (rec.status == "ok") rec.status = std::string("failed: ") + e.what();
      rec.estimates.push_back({p, kNaN, "failed", false});
    }
  }
  rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

std::vector<SummaryRow> summarize(const ExperimentConfig& config, const std::vector<TrialRecord>& records) {
  const auto cells = config.grid();
  std::vector<SummaryRow> out;
  for (std::size_t ci = 0; ci < cells.size(); ++ci) {
    for (std::size_t pi = 0; pi < config.p.size(); ++pi) {
      SummaryRow row;
      row.cell = static_cast<int>(ci);
      row.coords = cells[ci];
      row.rho = config.effective_rho(cells[ci]);
      row.p = config.p[pi];
      std::vector<double> values;
      for (const TrialRecord& r : records) {
        if (r.cell != row.cell || pi >= r.estimates.size()) continue;
        const double v = r.estimates[pi].lambda;
        if (r.estimates[pi].method == "failed" || !std::isfinite(v)) {
          ++row.failed;
        } else {
          values.push_back(v);
        }
      }
      row.count = static_cast<int>(values.size());
      std::sort(values.begin(), values.end());
      if (values.empty()) {
        row.mean = row.min = row.max = row.q10 = row.q50 = row.q90 = kNaN;
      } else {
        double sum = 0.0;
        for (double v : values) sum += v;
        row.mean = sum / static_cast<double>(values.size());
        row.min = values.front();
        row.max = values.back();
        row.q10 = quantile(values, 0.1);
        row.q50 = quantile(values, 0.5);
        row.q90 = quantile(values, 0.9);
      }
      if (config.envelope_C) {
        double rho_m = 0.0;
        switch (config.model) {
          case ExperimentModel::er:
            rho_m = row.rho * row.coords.m;
            break;
          case ExperimentModel::multipartite_er:
            rho_m = row.rho * row.coords.k * row.coords.part_size;
            break;
          case ExperimentModel::configuration:
            rho_m = row.coords.degree;
            break;
          default:
            break;
        }
        if (rho_m > 0.0) {
          const double p = row.p;
          row.envelope = 1.0 - *config.envelope_C * std::pow(p, 4) / std::pow(rho_m, 1.0 / (2.0 * p * p));
        }
      }
      out.push_back(row);
    }
  }
  return out;
}

std::vector<std::string> csv_header() {
  return {"cell",        "trial",       "m",           "k",           "M",
          "degree",      "rho_value",   "rho",          "stream",      "status",      "vertices",
          "edges",       "min_degree",  "max_degree",   "multi_pairs", "triple_pairs", "max_multiplicity",
          "relators",    "p",           "lambda",       "method",      "converged"};
}

void write_csv(std::ostream& out, const std::vector<TrialRecord>& records) {
  write_row(out, csv_header());
  for (const TrialRecord& r : records) write_record_rows(out, r);
}

std::vector<TrialRecord> read_csv(std::istream& in) {
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  // A final line without its newline was cut off mid-write.
  if (!text.empty() && text.back() != '\n') text.erase(text.find_last_of('\n') == std::string::npos ? 0 : text.find_last_of('\n') + 1);
  std::istringstream lines(text);
  std::string line;
  std::vector<TrialRecord> out;
  if (!std::getline(lines, line)) return out;
  const auto header = csv_header();
  if (split_list(line, ',') != header) throw InputError("CSV header does not match this version's column order");
  while (std::getline(lines, line)) {
    const auto f = split_list(line, ',');
    if (f.size() != header.size()) throw InputError("CSV row has " + std::to_string(f.size()) + " fields");
    TrialRecord r;
    r.cell = static_cast<int>(parse_integer(f[0], "cell"));
    r.trial = static_cast<int>(parse_integer(f[1], "trial"));
    r.coords.m = static_cast<int>(parse_integer(f[2], "m"));
    r.coords.k = static_cast<int>(parse_integer(f[3], "k"));
    r.coords.part_size = static_cast<int>(parse_integer(f[4], "M"));
    r.coords.degree = static_cast<int>(parse_integer(f[5], "degree"));
    r.coords.rho_value = parse_real(f[6], "rho_value");
    r.rho = parse_real(f[7], "rho");
    r.stream = std::stoull(f[8]);
    r.status = f[9];
    r.vertices = static_cast<int>(parse_integer(f[10], "vertices"));
    r.edges = parse_integer(f[11], "edges");
    r.min_degree = static_cast<int>(parse_integer(f[12], "min_degree"));
    r.max_degree = static_cast<int>(parse_integer(f[13], "max_degree"));
    r.multi_pairs = parse_integer(f[14], "multi_pairs");
    r.triple_pairs = parse_integer(f[15], "triple_pairs");
    r.max_multiplicity = static_cast<int>(parse_integer(f[16], "max_multiplicity"));
    r.relators = parse_integer(f[17], "relators");
    const PEstimate e{parse_real(f[18], "p"), parse_real(f[19], "lambda"), f[20], f[21] == "1"};
    if (!out.empty() && out.back().cell == r.cell && out.back().trial == r.trial) {
      out.back().estimates.push_back(e);
    } else {
      r.estimates.push_back(e);
      out.push_back(std::move(r));
    }
  }
  return out;
}

std::vector<std::string> summary_header() {
  return {"cell", "m", "k", "M", "degree", "rho_value", "rho", "p", "count", "failed",
          "mean", "min", "max", "q10", "q50", "q90", "envelope"};
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
  write_row(out, summary_header());
  for (const SummaryRow& s : rows) {
    write_row(out, {std::to_string(s.cell), std::to_string(s.coords.m), std::to_string(s.coords.k),
                    std::to_string(s.coords.part_size), std::to_string(s.coords.degree), format_real(s.coords.rho_value),
                    format_real(s.rho), format_real(s.p), std::to_string(s.count), std::to_string(s.failed),
                    format_real(s.mean), format_real(s.min), format_real(s.max), format_real(s.q10), format_real(s.q50),
                    format_real(s.q90), s.envelope ? format_real(*s.envelope) : std::string()});
  }
}

std::vector<SummaryRow> read_summary_csv(std::istream& in) {
  std::string line;
  std::vector<SummaryRow> out;
  if (!std::getline(in, line)) return out;
  const auto header = summary_header();
  if (split_list(line, ',') != header) throw InputError("summary header does not match");
  while (std::getline(in, line)) {
    const auto f = split_list(line, ',');
    if (f.size() != header.size()) throw InputError("summary row has the wrong field count");
    SummaryRow s;
    s.cell = static_cast<int>(parse_integer(f[0], "cell"));
    s.coords = {static_cast<int>(parse_integer(f[1], "m")), static_cast<int>(parse_integer(f[2], "k")),
                static_cast<int>(parse_integer(f[3], "M")), static_cast<int>(parse_integer(f[4], "degree")),
                parse_real(f[5], "rho_value")};
    s.rho = parse_real(f[6], "rho");
    s.p = parse_real(f[7], "p");
    s.count = static_cast<int>(parse_integer(f[8], "count"));
    s.failed = static_cast<int>(parse_integer(f[9], "failed"));
    s.mean = parse_real(f[10], "mean");
    s.min = parse_real(f[11], "min");
    s.max = parse_real(f[12], "max");
    s.q10 = parse_real(f[13], "q10");
    s.q50 = parse_real(f[14], "q50");
    s.q90 = parse_real(f[15], "q90");
    if (!f[16].empty()) s.envelope = parse_real(f[16], "envelope");
    out.push_back(s);
  }
  return out;
}

bool summary_consistent(const ExperimentConfig& config, const std::vector<TrialRecord>& records,
                        const std::vector<SummaryRow>& rows) {
  std::ostringstream a;
  std::ostringstream b;
  write_summary_csv(a, summarize(config, records));
  write_summary_csv(b, rows);
  return a.str() == b.str();
}

std::string records_to_json(const std::vector<TrialRecord>& records) {
  using nlohmann::json;
  json arr = json::array();
  auto real = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
  for (const TrialRecord& r : records) {
    json est = json::array();
    for (const PEstimate& e : r.estimates) {
      est.push_back({{"p", e.p}, {"lambda", real(e.lambda)}, {"method", e.method}, {"converged", e.converged}});
    }
    arr.push_back({{"cell", r.cell},
                   {"trial", r.trial},
                   {"coords",
                    {{"m", r.coords.m},
                     {"k", r.coords.k},
                     {"M", r.coords.part_size},
                     {"degree", r.coords.degree},
                     {"rho_value", r.coords.rho_value}}},
                   {"rho", r.rho},
                   {"stream", r.stream},
                   {"status", r.status},
                   {"vertices", r.vertices},
                   {"edges", r.edges},
                   {"min_degree", r.min_degree},
                   {"max_degree", r.max_degree},
                   {"multi_pairs", r.multi_pairs},
                   {"triple_pairs", r.triple_pairs},
                   {"max_multiplicity", r.max_multiplicity},
                   {"relators", r.relators},
                   {"estimates", est},
                   {"wall_seconds", r.wall_seconds}});
  }
  return arr.dump(2);
}

std::vector<TrialRecord> records_from_json(const std::string& text) {
  using nlohmann::json;
  try {
    const json arr = json::parse(text);
    std::vector<TrialRecord> out;
    auto real = [](const json& v) { return v.is_null() ? kNaN : v.get<double>(); };
    for (const json& j : arr) {
      TrialRecord r;
      r.cell = j.at("cell").get<int>();
      r.trial = j.at("trial").get<int>();
      const json& c = j.at("coords");
      r.coords = {c.at("m").get<int>(), c.at("k").get<int>(), c.at("M").get<int>(), c.at("degree").get<int>(),
                  c.at("rho_value").get<double>()};
      r.rho = j.at("rho").get<double>();
      r.stream = j.at("stream").get<std::uint64_t>();
      r.status = j.at("status").get<std::string>();
      r.vertices = j.at("vertices").get<int>();
      r.edges = j.at("edges").get<long long>();
      r.min_degree = j.at("min_degree").get<int>();
      r.max_degree = j.at("max_degree").get<int>();
      r.multi_pairs = j.at("multi_pairs").get<long long>();
      r.triple_pairs = j.at("triple_pairs").get<long long>();
      r.max_multiplicity = j.at("max_multiplicity").get<int>();
      r.relators = j.at("relators").get<long long>();
      for (const json& e : j.at("estimates")) {
        r.estimates.push_back(
            {e.at("p").get<double>(), real(e.at("lambda")), e.at("method").get<std::string>(), e.at("converged").get<bool>()});
      }
      r.wall_seconds = j.at("wall_seconds").get<double>();
      out.push_back(std::move(r));
    }
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed records JSON: ") + e.what());
  }
}

ExperimentResult run_experiment(const ExperimentConfig& config, bool resume) {
  const auto cells = config.grid();
  if (cells.empty()) throw ConfigError("the parameter grid is empty");
  const int total = static_cast<int>(cells.size()) * config.trials;

  ExperimentResult result;
  std::vector<std::optional<TrialRecord>> slots(static_cast<std::size_t>(total));
  auto slot_of = [&](int cell, int trial) { return static_cast<std::size_t>(cell * config.trials + trial); };

  if (resume && !config.csv_path.empty() && std::filesystem::exists(config.csv_path)) {
    std::ifstream old(config.csv_path);
    for (TrialRecord& r : read_csv(old)) {
      if (r.cell < 0 || r.cell >= static_cast<int>(cells.size()) || r.trial < 0 || r.trial >= config.trials) continue;
      if (!(r.coords == cells[static_cast<std::size_t>(r.cell)])) {
        throw ConfigError("resume: " + config.csv_path + " was written for a different grid");
      }
      if (r.estimates.size() != config.p.size()) continue;  // cut off mid-trial
      bool same_p = true;
      for (std::size_t i = 0; i < config.p.size(); ++i) same_p = same_p && r.estimates[i].p == config.p[i];
      if (!same_p) throw ConfigError("resume: " + config.csv_path + " was written for a different p list");
      slots[slot_of(r.cell, r.trial)] = std::move(r);
      ++result.resumed_trials;
    }
  }

  std::ofstream csv;
  if (!config.csv_path.empty()) {
    csv.open(config.csv_path, std::ios::trunc);
    if (!csv) throw InputError("cannot write " + config.csv_path);
    write_row(csv, csv_header());
    csv.flush();
  }
  for (const std::string* path : {&config.json_path, &config.summary_path}) {
    if (path->empty()) continue;
    std::ofstream probe(*path, std::ios::app);
    if (!probe) throw InputError("cannot write " + *path);
  }

  std::vector<int> pending;
  for (int i = 0; i < total; ++i) {
    if (!slots[static_cast<std::size_t>(i)]) pending.push_back(i);
  }

  std::mutex mu;
  std::condition_variable ready;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= pending.size()) return;
      const int index = pending[i];
      TrialRecord rec = run_trial(config, index / config.trials, index % config.trials);
      {
        std::lock_guard lock(mu);
        slots[static_cast<std::size_t>(index)] = std::move(rec);
      }
      ready.notify_all();
    }
  };

  const int workers = std::min<int>(config.threads, std::max<int>(1, static_cast<int>(pending.size())));
  std::vector<std::jthread> pool;
  if (workers > 1) {
    for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
  }

  // Single collector: emit rows in (cell, trial) order as the prefix completes.
  for (int i = 0; i < total; ++i) {
    if (workers <= 1 && !slots[static_cast<std::size_t>(i)]) {
      slots[static_cast<std::size_t>(i)] = run_trial(config, i / config.trials, i % config.trials);
    }
    std::unique_lock lock(mu);
    ready.wait(lock, [&] { return slots[static_cast<std::size_t>(i)].has_value(); });
    const TrialRecord& rec = *slots[static_cast<std::size_t>(i)];
    lock.unlock();
    if (csv.is_open()) {
      write_record_rows(csv, rec);
      csv.flush();
    }
  }
  pool.clear();
  if (csv.is_open() && !csv) throw InputError("failed writing " + config.csv_path);

  for (auto& s : slots) {
    if (s->status != "ok") ++result.failed_trials;
    result.records.push_back(std::move(*s));
  }
  result.summary = summarize(config, result.records);
  if (!config.json_path.empty()) {
    std::ofstream out(config.json_path, std::ios::trunc);
    out << records_to_json(result.records) << '\n';
    if (!out) throw InputError("failed writing " + config.json_path);
  }
  if (!config.summary_path.empty()) {
    std::ofstream out(config.summary_path, std::ios::trunc);
    write_summary_csv(out, result.summary);
    if (!out) throw InputError("failed writing " + config.summary_path);
  }
  return result;
}

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace plap
