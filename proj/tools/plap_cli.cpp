#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "plap/certificates.hpp"
#include "plap/errors.hpp"
#include "plap/experiment.hpp"
#include "plap/graph.hpp"
#include "plap/groups.hpp"
#include "plap/ks.hpp"
#include "plap/random_graphs.hpp"
#include "plap/rng.hpp"
#include "plap/solver.hpp"

using namespace plap;
using nlohmann::json;

namespace {

std::vector<int> read_ints(std::istream& in) {
  std::vector<int> out;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream row(line);
    int v = 0;
    while (row >> v) out.push_back(v);
    if (!row.eof()) throw InputError("non-integer entry in degree file");
  }
  return out;
}

std::vector<int> read_ints_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  return read_ints(in);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text << '\n';
  if (!out) throw InputError("cannot write " + path);
}

VertexFunction random_sphere_point(CounterRng& rng, const DegreeSequence& d, double p) {
  for (;;) {
    VertexFunction x(d.size());
    for (double& v : x) v = rng.normal();
    const auto centered = center_to_zero_p_mean(x, d, p);
    if (weighted_p_norm(centered.values, d, p) > 0.0) return normalize_to_sphere(centered.values, d, p);
  }
}

// ---- lambda ----------------------------------------------------------------

struct LambdaArgs {
  std::string graph;
  double p = 2.0;
  bool exact2 = false;
  SolverOptions solver;
  bool json = false;
};

int run_lambda(const LambdaArgs& a) {
  const Multigraph g = read_graph_file(a.graph);
  json out;
  if (a.exact2) {
    if (a.p != 2.0) throw ParameterError("--exact2 requires --p 2");
    out = {{"lambda", lambda_exact_p2(g)}, {"converged", true}, {"restarts_used", 0}, {"residual", 0.0},
           {"method", kMethodExact}};
  } else {
    const auto est = lambda_estimate(g, a.p, a.solver);
    out = {{"lambda", est.lambda},
           {"converged", est.converged},
           {"restarts_used", est.restarts_used},
           {"residual", est.residual},
           {"method", kMethodIterative}};
  }
  if (a.json) {
    std::cout << out.dump(2) << '\n';
  } else {
    std::cout << "lambda_{1," << a.p << "} = " << format_real(out["lambda"].get<double>()) << " ("
              << out["method"].get<std::string>() << (out["converged"].get<bool>() ? "" : ", not converged") << ")\n";
  }
  return 0;
}

// ---- gen-graph -------------------------------------------------------------

struct GenGraphArgs {
  std::string model;
  int m = 0;
  int k = 0;
  int part_size = 0;
  double rho = -1.0;
  std::string deg_file;
  std::uint64_t seed = 0;
  std::string out;
};

int run_gen_graph(const GenGraphArgs& a) {
  const RngSeed seed{a.seed, 0};
  json meta{{"model", a.model}, {"seed", a.seed}};
  Multigraph g;
  if (a.model == "er") {
    if (a.m < 1 || a.rho < 0.0) throw ParameterError("er needs --m and --rho");
    g = sample_er(a.m, a.rho, seed);
    meta["m"] = a.m;
    meta["rho"] = a.rho;
  } else if (a.model == "config") {
    if (a.deg_file.empty()) throw ParameterError("config needs --deg-file");
    g = sample_configuration(DegreeSequence(read_ints_file(a.deg_file)), seed).graph;
    meta["deg_file"] = a.deg_file;
  } else if (a.model == "multi-er") {
    if (a.k < 2 || a.part_size < 1 || a.rho < 0.0) throw ParameterError("multi-er needs --k, --M and --rho");
    g = sample_multipartite_er(a.k, a.part_size, a.rho, seed);
    meta["k"] = a.k;
    meta["M"] = a.part_size;
    meta["rho"] = a.rho;
  } else if (a.model == "multi-deg") {
    if (a.k < 2 || a.part_size < 1 || a.deg_file.empty()) throw ParameterError("multi-deg needs --k, --M and --deg-file");
    const auto flat = read_ints_file(a.deg_file);
    const auto rows = static_cast<std::size_t>(a.k) * static_cast<std::size_t>(a.part_size);
    if (flat.size() != rows * static_cast<std::size_t>(a.k)) {
      throw InputError("multi-deg degree file needs k*M rows of k entries");
    }
    std::vector<std::vector<int>> entries(rows);
    for (std::size_t u = 0; u < rows; ++u) {
      entries[u].assign(flat.begin() + static_cast<long>(u * static_cast<std::size_t>(a.k)),
                        flat.begin() + static_cast<long>((u + 1) * static_cast<std::size_t>(a.k)));
    }
    g = sample_multipartite_matching(DegreeMatrix(a.k, a.part_size, entries), seed);
    meta["k"] = a.k;
    meta["M"] = a.part_size;
    meta["deg_file"] = a.deg_file;
  } else {
    throw ParameterError("unknown model '" + a.model + "'");
  }
  write_graph_file(a.out, g);
  meta["vertices"] = g.vertex_count();
  meta["edges"] = g.edge_count();
  meta["min_degree"] = g.degrees().min();
  meta["max_degree"] = g.degrees().max();
  meta["simple"] = is_simple(g);
  write_text(a.out + ".json", meta.dump(2));
  return 0;
}

// ---- ks --------------------------------------------------------------------

struct KsArgs {
  std::string check;
  std::string params;
  long long samples = 1000;
  std::uint64_t seed = 0;
};

double param_real(const IniFile& ini, const std::string& key, double fallback) {
  const auto v = ini.get("", key);
  return v ? std::stod(*v) : fallback;
}

std::vector<int> param_degrees(const IniFile& ini) {
  const auto v = ini.get("", "degrees");
  if (!v) throw ParameterError("params file needs degrees = d1, d2, ...");
  std::string text = *v;
  for (char& c : text) {
    if (c == ',') c = ' ';
  }
  std::istringstream in(text);
  return read_ints(in);
}

int run_ks(const KsArgs& a) {
  IniFile ini;
  if (!a.params.empty()) {
    std::ifstream in(a.params);
    if (!in) throw InputError("cannot open " + a.params);
    ini = parse_ini(in);
  }
  json out{{"check", a.check}, {"samples", a.samples}, {"seed", a.seed}};
  bool ok = true;
  if (a.check == "inequalities") {
    const double lo = param_real(ini, "p_lo", 2.0);
    const double hi = param_real(ini, "p_hi", 6.0);
    const auto r = remainder_inequality_suite(a.samples, lo, hi, {a.seed, 0}, param_real(ini, "ab_range", 10.0));
    out["p_range"] = {lo, hi};
    out["samples_p3"] = r.samples_p3;
    out["violations"] = {{"bar_le_abs", r.violations_bar_le_abs},
                         {"abs_le_bar", r.violations_abs_le_bar},
                         {"tilde_le_abs", r.violations_tilde_le_abs},
                         {"abs_tilde", r.violations_abs_tilde},
                         {"r_le_p_tilde", r.violations_r_le_p_tilde}};
    out["tightest"] = {{"min_abs_over_bar", r.min_abs_over_bar},
                       {"max_abs_over_upper", r.max_abs_over_upper},
                       {"max_tilde_over_bar", r.max_tilde_over_bar},
                       {"max_r_over_p_tilde", r.max_r_over_p_tilde}};
    ok = r.violations() == 0;
  } else if (a.check == "net") {
    const DegreeSequence d(param_degrees(ini));
    const double p = param_real(ini, "p", 2.0);
    const double eps = param_real(ini, "epsilon", 0.5);
    const double theta = param_real(ini, "theta", d.ratio());
    const NetParams params(p, eps, theta, d);
    out["R"] = params.R();
    out["R_minus"] = params.R_minus();
    if (d.size() <= 4) {
      const auto net = net_enumerate_tiny(params);
      out["net_size"] = net.count;
      out["size_bound"] = net.size_bound;
      ok = ok && static_cast<double>(net.count) <= net.size_bound;
    }
    CounterRng rng({a.seed, 0});
    long long gap_violations = 0;
    long long norm_violations = 0;
    for (long long t = 0; t < a.samples; ++t) {
      const auto x = random_sphere_point(rng, d, p);
      const auto r = net_round(x, params);
      for (std::size_t i = 0; i < d.size(); ++i) {
        const double gap = std::fabs(signed_pow(x[i], p - 1) - signed_pow(r.x_prime[i], p - 1));
        if (gap > params.unit(static_cast<int>(i)) * (1 + 1e-12)) ++gap_violations;
      }
      const double norm = weighted_p_norm(r.x_prime, d, p);
      if (norm < params.R_minus() - 1e-12 || norm > params.R() + 1e-12) ++norm_violations;
    }
    out["gap_violations"] = gap_violations;
    out["norm_violations"] = norm_violations;
    ok = ok && gap_violations == 0 && norm_violations == 0;
  } else if (a.check == "decomposition") {
    const auto path = ini.get("", "graph");
    if (!path) throw ParameterError("params file needs graph = FILE");
    const Multigraph g = read_graph_file(*path);
    const double p = param_real(ini, "p", 2.0);
    CounterRng rng({a.seed, 0});
    double worst_defect = 0.0;
    double worst_split = 0.0;
    for (long long t = 0; t < a.samples; ++t) {
      const auto x = random_sphere_point(rng, g.degrees(), p);
      const auto dec = decompose_light_heavy(g, x, p, g.degrees().max());
      worst_defect = std::max(worst_defect, dec.identity_defect);
      worst_split = std::max(worst_split, std::fabs(dec.X - dec.X_l - dec.X_h));
    }
    out["beta"] = light_heavy_beta(p);
    out["max_identity_defect"] = worst_defect;
    out["max_split_defect"] = worst_split;
    ok = worst_defect <= 1e-9 && worst_split <= 1e-9;
  } else {
    throw ParameterError("--check must be inequalities, net or decomposition");
  }
  out["ok"] = ok;
  std::cout << out.dump(2) << '\n';
  return ok ? 0 : 1;
}

// ---- groups ----------------------------------------------------------------

struct GenGroupArgs {
  std::string model = "triangular";
  int m = 0;
  int k = 0;
  int l = 0;
  double rho = -1.0;
  double density = -1.0;
  std::uint64_t seed = 0;
  std::string out;
};

int run_gen_group(const GenGroupArgs& a) {
  if ((a.rho >= 0.0) == (a.density >= 0.0)) throw ParameterError("give exactly one of --rho and --density");
  Presentation p;
  if (a.model == "triangular") {
    if (a.m < 1) throw ParameterError("triangular needs --m");
    const auto mode = a.rho >= 0.0 ? SamplingMode::binomial(a.rho)
                                   : SamplingMode::exact_count(density_relator_count(2.0 * a.m - 1.0, 3.0 * a.density));
    p = sample_triangular(a.m, mode, {a.seed, 0});
  } else if (a.model == "gromov") {
    if (a.k < 1 || a.l < 3) throw ParameterError("gromov needs --k and --l >= 3");
    const auto mode = a.rho >= 0.0
                          ? SamplingMode::binomial(a.rho)
                          : SamplingMode::exact_count(density_relator_count(2.0 * a.k - 1.0, a.density * a.l));
    p = sample_gromov(a.k, a.l, mode, {a.seed, 0});
  } else {
    throw ParameterError("--model must be triangular or gromov");
  }
  if (a.out.empty()) {
    write_presentation(std::cout, p);
  } else {
    write_presentation_file(a.out, p);
  }
  std::cerr << p.relators.size() << " relators\n";
  return 0;
}

json class_json(const ClassStructure& c) {
  json j{{"edges", c.edges},
         {"simple_edges", c.simple_edges},
         {"multi_pairs", c.multi_pairs},
         {"duplicate_edges", c.duplicate_edges},
         {"triple_pairs", c.triple_pairs},
         {"max_multiplicity", c.max_multiplicity},
         {"duplicates_form_matching", c.duplicates_form_matching},
         {"min_degree", c.min_degree},
         {"max_degree", c.max_degree}};
  if (c.within_part_edges >= 0) j["within_part_edges"] = c.within_part_edges;
  return j;
}

struct LinkArgs {
  std::string group;
  bool classes = false;
  bool lambda = false;
  std::string out;
};

int run_link(const LinkArgs& a) {
  const Presentation p = read_presentation_file(a.group);
  const LinkGraph link = build_link_graph(p);
  json out{{"vertices", link.base.vertex_count()}, {"edges", link.base.edge_count()}};
  if (a.lambda) out["lambda_1_2"] = lambda_exact_p2(link.base);
  if (a.classes) {
    const auto rep = link_structure_report(link);
    out["classes"] = json::array();
    for (int i = 0; i < 3; ++i) {
      json c = class_json(rep.classes[i]);
      if (a.lambda) c["lambda_1_2"] = lambda_exact_p2(link_class(link, i + 1));
      out["classes"].push_back(c);
    }
    out["triple_edges_absent"] = rep.triple_edges_absent();
    out["duplicates_form_matchings"] = rep.all_matchings();
  }
  if (!a.out.empty()) {
    write_graph_file(a.out, link.base);
    if (a.classes) {
      for (int i = 1; i <= 3; ++i) write_graph_file(a.out + ".class" + std::to_string(i), link_class(link, i));
    }
  }
  std::cout << out.dump(2) << '\n';
  return 0;
}

struct LiftArgs {
  std::string group;
  std::string out;
};

int run_lift(const LiftArgs& a) {
  const GromovLift lift = gromov_lift(read_presentation_file(a.group));
  if (!a.out.empty()) write_presentation_file(a.out, lift.lifted);
  json phi = json::array();
  for (const Word& w : lift.phi) phi.push_back(to_string(w));
  const json out{{"generators", lift.lifted.generators},
                 {"relators", lift.lifted.relators.size()},
                 {"part_size", lift.part_size},
                 {"part", lift.part},
                 {"phi", phi}};
  std::cout << out.dump(2) << '\n';
  return 0;
}

// ---- certify ---------------------------------------------------------------

struct CertifyArgs {
  std::string links;
  double p = 2.0;
  double epsilon = 0.2;
  std::string property = "flp";
  SolverOptions solver;
};

// The links file lists one graph file per line, relative to its own directory.
int run_certify(const CertifyArgs& a) {
  std::ifstream in(a.links);
  if (!in) throw InputError("cannot open " + a.links);
  const auto dir = std::filesystem::path(a.links).parent_path();
  std::vector<Evidence> evidence;
  int max_vertices = 0;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream row(line);
    std::string name;
    if (!(row >> name)) continue;
    const auto path = std::filesystem::path(name).is_absolute() ? std::filesystem::path(name) : dir / name;
    const Multigraph g = read_graph_file(path.string());
    max_vertices = std::max(max_vertices, g.vertex_count());
    const bool p2 = a.property == "kazhdan" || a.p == 2.0;
    if (p2) {
      evidence.push_back({name, lambda_exact_p2(g), kMethodExact});
    } else {
      evidence.push_back({name, lambda_estimate(g, a.p, a.solver).lambda, kMethodIterative});
    }
  }
  Certificate c;
  if (a.property == "flp") {
    c = flp_certificate(evidence, a.p, a.epsilon, max_vertices);
  } else if (a.property == "kazhdan") {
    c = kazhdan_certificate(evidence);
  } else {
    throw ParameterError("--property must be flp or kazhdan");
  }
  std::cout << to_json(c) << '\n';
  return c.issued ? 0 : 1;
}

// ---- experiment ------------------------------------------------------------

struct ExperimentArgs {
  std::string config;
  int threads = 0;
  bool resume = false;
};

int run_experiment_cmd(const ExperimentArgs& a) {
  ExperimentConfig c = load_experiment_config(a.config);
  if (a.threads > 0) c.threads = a.threads;
  const auto result = run_experiment(c, a.resume);
  std::cerr << result.records.size() << " trials (" << result.resumed_trials << " resumed, " << result.failed_trials
            << " failed)\n";
  return result.failed_trials == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"p-Laplacian spectra of random graphs and links of random groups"};
  app.require_subcommand(1);

  LambdaArgs lambda;
  auto* cmd_lambda = app.add_subcommand("lambda", "first nontrivial p-Laplacian eigenvalue of a graph");
  cmd_lambda->add_option("--graph", lambda.graph, "graph file")->required();
  cmd_lambda->add_option("--p", lambda.p, "exponent p >= 1.5");
  cmd_lambda->add_flag("--exact2", lambda.exact2, "exact p = 2 eigensolver");
  cmd_lambda->add_option("--restarts", lambda.solver.restarts, "random restarts");
  cmd_lambda->add_option("--max-iters", lambda.solver.max_iters, "iterations per restart");
  cmd_lambda->add_option("--seed", lambda.solver.seed, "solver seed");
  cmd_lambda->add_option("--threads", lambda.solver.threads, "threads over restarts");
  cmd_lambda->add_flag("--json", lambda.json, "JSON output");

  GenGraphArgs gen;
  auto* cmd_gen = app.add_subcommand("gen-graph", "sample a random graph");
  cmd_gen->add_option("--model", gen.model, "er | config | multi-er | multi-deg")->required();
  cmd_gen->add_option("--m", gen.m, "vertex count");
  cmd_gen->add_option("--k", gen.k, "number of parts");
  cmd_gen->add_option("--M", gen.part_size, "part size");
  cmd_gen->add_option("--rho", gen.rho, "edge probability");
  cmd_gen->add_option("--deg-file", gen.deg_file, "degree sequence or per-part degree table");
  cmd_gen->add_option("--seed", gen.seed, "seed");
  cmd_gen->add_option("--out", gen.out, "output graph file (metadata goes to FILE.json)")->required();

  KsArgs ks;
  auto* cmd_ks = app.add_subcommand("ks", "concentration-machinery diagnostics");
  cmd_ks->add_option("--check", ks.check, "inequalities | net | decomposition")->required();
  cmd_ks->add_option("--params", ks.params, "key = value parameter file");
  cmd_ks->add_option("--samples", ks.samples, "random samples");
  cmd_ks->add_option("--seed", ks.seed, "seed");

  GenGroupArgs group;
  auto* cmd_group = app.add_subcommand("gen-group", "sample a random group presentation");
  cmd_group->add_option("--model", group.model, "triangular | gromov");
  cmd_group->add_option("--m", group.m, "generators (triangular)");
  cmd_group->add_option("--k", group.k, "generators (gromov)");
  cmd_group->add_option("--l", group.l, "relator length (gromov)");
  cmd_group->add_option("--rho", group.rho, "binomial inclusion probability");
  cmd_group->add_option("--density", group.density, "density d of the exact-count model");
  cmd_group->add_option("--seed", group.seed, "seed");
  cmd_group->add_option("--out", group.out, "output presentation file (default stdout)");

  LinkArgs link;
  auto* cmd_link = app.add_subcommand("link", "link graph of a triangular presentation");
  cmd_link->add_option("--group", link.group, "presentation file")->required();
  cmd_link->add_flag("--classes", link.classes, "per-class multiplicity structure");
  cmd_link->add_flag("--lambda", link.lambda, "also report lambda_{1,2}");
  cmd_link->add_option("--out", link.out, "write the link graph (and FILE.classN with --classes)");

  LiftArgs lift;
  auto* cmd_lift = app.add_subcommand("lift", "triangular lift of a Gromov presentation");
  cmd_lift->add_option("--group", lift.group, "presentation file")->required();
  cmd_lift->add_option("--out", lift.out, "output lifted presentation");

  CertifyArgs cert;
  auto* cmd_cert = app.add_subcommand("certify", "fixed-point certificate from link eigenvalues");
  cmd_cert->add_option("--links", cert.links, "file listing link graph files")->required();
  cmd_cert->add_option("--p", cert.p, "exponent p >= 2");
  cmd_cert->add_option("--epsilon", cert.epsilon, "epsilon in (0, 1/2)");
  cmd_cert->add_option("--property", cert.property, "flp | kazhdan");
  cmd_cert->add_option("--seed", cert.solver.seed, "solver seed for p != 2");

  ExperimentArgs exp;
  auto* cmd_exp = app.add_subcommand("experiment", "run a parameter sweep");
  cmd_exp->add_option("--config", exp.config, "experiment config")->required();
  cmd_exp->add_option("--threads", exp.threads, "worker threads (overrides the config)");
  cmd_exp->add_flag("--resume", exp.resume, "keep trials already in the CSV");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*cmd_lambda) return run_lambda(lambda);
    if (*cmd_gen) return run_gen_graph(gen);
    if (*cmd_ks) return run_ks(ks);
    if (*cmd_group) return run_gen_group(group);
    if (*cmd_link) return run_link(link);
    if (*cmd_lift) return run_lift(lift);
    if (*cmd_cert) return run_certify(cert);
    if (*cmd_exp) return run_experiment_cmd(exp);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
