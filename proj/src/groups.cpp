#include "plap/groups.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_set>

#include "plap/errors.hpp"

namespace plap {

namespace {

std::uint64_t checked_add(std::uint64_t a, std::uint64_t b) {
  std::uint64_t out = 0;
  if (__builtin_add_overflow(a, b, &out)) throw SizeError("word count exceeds 64 bits");
  return out;
}

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
  std::uint64_t out = 0;
  if (__builtin_mul_overflow(a, b, &out)) throw SizeError("word count exceeds 64 bits");
  return out;
}

std::uint64_t ipow(std::uint64_t base, int exponent) {
  std::uint64_t out = 1;
  for (int i = 0; i < exponent; ++i) out = checked_mul(out, base);
  return out;
}

// Word codes as one base-2k integer; lexicographic order of equal-length
// words matches numeric order.
std::uint64_t encode(const Word& w, int k) {
  std::uint64_t v = 0;
  for (const Letter& x : w) v = v * static_cast<std::uint64_t>(2 * k) + static_cast<std::uint64_t>(x.code());
  return v;
}

void check_word_shape(const Word& w, int generators, int length, const char* what) {
  if (static_cast<int>(w.size()) != length) {
    throw InputError(std::string(what) + ": word " + to_string(w) + " has the wrong length");
  }
  for (const Letter& x : w) {
    if (x.generator < 0 || x.generator >= generators) {
      throw InputError(std::string(what) + ": generator out of range in " + to_string(w));
    }
  }
  if (!is_cyclically_reduced(w)) {
    throw InputError(std::string(what) + ": word " + to_string(w) + " is not cyclically reduced");
  }
}

}  // namespace

bool is_reduced(const Word& w) {
  for (std::size_t i = 1; i < w.size(); ++i) {
    if (w[i] == w[i - 1].inverse()) return false;
  }
  return true;
}

bool is_cyclically_reduced(const Word& w) {
  if (!is_reduced(w)) return false;
  return w.size() < 2 || w.front() != w.back().inverse();
}

Word inverse(const Word& w) {
  Word out;
  out.reserve(w.size());
  for (auto it = w.rbegin(); it != w.rend(); ++it) out.push_back(it->inverse());
  return out;
}

std::string to_string(const Word& w) {
  std::string out;
  for (const Letter& x : w) {
    if (!out.empty()) out += ' ';
    out += x.inverted ? 'G' : 'g';
    out += std::to_string(x.generator);
  }
  return out;
}

Word parse_word(const std::string& text) {
  std::istringstream in(text);
  Word w;
  std::string token;
  while (in >> token) {
    if (token.size() < 2 || (token[0] != 'g' && token[0] != 'G') ||
        !std::all_of(token.begin() + 1, token.end(), [](char c) { return c >= '0' && c <= '9'; })) {
      throw InputError("bad generator token '" + token + "'");
    }
    w.push_back({std::stoi(token.substr(1)), token[0] == 'G'});
  }
  return w;
}

void validate(const Presentation& p) {
  if (p.generators < 1) throw InputError("presentation needs at least one generator");
  if (p.kind == PresentationKind::triangular && p.length != 3) {
    throw InputError("triangular presentations have relators of length 3");
  }
  for (const Word& r : p.relators) check_word_shape(r, p.generators, p.length, "presentation");
}

void write_presentation(std::ostream& out, const Presentation& p) {
  out << "m " << p.generators << " kind ";
  if (p.kind == PresentationKind::triangular) {
    out << "triangular\n";
  } else {
    out << "gromov:" << p.length << '\n';
  }
  for (const Word& r : p.relators) out << to_string(r) << '\n';
}

Presentation read_presentation(std::istream& in) {
  Presentation p;
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (!have_header) {
      std::istringstream hs(line);
      std::string m_tag;
      std::string kind_tag;
      std::string kind;
      if (!(hs >> m_tag >> p.generators >> kind_tag >> kind) || m_tag != "m" || kind_tag != "kind") {
        throw InputError("presentation header must read 'm <count> kind <triangular|gromov:l>'");
      }
      if (kind == "triangular") {
        p.kind = PresentationKind::triangular;
        p.length = 3;
      } else if (kind.rfind("gromov:", 0) == 0) {
        p.kind = PresentationKind::gromov;
        try {
          p.length = std::stoi(kind.substr(7));
        } catch (const std::exception&) {
          throw InputError("bad relator length in '" + kind + "'");
        }
      } else {
        throw InputError("unknown presentation kind '" + kind + "'");
      }
      have_header = true;
      continue;
    }
    p.relators.push_back(parse_word(line));
  }
  if (!have_header) throw InputError("presentation file has no header");
  validate(p);
  return p;
}

void write_presentation_file(const std::string& path, const Presentation& p) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot open " + path + " for writing");
  write_presentation(out, p);
  if (!out) throw InputError("failed writing " + path);
}

Presentation read_presentation_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  return read_presentation(in);
}

std::vector<Word> enumerate_cyclically_reduced(int m, int length) {
  if (m < 1) throw ParameterError("enumerate_cyclically_reduced needs m >= 1");
  if (length < 1) throw ParameterError("enumerate_cyclically_reduced needs length >= 1");
  if (length > 3) throw SizeError("enumerate_cyclically_reduced stops at length 3; use CyclicWordSpace");
  const int letters = 2 * m;
  if (std::pow(static_cast<double>(letters), length) > 1e7) {
    throw SizeError("enumerate_cyclically_reduced: more than 1e7 words; use CyclicWordSpace");
  }
  std::vector<Word> out;
  Word w(static_cast<std::size_t>(length));
  std::vector<int> code(static_cast<std::size_t>(length), 0);
  for (;;) {
    for (int i = 0; i < length; ++i) w[static_cast<std::size_t>(i)] = Letter::from_code(code[static_cast<std::size_t>(i)]);
    if (is_cyclically_reduced(w)) out.push_back(w);
    int i = length - 1;
    while (i >= 0 && code[static_cast<std::size_t>(i)] == letters - 1) code[static_cast<std::size_t>(i--)] = 0;
    if (i < 0) break;
    ++code[static_cast<std::size_t>(i)];
  }
  return out;
}

std::vector<Word> enumerate_reduced(int k, int length) {
  if (k < 1 || length < 1) throw ParameterError("enumerate_reduced needs k >= 1 and length >= 1");
  if (std::pow(2.0 * k, length) > 1e8) throw SizeError("enumerate_reduced: word space too large");
  std::vector<Word> out;
  Word w;
  auto extend = [&](auto&& self) -> void {
    if (static_cast<int>(w.size()) == length) {
      out.push_back(w);
      return;
    }
    for (int c = 0; c < 2 * k; ++c) {
      const Letter x = Letter::from_code(c);
      if (!w.empty() && x == w.back().inverse()) continue;
      w.push_back(x);
      self(self);
      w.pop_back();
    }
  };
  extend(extend);
  return out;
}

CyclicWordSpace::CyclicWordSpace(int generators, int length) : k_(generators), n_(length) {
  if (k_ < 1) throw ParameterError("CyclicWordSpace needs at least one generator");
  if (n_ < 1) throw ParameterError("CyclicWordSpace needs length >= 1");
  const std::uint64_t twice_k_minus_2 = static_cast<std::uint64_t>(2 * k_ - 2);
  const std::uint64_t twice_k_minus_3 = k_ >= 2 ? static_cast<std::uint64_t>(2 * k_ - 3) : 0;
  ways_.assign(static_cast<std::size_t>(3 * n_), 0);
  ways_[kSame] = 1;
  ways_[kInverse] = 0;
  ways_[kOther] = 1;
  for (int r = 1; r < n_; ++r) {
    const std::uint64_t same = ways(r - 1, kSame);
    const std::uint64_t inv = ways(r - 1, kInverse);
    const std::uint64_t other = ways(r - 1, kOther);
    auto& row = ways_;
    const auto at = static_cast<std::size_t>(3 * r);
    row[at + kSame] = checked_add(same, checked_mul(twice_k_minus_2, other));
    row[at + kInverse] = checked_add(inv, checked_mul(twice_k_minus_2, other));
    row[at + kOther] = checked_add(checked_add(same, inv), checked_mul(twice_k_minus_3, other));
  }
  size_ = checked_mul(static_cast<std::uint64_t>(2 * k_), ways(n_ - 1, kSame));
}

namespace {

// Total weight of the admissible letters below y at a position with
// `remaining` letters still to follow, where `first` is the first letter
// and `prev` the previous one. Every other letter has the same weight.
struct Weights {
  std::uint64_t same;
  std::uint64_t inverse;
  std::uint64_t other;
};

std::uint64_t weight_below(int y, int first, int prev, const Weights& w) {
  const int banned = prev ^ 1;
  const int inv_first = first ^ 1;
  std::uint64_t others = static_cast<std::uint64_t>(y);
  std::uint64_t total = 0;
  if (first < y) {
    --others;
    if (first != banned) total += w.same;
  }
  if (inv_first < y) {
    --others;
    if (inv_first != banned) total += w.inverse;
  }
  if (banned < y && banned != first && banned != inv_first) --others;
  return total + others * w.other;
}

}  // namespace

Word CyclicWordSpace::unrank(std::uint64_t rank) const {
  if (rank >= size_) throw ParameterError("CyclicWordSpace::unrank: rank out of range");
  Word w(static_cast<std::size_t>(n_));
  const std::uint64_t per_first = ways(n_ - 1, kSame);
  const int first = static_cast<int>(rank / per_first);
  rank %= per_first;
  w[0] = Letter::from_code(first);
  int prev = first;
  for (int pos = 1; pos < n_; ++pos) {
    const int remaining = n_ - 1 - pos;
    const Weights wt{ways(remaining, kSame), ways(remaining, kInverse), ways(remaining, kOther)};
    // Largest y with weight_below(y) <= rank; weight_below is nondecreasing.
    int lo = 0;
    int hi = 2 * k_ - 1;
    while (lo < hi) {
      const int mid = lo + (hi - lo + 1) / 2;
      if (weight_below(mid, first, prev, wt) <= rank) {
        lo = mid;
      } else {
        hi = mid - 1;
      }
    }
    // Skip back over zero-weight letters so the chosen one is admissible.
    int y = lo;
    auto weight_of = [&](int c) -> std::uint64_t {
      if (c == (prev ^ 1)) return 0;
      const int rel = relation(c, first);
      return rel == kSame ? wt.same : rel == kInverse ? wt.inverse : wt.other;
    };
    while (weight_of(y) == 0 || weight_below(y, first, prev, wt) > rank) --y;
    rank -= weight_below(y, first, prev, wt);
    w[static_cast<std::size_t>(pos)] = Letter::from_code(y);
    prev = y;
  }
  return w;
}

std::uint64_t CyclicWordSpace::rank(const Word& w) const {
  check_word_shape(w, k_, n_, "CyclicWordSpace::rank");
  const int first = w[0].code();
  std::uint64_t r = static_cast<std::uint64_t>(first) * ways(n_ - 1, kSame);
  int prev = first;
  for (int pos = 1; pos < n_; ++pos) {
    const int remaining = n_ - 1 - pos;
    const Weights wt{ways(remaining, kSame), ways(remaining, kInverse), ways(remaining, kOther)};
    const int y = w[static_cast<std::size_t>(pos)].code();
    r += weight_below(y, first, prev, wt);
    prev = y;
  }
  return r;
}

std::uint64_t density_relator_count(double base, double exponent) {
  if (!(base >= 1.0) || !std::isfinite(exponent)) throw ParameterError("density_relator_count: bad base or exponent");
  const double v = std::pow(base, exponent);
  if (!(v < 1.8e19)) throw SizeError("density_relator_count: count exceeds 64 bits");
  return static_cast<std::uint64_t>(std::llround(v));
}

std::vector<Word> sample_words(const CyclicWordSpace& space, const SamplingMode& mode, RngSeed seed) {
  CounterRng rng(seed);
  std::vector<Word> out;
  const std::uint64_t n = space.size();
  if (mode.kind == SamplingMode::Kind::binomial) {
    if (!(mode.rho >= 0.0 && mode.rho <= 1.0)) throw ParameterError("sampling rho must lie in [0, 1]");
    if (mode.rho == 0.0) return out;
    std::uint64_t pos = 0;
    for (;;) {
      const double skip = rng.geometric_skip(mode.rho);
      if (skip >= static_cast<double>(n - pos)) break;
      pos += static_cast<std::uint64_t>(skip);
      if (pos >= n) break;
      out.push_back(space.unrank(pos));
      if (++pos >= n) break;
    }
    return out;
  }
  if (mode.count > n) throw ParameterError("sampling count exceeds the number of cyclically reduced words");
  // Floyd's algorithm: a uniform subset of `count` distinct ranks.
  std::unordered_set<std::uint64_t> chosen;
  chosen.reserve(static_cast<std::size_t>(mode.count) * 2);
  for (std::uint64_t j = n - mode.count; j < n; ++j) {
    const std::uint64_t t = rng.below(j + 1);
    if (!chosen.insert(t).second) chosen.insert(j);
  }
  std::vector<std::uint64_t> ranks(chosen.begin(), chosen.end());
  std::sort(ranks.begin(), ranks.end());
  out.reserve(ranks.size());
  for (std::uint64_t r : ranks) out.push_back(space.unrank(r));
  return out;
}

Presentation sample_triangular(int m, const SamplingMode& mode, RngSeed seed) {
  const CyclicWordSpace space(m, 3);
  return {m, PresentationKind::triangular, 3, sample_words(space, mode, seed)};
}

Presentation sample_gromov(int k, int l, const SamplingMode& mode, RngSeed seed) {
  if (l < 3) throw ParameterError("sample_gromov needs l >= 3");
  const CyclicWordSpace space(k, l);
  return {k, PresentationKind::gromov, l, sample_words(space, mode, seed)};
}

std::uint64_t reduced_word_count_qn(int k, int n) {
  if (k < 1 || n < 1) throw ParameterError("reduced_word_count_qn needs k >= 1 and n >= 1");
  const std::uint64_t b = static_cast<std::uint64_t>(2 * k - 1);
  const std::uint64_t top = ipow(b, n + 1);
  return (n % 2 == 1 ? top - 1 : top - b) / static_cast<std::uint64_t>(2 * k);
}

std::uint64_t count_completions(int k, Letter a, Letter b, int n) {
  if (k < 1 || n < 0) throw ParameterError("count_completions needs k >= 1 and n >= 0");
  if (a.generator >= k || b.generator >= k || a.generator < 0 || b.generator < 0) {
    throw ParameterError("count_completions: letter outside the alphabet");
  }
  if (std::pow(2.0 * k - 1.0, n) > 1e9) throw SizeError("count_completions: enumeration too large");
  std::uint64_t count = 0;
  // Depth-first over the n middle letters.
  auto extend = [&](auto&& self, Letter prev, int left) -> void {
    if (left == 0) {
      if (b != prev.inverse()) ++count;
      return;
    }
    for (int c = 0; c < 2 * k; ++c) {
      const Letter x = Letter::from_code(c);
      if (x == prev.inverse()) continue;
      self(self, x, left - 1);
    }
  };
  extend(extend, a, n);
  return count;
}

Word GromovLift::phi_of(Letter s) const {
  const Word& w = phi.at(static_cast<std::size_t>(s.generator));
  return s.inverted ? inverse(w) : w;
}

GromovLift gromov_lift(const Presentation& p) {
  if (p.length % 3 != 0) throw ParameterError("gromov_lift needs the relator length divisible by 3");
  validate(p);
  const int k = p.generators;
  const int block = p.length / 3;
  const auto words = enumerate_reduced(k, block);
  std::vector<std::uint64_t> keys;
  keys.reserve(words.size());
  for (const Word& w : words) keys.push_back(encode(w, k));

  GromovLift out;
  std::vector<Letter> letter_of(words.size());
  std::vector<int> generator_of(words.size(), -1);
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (words[i] < inverse(words[i])) {
      generator_of[i] = static_cast<int>(out.phi.size());
      out.phi.push_back(words[i]);
    }
  }
  auto index_of = [&](const Word& w) {
    const auto it = std::lower_bound(keys.begin(), keys.end(), encode(w, k));
    return static_cast<std::size_t>(it - keys.begin());
  };
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (generator_of[i] >= 0) {
      letter_of[i] = {generator_of[i], false};
    } else {
      letter_of[i] = {generator_of[index_of(inverse(words[i]))], true};
    }
  }
  const int s = static_cast<int>(out.phi.size());
  out.part.resize(static_cast<std::size_t>(2 * s));
  for (int g = 0; g < s; ++g) {
    out.part[static_cast<std::size_t>(2 * g)] = out.phi[static_cast<std::size_t>(g)].front().code();
    out.part[static_cast<std::size_t>(2 * g + 1)] = out.phi[static_cast<std::size_t>(g)].back().inverse().code();
  }
  out.part_size = static_cast<int>(ipow(static_cast<std::uint64_t>(2 * k - 1), block - 1));

  out.lifted.generators = s;
  out.lifted.kind = PresentationKind::triangular;
  out.lifted.length = 3;
  out.lifted.relators.reserve(p.relators.size());
  for (const Word& r : p.relators) {
    Word lifted;
    for (int b = 0; b < 3; ++b) {
      const Word piece(r.begin() + b * block, r.begin() + (b + 1) * block);
      lifted.push_back(letter_of[index_of(piece)]);
    }
    out.lifted.relators.push_back(std::move(lifted));
  }
  return out;
}

LinkGraph build_link_graph(const Presentation& p) {
  if (p.generators < 1) throw InputError("build_link_graph: presentation has no generators");
  std::vector<Edge> edges;
  LinkGraph out;
  edges.reserve(3 * p.relators.size());
  out.edge_class.reserve(3 * p.relators.size());
  for (const Word& r : p.relators) {
    if (r.size() != 3) throw InputError("build_link_graph: relator " + to_string(r) + " is not of length 3");
    for (const Letter& x : r) {
      if (x.generator < 0 || x.generator >= p.generators) {
        throw InputError("build_link_graph: generator out of range in " + to_string(r));
      }
    }
    for (int i = 0; i < 3; ++i) {
      const Letter x = r[static_cast<std::size_t>(i)];
      const Letter y = r[static_cast<std::size_t>((i + 1) % 3)];
      edges.push_back({x.inverse().code(), y.code()});
      out.edge_class.push_back(i + 1);
    }
  }
  out.base = Multigraph(2 * p.generators, std::move(edges));
  return out;
}

Multigraph link_class(const LinkGraph& link, int cls) {
  if (cls < 1 || cls > 3) throw ParameterError("link classes are numbered 1, 2, 3");
  std::vector<Edge> edges;
  const auto all = link.base.edges();
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (link.edge_class[i] == cls) edges.push_back(all[i]);
  }
  return Multigraph(link.base.vertex_count(), std::move(edges));
}

SimpleSplit split_duplicates(const Multigraph& g) {
  std::map<std::pair<int, int>, int> seen;
  std::vector<Edge> simple;
  std::vector<Edge> dup;
  for (const Edge& e : g.edges()) {
    const auto key = std::minmax(e.tail, e.head);
    if (seen[{key.first, key.second}]++ == 0) {
      simple.push_back(e);
    } else {
      dup.push_back(e);
    }
  }
  return {Multigraph(g.vertex_count(), std::move(simple)), Multigraph(g.vertex_count(), std::move(dup))};
}

bool LinkStructureReport::triple_edges_absent() const {
  return std::all_of(std::begin(classes), std::end(classes), [](const ClassStructure& c) { return c.triple_pairs == 0; });
}

bool LinkStructureReport::all_matchings() const {
  return std::all_of(std::begin(classes), std::end(classes),
                     [](const ClassStructure& c) { return c.duplicates_form_matching; });
}

LinkStructureReport link_structure_report(const LinkGraph& link, const std::optional<std::vector<int>>& parts) {
  const int n = link.base.vertex_count();
  if (parts && static_cast<int>(parts->size()) != n) {
    throw DimensionError("link_structure_report: partition length does not match vertex count");
  }
  LinkStructureReport rep;
  for (int cls = 1; cls <= 3; ++cls) {
    const Multigraph g = link_class(link, cls);
    ClassStructure& c = rep.classes[cls - 1];
    c.edges = static_cast<long long>(g.edge_count());
    std::vector<std::pair<int, int>> pairs;
    pairs.reserve(g.edge_count());
    for (const Edge& e : g.edges()) pairs.push_back(std::minmax(e.tail, e.head));
    std::sort(pairs.begin(), pairs.end());
    std::vector<int> multi_touch(static_cast<std::size_t>(n), 0);
    for (std::size_t i = 0; i < pairs.size();) {
      std::size_t j = i;
      while (j < pairs.size() && pairs[j] == pairs[i]) ++j;
      const int mult = static_cast<int>(j - i);
      ++c.simple_edges;
      c.max_multiplicity = std::max(c.max_multiplicity, mult);
      if (mult >= 2) {
        ++c.multi_pairs;
        c.duplicate_edges += mult - 1;
        if (++multi_touch[static_cast<std::size_t>(pairs[i].first)] > 1) c.duplicates_form_matching = false;
        if (pairs[i].second != pairs[i].first && ++multi_touch[static_cast<std::size_t>(pairs[i].second)] > 1) {
          c.duplicates_form_matching = false;
        }
      }
      if (mult >= 3) {
        ++c.triple_pairs;
        c.duplicates_form_matching = false;
      }
      i = j;
    }
    if (parts) {
      c.within_part_edges = 0;
      for (const Edge& e : g.edges()) {
        if ((*parts)[static_cast<std::size_t>(e.tail)] == (*parts)[static_cast<std::size_t>(e.head)]) ++c.within_part_edges;
      }
    }
    if (n > 0) {
      c.min_degree = g.degrees().min();
      c.max_degree = g.degrees().max();
    }
  }
  return rep;
}

double expected_class_multi_pairs(int m, double rho, int min_multiplicity) {
  if (m < 1) throw ParameterError("expected_class_multi_pairs needs m >= 1");
  if (!(rho >= 0.0 && rho <= 1.0)) throw ParameterError("expected_class_multi_pairs: rho must lie in [0, 1]");
  // Upper binomial tail, summed term by term to avoid cancellation.
  auto tail = [&](int n, int t) {
    if (t <= 0) return 1.0;
    if (rho == 0.0 || t > n) return 0.0;
    if (rho == 1.0) return 1.0;
    double s = 0.0;
    for (int j = t; j <= n; ++j) {
      s += std::exp(std::lgamma(n + 1.0) - std::lgamma(j + 1.0) - std::lgamma(n - j + 1.0) + j * std::log(rho) +
                    (n - j) * std::log1p(-rho));
    }
    return s;
  };
  const double n = 2.0 * m;
  const double generic_pairs = n * (n - 1.0) / 2.0 - m;
  return generic_pairs * tail(4 * m - 4, min_multiplicity) + m * tail(4 * m - 2, min_multiplicity);
}

}  // namespace plap
