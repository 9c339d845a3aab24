#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "plap/graph.hpp"
#include "plap/rng.hpp"

namespace plap {

/// A generator or its inverse. Letters are ordered by generator index with
/// the uninverted letter first, which is the order of `code()`.
struct Letter {
  int generator = 0;
  bool inverted = false;

  Letter inverse() const { return {generator, !inverted}; }
  /// 2g for s_g, 2g+1 for s_g^{-1}; also the link-graph vertex of the letter.
  int code() const { return 2 * generator + (inverted ? 1 : 0); }
  static Letter from_code(int c) { return {c / 2, (c & 1) != 0}; }

  friend bool operator==(const Letter&, const Letter&) = default;
  friend auto operator<=>(const Letter& a, const Letter& b) { return a.code() <=> b.code(); }
};

using Word = std::vector<Letter>;

bool is_reduced(const Word& w);
/// Reduced, and the last letter is not the inverse of the first.
bool is_cyclically_reduced(const Word& w);
Word inverse(const Word& w);
/// Space-separated tokens: g3 for s_3, G3 for s_3^{-1}.
std::string to_string(const Word& w);
Word parse_word(const std::string& text);

enum class PresentationKind { triangular, gromov };

struct Presentation {
  int generators = 0;
  PresentationKind kind = PresentationKind::triangular;
  /// Relator length: 3 for triangular, l for gromov(l).
  int length = 3;
  std::vector<Word> relators;
};

/// Throws InputError unless every relator is cyclically reduced of the
/// declared length over the declared generators.
void validate(const Presentation& p);

/// Header "m <count> kind <triangular|gromov:l>", then one relator per line.
void write_presentation(std::ostream& out, const Presentation& p);
Presentation read_presentation(std::istream& in);
void write_presentation_file(const std::string& path, const Presentation& p);
Presentation read_presentation_file(const std::string& path);

/// Every cyclically reduced word of the given length, in lexicographic
/// order. Lengths above 3 are refused; use CyclicWordSpace instead.
std::vector<Word> enumerate_cyclically_reduced(int m, int length);

/// The cyclically reduced words of one length over k generators, ranked in
/// lexicographic order without materialising them.
class CyclicWordSpace {
 public:
  /// Throws SizeError when the word count does not fit in 64 bits.
  CyclicWordSpace(int generators, int length);

  int generators() const { return k_; }
  int length() const { return n_; }
  std::uint64_t size() const { return size_; }

  Word unrank(std::uint64_t rank) const;
  std::uint64_t rank(const Word& w) const;

 private:
  enum Relation { kSame = 0, kInverse = 1, kOther = 2 };
  // Completions of `remaining` more letters after a letter in relation
  // `rel` to the first letter, ending cyclically reduced.
  std::uint64_t ways(int remaining, int rel) const { return ways_[static_cast<std::size_t>(3 * remaining + rel)]; }
  static int relation(int code, int first) {
    if (code == first) return kSame;
    if (code == (first ^ 1)) return kInverse;
    return kOther;
  }

  int k_;
  int n_;
  std::vector<std::uint64_t> ways_;
  std::uint64_t size_ = 0;
};

/// Relator selection: each word independently with probability rho, or a
/// uniform subset of exactly `count` words.
struct SamplingMode {
  enum class Kind { binomial, density } kind = Kind::binomial;
  double rho = 0.0;
  std::uint64_t count = 0;

  static SamplingMode binomial(double rho) { return {Kind::binomial, rho, 0}; }
  static SamplingMode exact_count(std::uint64_t count) { return {Kind::density, 0.0, count}; }
};

/// round(base^exponent): the density-model relator count, e.g.
/// (2m-1)^{3d} for triangular presentations or (2k-1)^{dl} for Gromov's.
std::uint64_t density_relator_count(double base, double exponent);

/// Words of the space selected by `mode`, in lexicographic order. Binomial
/// mode jumps between included ranks with geometric skips; density mode
/// draws distinct ranks with Floyd's algorithm.
std::vector<Word> sample_words(const CyclicWordSpace& space, const SamplingMode& mode, RngSeed seed);

Presentation sample_triangular(int m, const SamplingMode& mode, RngSeed seed);
Presentation sample_gromov(int k, int l, const SamplingMode& mode, RngSeed seed);

/// q_n = ((2k-1)^{n+1} - 1) / 2k for odd n, ((2k-1)^{n+1} - (2k-1)) / 2k for even n.
std::uint64_t reduced_word_count_qn(int k, int n);
/// Number of reduced words of length n+2 starting with a and ending with b,
/// by exhaustive enumeration.
std::uint64_t count_completions(int k, Letter a, Letter b, int n);

/// Reduced words of the given length in lexicographic order.
std::vector<Word> enumerate_reduced(int k, int length);

struct GromovLift {
  /// Triangular presentation over |W_{l/3}|/2 generators.
  Presentation lifted;
  /// phi[g] is the block word of the lifted generator g; phi(g^{-1}) is its inverse.
  std::vector<Word> phi;
  /// For each link vertex (2g for g, 2g+1 for g^{-1}) the code of the initial
  /// letter of its phi-image: the partition S u S^{-1} = disjoint union of S_a.
  std::vector<int> part;
  /// (2k-1)^{l/3-1}
  int part_size = 0;

  Word phi_of(Letter s) const;
};

/// Splits each relator into three blocks of length l/3 and maps them to
/// lifted generators. Orbit representatives of w <-> w^{-1} are the
/// lexicographically smaller word.
GromovLift gromov_lift(const Presentation& p);

struct LinkGraph {
  /// On 2m vertices, vertex Letter::code().
  Multigraph base;
  /// 1, 2 or 3 per edge of `base`.
  std::vector<int> edge_class;
};

/// Relator xyz contributes (x^{-1}, y) to class 1, (y^{-1}, z) to class 2
/// and (z^{-1}, x) to class 3.
LinkGraph build_link_graph(const Presentation& p);
/// The class-i subgraph on the full vertex set.
Multigraph link_class(const LinkGraph& link, int cls);

/// A multigraph split into one copy of each adjacent pair plus the extra
/// copies.
struct SimpleSplit {
  Multigraph simple;
  Multigraph duplicates;
};
SimpleSplit split_duplicates(const Multigraph& g);

struct ClassStructure {
  long long edges = 0;
  /// Edges of the simple part (distinct adjacent pairs).
  long long simple_edges = 0;
  /// Pairs joined by two or more edges.
  long long multi_pairs = 0;
  /// Edges beyond the first copy per pair.
  long long duplicate_edges = 0;
  /// Pairs joined by three or more edges.
  long long triple_pairs = 0;
  int max_multiplicity = 0;
  /// The duplicate edges form a matching: no triple pairs and no two multi
  /// pairs share a vertex.
  bool duplicates_form_matching = true;
  /// Edges inside one part of a supplied vertex partition; -1 without one.
  long long within_part_edges = -1;
  int min_degree = 0;
  int max_degree = 0;
};

struct LinkStructureReport {
  ClassStructure classes[3];
  bool triple_edges_absent() const;
  bool all_matchings() const;
};

/// Expected number of vertex pairs joined by at least `min_multiplicity`
/// edges in one link class of a binomial triangular presentation: pairs
/// (u, v) with u != v^{-1} have 4m-4 candidate relators, pairs (u, u^{-1})
/// have 4m-2, each present independently with probability rho.
double expected_class_multi_pairs(int m, double rho, int min_multiplicity);

LinkStructureReport link_structure_report(const LinkGraph& link,
                                          const std::optional<std::vector<int>>& parts = std::nullopt);

}  // namespace plap
