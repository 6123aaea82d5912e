#ifndef RAUZYLAB_RAUZY_HPP
#define RAUZYLAB_RAUZY_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rauzylab/bigmat.hpp"

namespace rauzylab {

// Ordered alphabet of d distinct uppercase letters. Letter indices are fixed
// globally so cocycle matrices over a whole Rauzy class share one basis.
class Alphabet {
 public:
  Alphabet() = default;
  explicit Alphabet(std::vector<char> letters);

  std::size_t size() const { return letters_.size(); }
  char letter(std::size_t idx) const { return letters_[idx]; }
  std::size_t index(char letter) const;
  const std::vector<char>& letters() const { return letters_; }

  bool operator==(const Alphabet& o) const { return letters_ == o.letters_; }

 private:
  std::vector<char> letters_;
};

enum class MoveType : std::uint8_t { Top, Bottom };

inline MoveType other(MoveType m) {
  return m == MoveType::Top ? MoveType::Bottom : MoveType::Top;
}

char move_char(MoveType m);                 // 't' or 'b'
MoveType move_from_char(char c);

// A pair of rows, each an ordering of the alphabet. rows are stored as
// position -> letter index.
class PermutationPair {
 public:
  PermutationPair() = default;
  PermutationPair(Alphabet alphabet, std::vector<std::uint8_t> top,
                  std::vector<std::uint8_t> bottom);

  const Alphabet& alphabet() const { return alphabet_; }
  std::size_t size() const { return top_.size(); }

  // letter index at a row position (0-based)
  std::uint8_t top_at(std::size_t pos) const { return top_[pos]; }
  std::uint8_t bottom_at(std::size_t pos) const { return bottom_[pos]; }

  // 1-based position of a letter in a row (the maps pi_t, pi_b)
  std::size_t top_pos(std::uint8_t letter_idx) const;
  std::size_t bottom_pos(std::uint8_t letter_idx) const;

  std::uint8_t last_top() const { return top_.back(); }
  std::uint8_t last_bottom() const { return bottom_.back(); }

  bool operator==(const PermutationPair& o) const {
    return top_ == o.top_ && bottom_ == o.bottom_;
  }
  bool operator!=(const PermutationPair& o) const { return !(*this == o); }

  std::string key() const;      // dense byte key for hashing
  std::string to_text() const;  // "top=ABCD;bottom=DCBA"
  std::string short_text() const;  // "ABCD/DCBA"

 private:
  Alphabet alphabet_;
  std::vector<std::uint8_t> top_, bottom_;
};

// accepts "top=ABCD;bottom=DCBA" or the shorthand "ABCD/DCBA"
PermutationPair parse_pair(const std::string& text);
PermutationPair make_pair(const std::string& top, const std::string& bottom);

bool is_irreducible(const PermutationPair& pair);

struct RauzyArrow {
  PermutationPair source;
  MoveType move;
  PermutationPair target;
  std::uint8_t winner;  // letter index, last of the unchanged row
  std::uint8_t loser;   // letter index, last of the changed row
};

RauzyArrow apply_move(const PermutationPair& pair, MoveType move);

// An oriented edge path: a start vertex plus a move sequence. Intermediate
// vertices are derived deterministically.
struct RauzyPath {
  PermutationPair start;
  std::vector<MoveType> moves;

  std::size_t length() const { return moves.size(); }
  std::string to_text() const;  // "start:<perm>|moves:tbtb"
};

RauzyPath parse_path(const std::string& text);

PermutationPair end_vertex(const RauzyPath& path);
std::vector<PermutationPair> path_vertices(const RauzyPath& path);
std::vector<RauzyArrow> path_arrows(const RauzyPath& path);
bool is_loop(const RauzyPath& path);
RauzyPath concat(const RauzyPath& a, const RauzyPath& b);

// all offsets i where needle's moves match and the vertex at i equals
// needle's start
std::vector<std::size_t> contains_subpath(const RauzyPath& haystack,
                                          const RauzyPath& needle);

struct RauzyClass {
  std::vector<PermutationPair> vertices;  // BFS discovery order
  std::vector<RauzyArrow> arrows;

  std::size_t vertex_index(const PermutationPair& p) const;
  // outgoing arrow index of `move` type from vertex v
  const RauzyArrow& out_arrow(std::size_t v, MoveType move) const;
  std::string export_edges() const;  // "src -t-> dst winner=X loser=Y" lines
};

RauzyClass rauzy_class(const PermutationPair& pair);

// representatives of every Rauzy class on d letters, discovery order
std::vector<PermutationPair> all_class_representatives(std::size_t d);

bool is_complete(const RauzyPath& path);
// greedy earliest-cut decomposition into complete pieces
std::size_t complete_piece_count(const RauzyPath& path);
bool is_k_complete(const RauzyPath& path, std::size_t k);

bool is_neat(const RauzyPath& path);
bool is_strongly_positive(const RauzyPath& path);

// shortest complete loop at base ending with a Bottom arrow
RauzyPath find_complete_loop(const RauzyClass& cls,
                             const PermutationPair& base);

struct PathSelection {
  RauzyPath gamma0;
  std::vector<RauzyPath> upsilon0;
  std::vector<RauzyPath> upsilon;
  std::vector<BigMatrix> sigma_set;  // filled by rvgroup::make_upsilon
};

// gamma0 construction: complete loop ending in a Bottom arrow, the long
// Top-run prefix, and the k-fold completion; verifies all three predicates.
PathSelection build_gamma0(const RauzyClass& cls, const PermutationPair& base,
                           const std::vector<RauzyPath>& upsilon);

// loops at the selection base of length <= max_len whose gamma0-occurrences
// in gamma.gamma0 are exactly the prefix and suffix; lexicographic by moves
// (Top < Bottom)
std::vector<RauzyPath> enumerate_adapted(const PathSelection& selection,
                                         std::size_t max_len);

}  // namespace rauzylab

#endif
