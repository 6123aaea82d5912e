#include "rauzylab/rauzy.hpp"

#include <algorithm>
#include <deque>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "rauzylab/errors.hpp"

namespace rauzylab {

Alphabet::Alphabet(std::vector<char> letters) : letters_(std::move(letters)) {
  if (letters_.size() < 2)
    fail(ErrorKind::ValidationError, "alphabet needs at least 2 letters");
  for (char c : letters_)
    if (c < 'A' || c > 'Z')
      fail(ErrorKind::ValidationError, "letters must be uppercase A-Z");
  std::vector<char> sorted = letters_;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    fail(ErrorKind::DuplicateLetter, "alphabet letters must be distinct");
}

std::size_t Alphabet::index(char letter) const {
  for (std::size_t i = 0; i < letters_.size(); ++i)
    if (letters_[i] == letter) return i;
  fail(ErrorKind::ValidationError,
       std::string("letter '") + letter + "' not in alphabet");
}

char move_char(MoveType m) { return m == MoveType::Top ? 't' : 'b'; }

MoveType move_from_char(char c) {
  if (c == 't') return MoveType::Top;
  if (c == 'b') return MoveType::Bottom;
  fail(ErrorKind::ParseError, std::string("bad move character '") + c + "'");
}

PermutationPair::PermutationPair(Alphabet alphabet,
                                 std::vector<std::uint8_t> top,
                                 std::vector<std::uint8_t> bottom)
    : alphabet_(std::move(alphabet)),
      top_(std::move(top)),
      bottom_(std::move(bottom)) {
  const std::size_t d = alphabet_.size();
  if (top_.size() != d || bottom_.size() != d)
    fail(ErrorKind::LengthMismatch, "row length differs from alphabet size");
  std::vector<bool> seen_t(d, false), seen_b(d, false);
  for (std::size_t i = 0; i < d; ++i) {
    if (top_[i] >= d || bottom_[i] >= d)
      fail(ErrorKind::ValidationError, "letter index out of range");
    if (seen_t[top_[i]] || seen_b[bottom_[i]])
      fail(ErrorKind::DuplicateLetter, "row is not a permutation");
    seen_t[top_[i]] = seen_b[bottom_[i]] = true;
  }
}

std::size_t PermutationPair::top_pos(std::uint8_t letter_idx) const {
  for (std::size_t i = 0; i < top_.size(); ++i)
    if (top_[i] == letter_idx) return i + 1;
  fail(ErrorKind::ValidationError, "letter not in top row");
}

std::size_t PermutationPair::bottom_pos(std::uint8_t letter_idx) const {
  for (std::size_t i = 0; i < bottom_.size(); ++i)
    if (bottom_[i] == letter_idx) return i + 1;
  fail(ErrorKind::ValidationError, "letter not in bottom row");
}

std::string PermutationPair::key() const {
  std::string k;
  k.reserve(2 * top_.size());
  for (auto x : top_) k.push_back(static_cast<char>(x));
  for (auto x : bottom_) k.push_back(static_cast<char>(x));
  return k;
}

std::string PermutationPair::to_text() const {
  std::string t = "top=", b = "bottom=";
  for (auto x : top_) t.push_back(alphabet_.letter(x));
  for (auto x : bottom_) b.push_back(alphabet_.letter(x));
  return t + ";" + b;
}

std::string PermutationPair::short_text() const {
  std::string s;
  for (auto x : top_) s.push_back(alphabet_.letter(x));
  s.push_back('/');
  for (auto x : bottom_) s.push_back(alphabet_.letter(x));
  return s;
}

PermutationPair make_pair(const std::string& top, const std::string& bottom) {
  if (top.size() != bottom.size())
    fail(ErrorKind::LengthMismatch, "rows have different lengths");
  if (top.size() < 2)
    fail(ErrorKind::LengthMismatch, "need at least 2 letters");
  std::vector<char> letters(top.begin(), top.end());
  std::sort(letters.begin(), letters.end());
  if (std::adjacent_find(letters.begin(), letters.end()) != letters.end())
    fail(ErrorKind::DuplicateLetter, "duplicate letter in top row");
  {
    std::vector<char> bl(bottom.begin(), bottom.end());
    std::sort(bl.begin(), bl.end());
    if (bl != letters)
      fail(ErrorKind::DuplicateLetter,
           "rows are not permutations of the same letters");
  }
  Alphabet alphabet(letters);
  std::vector<std::uint8_t> t, b;
  for (char c : top) t.push_back(static_cast<std::uint8_t>(alphabet.index(c)));
  for (char c : bottom)
    b.push_back(static_cast<std::uint8_t>(alphabet.index(c)));
  return PermutationPair(std::move(alphabet), std::move(t), std::move(b));
}

PermutationPair parse_pair(const std::string& text) {
  auto slash = text.find('/');
  if (slash != std::string::npos && text.find('=') == std::string::npos)
    return rauzylab::make_pair(text.substr(0, slash), text.substr(slash + 1));
  auto semi = text.find(';');
  if (semi == std::string::npos || text.rfind("top=", 0) != 0 ||
      text.compare(semi + 1, 7, "bottom=") != 0)
    fail(ErrorKind::ParseError, "expected 'top=..;bottom=..' or 'TOP/BOT'");
  return rauzylab::make_pair(text.substr(4, semi - 4), text.substr(semi + 8));
}

bool is_irreducible(const PermutationPair& pair) {
  const std::size_t d = pair.size();
  std::uint32_t top_set = 0, bottom_set = 0;
  for (std::size_t i = 0; i + 1 < d; ++i) {
    top_set |= 1u << pair.top_at(i);
    bottom_set |= 1u << pair.bottom_at(i);
    if (top_set == bottom_set) return false;
  }
  return true;
}

RauzyArrow apply_move(const PermutationPair& pair, MoveType move) {
  if (!is_irreducible(pair))
    fail(ErrorKind::ReduciblePair, pair.short_text());
  const std::size_t d = pair.size();
  const std::uint8_t alpha = pair.last_top();
  const std::uint8_t beta = pair.last_bottom();
  std::vector<std::uint8_t> top(d), bottom(d);
  for (std::size_t i = 0; i < d; ++i) {
    top[i] = pair.top_at(i);
    bottom[i] = pair.bottom_at(i);
  }
  RauzyArrow arrow;
  arrow.source = pair;
  arrow.move = move;
  if (move == MoveType::Top) {
    // relocate the bottom-row last letter to just after alpha's occurrence
    bottom.pop_back();
    auto it = std::find(bottom.begin(), bottom.end(), alpha);
    bottom.insert(it + 1, beta);
    arrow.winner = alpha;
    arrow.loser = beta;
  } else {
    top.pop_back();
    auto it = std::find(top.begin(), top.end(), beta);
    top.insert(it + 1, alpha);
    arrow.winner = beta;
    arrow.loser = alpha;
  }
  arrow.target =
      PermutationPair(pair.alphabet(), std::move(top), std::move(bottom));
  return arrow;
}

std::string RauzyPath::to_text() const {
  std::string s = "start:" + start.short_text() + "|moves:";
  for (auto m : moves) s.push_back(move_char(m));
  return s;
}

RauzyPath parse_path(const std::string& text) {
  if (text.rfind("start:", 0) != 0)
    fail(ErrorKind::ParseError, "path text must begin with 'start:'");
  auto bar = text.find('|');
  if (bar == std::string::npos || text.compare(bar + 1, 6, "moves:") != 0)
    fail(ErrorKind::ParseError, "path text needs '|moves:' section");
  RauzyPath p;
  p.start = parse_pair(text.substr(6, bar - 6));
  for (std::size_t i = bar + 7; i < text.size(); ++i)
    p.moves.push_back(move_from_char(text[i]));
  return p;
}

PermutationPair end_vertex(const RauzyPath& path) {
  PermutationPair v = path.start;
  for (auto m : path.moves) v = apply_move(v, m).target;
  return v;
}

std::vector<PermutationPair> path_vertices(const RauzyPath& path) {
  std::vector<PermutationPair> vs;
  vs.reserve(path.moves.size() + 1);
  vs.push_back(path.start);
  for (auto m : path.moves) vs.push_back(apply_move(vs.back(), m).target);
  return vs;
}

std::vector<RauzyArrow> path_arrows(const RauzyPath& path) {
  std::vector<RauzyArrow> arrows;
  arrows.reserve(path.moves.size());
  PermutationPair v = path.start;
  for (auto m : path.moves) {
    arrows.push_back(apply_move(v, m));
    v = arrows.back().target;
  }
  return arrows;
}

bool is_loop(const RauzyPath& path) { return end_vertex(path) == path.start; }

RauzyPath concat(const RauzyPath& a, const RauzyPath& b) {
  if (end_vertex(a) != b.start)
    fail(ErrorKind::ValidationError, "paths are not composable");
  RauzyPath r = a;
  r.moves.insert(r.moves.end(), b.moves.begin(), b.moves.end());
  return r;
}

std::vector<std::size_t> contains_subpath(const RauzyPath& haystack,
                                          const RauzyPath& needle) {
  std::vector<std::size_t> hits;
  const std::size_t n = needle.moves.size();
  if (n > haystack.moves.size()) return hits;
  auto vertices = path_vertices(haystack);
  for (std::size_t i = 0; i + n <= haystack.moves.size(); ++i) {
    if (vertices[i] != needle.start) continue;
    bool ok = true;
    for (std::size_t k = 0; k < n && ok; ++k)
      ok = haystack.moves[i + k] == needle.moves[k];
    if (ok) hits.push_back(i);
  }
  return hits;
}

std::size_t RauzyClass::vertex_index(const PermutationPair& p) const {
  for (std::size_t i = 0; i < vertices.size(); ++i)
    if (vertices[i] == p) return i;
  fail(ErrorKind::ValidationError, "vertex not in class");
}

const RauzyArrow& RauzyClass::out_arrow(std::size_t v, MoveType move) const {
  // BFS stores both out-arrows of vertex v at slots 2v, 2v+1
  std::size_t slot = 2 * v + (move == MoveType::Bottom ? 1 : 0);
  if (slot < arrows.size() && arrows[slot].source == vertices[v] &&
      arrows[slot].move == move)
    return arrows[slot];
  for (const auto& a : arrows)
    if (a.source == vertices[v] && a.move == move) return a;
  fail(ErrorKind::ValidationError, "missing arrow");
}

std::string RauzyClass::export_edges() const {
  std::ostringstream out;
  for (const auto& a : arrows) {
    out << a.source.short_text() << " -" << move_char(a.move) << "-> "
        << a.target.short_text()
        << " winner=" << a.source.alphabet().letter(a.winner)
        << " loser=" << a.source.alphabet().letter(a.loser) << "\n";
  }
  return out.str();
}

RauzyClass rauzy_class(const PermutationPair& pair) {
  if (!is_irreducible(pair))
    fail(ErrorKind::ReduciblePair, pair.short_text());
  RauzyClass cls;
  std::unordered_map<std::string, std::size_t> index;
  std::deque<std::size_t> queue;
  cls.vertices.push_back(pair);
  index[pair.key()] = 0;
  queue.push_back(0);
  while (!queue.empty()) {
    std::size_t v = queue.front();
    queue.pop_front();
    for (MoveType m : {MoveType::Top, MoveType::Bottom}) {
      RauzyArrow arrow = apply_move(cls.vertices[v], m);
      auto [it, inserted] =
          index.try_emplace(arrow.target.key(), cls.vertices.size());
      if (inserted) {
        cls.vertices.push_back(arrow.target);
        queue.push_back(it->second);
      }
      cls.arrows.push_back(std::move(arrow));
    }
  }
  return cls;
}

std::vector<PermutationPair> all_class_representatives(std::size_t d) {
  std::vector<char> letters;
  for (std::size_t i = 0; i < d; ++i)
    letters.push_back(static_cast<char>('A' + i));
  std::vector<std::uint8_t> perm(d);
  for (std::size_t i = 0; i < d; ++i) perm[i] = static_cast<std::uint8_t>(i);

  std::vector<std::vector<std::uint8_t>> perms;
  std::vector<std::uint8_t> p = perm;
  do {
    perms.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));

  Alphabet alphabet(letters);
  std::unordered_set<std::string> seen;
  std::vector<PermutationPair> reps;
  for (const auto& t : perms)
    for (const auto& b : perms) {
      PermutationPair pair(alphabet, t, b);
      if (!is_irreducible(pair)) continue;
      if (seen.count(pair.key())) continue;
      RauzyClass cls = rauzy_class(pair);
      for (const auto& v : cls.vertices) seen.insert(v.key());
      reps.push_back(pair);
    }
  return reps;
}

bool is_complete(const RauzyPath& path) {
  const std::size_t d = path.start.size();
  std::uint32_t winners = 0;
  for (const auto& a : path_arrows(path)) winners |= 1u << a.winner;
  return winners == (1u << d) - 1;
}

std::size_t complete_piece_count(const RauzyPath& path) {
  const std::uint32_t full = (1u << path.start.size()) - 1;
  std::uint32_t winners = 0;
  std::size_t pieces = 0;
  for (const auto& a : path_arrows(path)) {
    winners |= 1u << a.winner;
    if (winners == full) {
      ++pieces;
      winners = 0;
    }
  }
  return pieces;
}

bool is_k_complete(const RauzyPath& path, std::size_t k) {
  return complete_piece_count(path) >= k;
}

bool is_neat(const RauzyPath& path) {
  if (!is_loop(path)) fail(ErrorKind::NotALoop, path.to_text());
  const std::size_t n = path.moves.size();
  auto vertices = path_vertices(path);
  for (std::size_t k = 1; k < n; ++k) {
    if (vertices[n - k] != path.start) continue;
    bool equal = true;
    for (std::size_t i = 0; i < k && equal; ++i)
      equal = path.moves[i] == path.moves[n - k + i];
    if (equal) return false;  // proper nonempty affix
  }
  return true;
}

namespace {

struct ClassAdjacency {
  std::vector<std::array<std::size_t, 2>> target;  // [vertex][move]
  std::vector<std::array<std::uint8_t, 2>> winner;
};

ClassAdjacency adjacency(const RauzyClass& cls) {
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < cls.vertices.size(); ++i)
    index[cls.vertices[i].key()] = i;
  ClassAdjacency adj;
  adj.target.resize(cls.vertices.size());
  adj.winner.resize(cls.vertices.size());
  for (std::size_t v = 0; v < cls.vertices.size(); ++v)
    for (MoveType m : {MoveType::Top, MoveType::Bottom}) {
      const RauzyArrow& a = cls.out_arrow(v, m);
      std::size_t slot = m == MoveType::Bottom ? 1 : 0;
      adj.target[v][slot] = index.at(a.target.key());
      adj.winner[v][slot] = a.winner;
    }
  return adj;
}

// shortest complete loop at `base` that ends with a Bottom arrow, by BFS on
// (vertex, winner set, last move type) states
RauzyPath complete_loop_ending_bottom(const RauzyClass& cls,
                                      const PermutationPair& base) {
  const std::size_t nv = cls.vertices.size();
  const std::size_t d = base.size();
  const std::uint32_t full = (1u << d) - 1;
  const std::size_t base_idx = cls.vertex_index(base);
  ClassAdjacency adj = adjacency(cls);

  struct State {
    std::size_t vertex;
    std::uint32_t winners;
    int last;  // -1 none, 0 top, 1 bottom
  };
  auto encode = [&](const State& s) {
    return (s.vertex * (full + 1) + s.winners) * 3 +
           static_cast<std::size_t>(s.last + 1);
  };
  std::vector<std::int64_t> prev_state(nv * (full + 1) * 3, -1);
  std::vector<std::int8_t> prev_move(nv * (full + 1) * 3, -1);
  std::deque<State> queue;
  State init{base_idx, 0, -1};
  prev_state[encode(init)] = static_cast<std::int64_t>(encode(init));
  queue.push_back(init);
  while (!queue.empty()) {
    State s = queue.front();
    queue.pop_front();
    for (MoveType m : {MoveType::Top, MoveType::Bottom}) {
      std::size_t slot = m == MoveType::Bottom ? 1 : 0;
      State t{adj.target[s.vertex][slot],
              s.winners | (1u << adj.winner[s.vertex][slot]),
              m == MoveType::Top ? 0 : 1};
      if (t.vertex == base_idx && t.winners == full && t.last == 1) {
        // reconstruct
        std::vector<MoveType> moves{m};
        State cur = s;
        while (prev_move[encode(cur)] >= 0) {
          moves.push_back(prev_move[encode(cur)] == 0 ? MoveType::Top
                                                      : MoveType::Bottom);
          std::size_t pcode =
              static_cast<std::size_t>(prev_state[encode(cur)]);
          State p;
          p.last = static_cast<int>(pcode % 3) - 1;
          std::size_t rest = pcode / 3;
          p.winners = static_cast<std::uint32_t>(rest % (full + 1));
          p.vertex = rest / (full + 1);
          cur = p;
        }
        std::reverse(moves.begin(), moves.end());
        return RauzyPath{base, std::move(moves)};
      }
      std::size_t code = encode(t);
      if (prev_state[code] >= 0) continue;
      prev_state[code] = static_cast<std::int64_t>(encode(s));
      prev_move[code] = m == MoveType::Top ? 0 : 1;
      queue.push_back(t);
    }
  }
  fail(ErrorKind::ConstructionFailed, "no complete loop ending in Bottom");
}

// shortest directed path between vertices, BFS over class arrows
RauzyPath shortest_path(const RauzyClass& cls, const PermutationPair& from,
                        const PermutationPair& to) {
  const std::size_t nv = cls.vertices.size();
  std::size_t src = cls.vertex_index(from), dst = cls.vertex_index(to);
  if (src == dst) return RauzyPath{from, {}};
  ClassAdjacency adj = adjacency(cls);
  std::vector<int> prev(nv, -1);
  std::vector<std::int8_t> via(nv, -1);
  std::deque<std::size_t> queue{src};
  prev[src] = static_cast<int>(src);
  while (!queue.empty()) {
    std::size_t v = queue.front();
    queue.pop_front();
    for (MoveType m : {MoveType::Top, MoveType::Bottom}) {
      std::size_t t = adj.target[v][m == MoveType::Bottom ? 1 : 0];
      if (prev[t] >= 0) continue;
      prev[t] = static_cast<int>(v);
      via[t] = m == MoveType::Top ? 0 : 1;
      if (t == dst) {
        std::vector<MoveType> moves;
        for (std::size_t cur = dst; cur != src;
             cur = static_cast<std::size_t>(prev[cur]))
          moves.push_back(via[cur] == 0 ? MoveType::Top : MoveType::Bottom);
        std::reverse(moves.begin(), moves.end());
        return RauzyPath{from, std::move(moves)};
      }
      queue.push_back(t);
    }
  }
  fail(ErrorKind::ConstructionFailed, "class is not strongly connected");
}

std::optional<RauzyPath> shortest_qualifying_loop(
    const PermutationPair& base, const std::vector<RauzyPath>& upsilon,
    std::size_t max_len) {
  for (std::size_t len = 1; len <= max_len; ++len) {
    std::vector<MoveType> moves(len, MoveType::Top);
    // odometer over move sequences, Top < Bottom
    while (true) {
      RauzyPath cand{base, moves};
      try {
        if (is_loop(cand) && is_neat(cand) && is_strongly_positive(cand)) {
          bool avoided = true;
          for (const auto& g : upsilon)
            if (!contains_subpath(g, cand).empty()) {
              avoided = false;
              break;
            }
          if (avoided) return cand;
        }
      } catch (const Error&) {
        // reducible intermediate vertex: skip candidate
      }
      std::size_t i = len;
      while (i > 0 && moves[i - 1] == MoveType::Bottom)
        moves[--i] = MoveType::Top;
      if (i == 0) break;
      moves[i - 1] = MoveType::Bottom;
    }
  }
  return std::nullopt;
}

}  // namespace

RauzyPath find_complete_loop(const RauzyClass& cls,
                             const PermutationPair& base) {
  return complete_loop_ending_bottom(cls, base);
}

PathSelection build_gamma0(const RauzyClass& cls, const PermutationPair& base,
                           const std::vector<RauzyPath>& upsilon) {
  cls.vertex_index(base);  // validates membership
  std::size_t max_upsilon_len = 0;
  for (const auto& g : upsilon) {
    if (!(g.start == base) || !is_loop(g))
      fail(ErrorKind::ValidationError, "upsilon element is not a loop at base");
    max_upsilon_len = std::max(max_upsilon_len, g.length());
  }

  PathSelection sel;
  sel.upsilon0 = upsilon;
  sel.upsilon = upsilon;
  for (const auto& g : upsilon) sel.upsilon.push_back(concat(g, g));

  const std::size_t d = base.size();
  RauzyPath gamma_star = complete_loop_ending_bottom(cls, base);
  std::size_t k = 3 * d - 4;
  while (gamma_star.length() * k < max_upsilon_len) ++k;

  if (upsilon.empty() && d <= 3) {
    // vacuous avoidance: prefer the shortest strongly positive neat loop
    // (exhaustive search stays cheap only for tiny alphabets)
    std::size_t search_cap =
        std::min<std::size_t>(14, gamma_star.length() * (k + 1));
    if (auto found = shortest_qualifying_loop(base, sel.upsilon, search_cap)) {
      sel.gamma0 = *found;
      return sel;
    }
  }

  // loop gamma' = long Top run, then a short return to base
  std::size_t top_run = gamma_star.length() * k + cls.vertices.size();
  RauzyPath gamma_prime{base, std::vector<MoveType>(top_run, MoveType::Top)};
  PermutationPair run_end = end_vertex(gamma_prime);
  RauzyPath back = shortest_path(cls, run_end, base);
  if (back.length() > 2 * cls.vertices.size())
    fail(ErrorKind::ConstructionFailed, "return path exceeds depth cap");
  gamma_prime = concat(gamma_prime, back);

  RauzyPath gamma0 = concat(gamma_prime, gamma_star);
  for (std::size_t i = 1; i < k; ++i) gamma0 = concat(gamma0, gamma_star);

  if (!is_strongly_positive(gamma0))
    fail(ErrorKind::ConstructionFailed, "candidate fails is_strongly_positive");
  if (!is_neat(gamma0))
    fail(ErrorKind::ConstructionFailed, "candidate fails is_neat");
  for (const auto& g : sel.upsilon)
    if (!contains_subpath(g, gamma0).empty())
      fail(ErrorKind::ConstructionFailed, "candidate occurs in upsilon");

  sel.gamma0 = std::move(gamma0);
  return sel;
}

std::vector<RauzyPath> enumerate_adapted(const PathSelection& selection,
                                         std::size_t max_len) {
  const RauzyPath& g0 = selection.gamma0;
  std::vector<RauzyPath> result;
  if (max_len < g0.length()) return result;

  // depth-first over extensions of gamma0, Top branch first (lex order)
  RauzyPath cur = g0;
  auto consider = [&](const RauzyPath& cand) {
    if (!is_loop(cand)) return;
    RauzyPath doubled = concat(cand, g0);
    auto occ = contains_subpath(doubled, g0);
    if (occ.size() == 2 && occ[0] == 0 && occ[1] == cand.length())
      result.push_back(cand);
  };
  // iterative DFS with explicit move stack
  std::vector<MoveType> tail;
  auto rec = [&](auto&& self) -> void {
    RauzyPath cand = g0;
    cand.moves.insert(cand.moves.end(), tail.begin(), tail.end());
    consider(cand);
    if (cand.length() >= max_len) return;
    for (MoveType m : {MoveType::Top, MoveType::Bottom}) {
      tail.push_back(m);
      self(self);
      tail.pop_back();
    }
  };
  rec(rec);

  std::sort(result.begin(), result.end(),
            [](const RauzyPath& a, const RauzyPath& b) {
              if (a.length() != b.length()) return a.length() < b.length();
              return a.moves < b.moves;
            });
  return result;
}

}  // namespace rauzylab
