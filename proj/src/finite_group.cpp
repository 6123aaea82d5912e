#include "rauzylab/finite_group.hpp"

#include <deque>

#include "rauzylab/errors.hpp"

namespace rauzylab {

std::string encode_mod_matrix(const BigMatrix& m, long long q) {
  if (q < 2 || q > 255)
    fail(ErrorKind::CapExceeded, "modulus outside the byte-encoded range");
  std::string key(m.rows() * m.cols(), '\0');
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) {
      long long v = static_cast<long long>(m.at(i, j) % q);
      if (v < 0) v += q;
      key[i * m.cols() + j] = static_cast<char>(v);
    }
  return key;
}

std::string FiniteGroup::mul_key(std::size_t a, std::size_t b) const {
  const std::size_t n = dim();
  const std::string& x = elements_[a];
  const std::string& y = elements_[b];
  std::string out(n * n, '\0');
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      long long s = 0;
      for (std::size_t k = 0; k < n; ++k)
        s += static_cast<long long>(static_cast<unsigned char>(x[i * n + k])) *
             static_cast<unsigned char>(y[k * n + j]);
      out[i * n + j] = static_cast<char>(s % q_);
    }
  return out;
}

std::size_t FiniteGroup::mul(std::size_t a, std::size_t b) const {
  auto it = index_.find(mul_key(a, b));
  if (it == index_.end())
    fail(ErrorKind::ValidationError, "product escapes the enumerated group");
  return it->second;
}

SpElement FiniteGroup::element(std::size_t i) const {
  const std::size_t n = dim();
  SpElement e;
  e.genus = genus_;
  e.q = q_;
  e.m = BigMatrix(n, n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c)
      e.m.at(r, c) = static_cast<unsigned char>(elements_[i][r * n + c]);
  return e;
}

std::size_t FiniteGroup::index_of(const SpElement& e) const {
  auto it = index_.find(encode_mod_matrix(e.m, q_));
  if (it == index_.end())
    fail(ErrorKind::ValidationError, "element not in the enumerated group");
  return it->second;
}

bool FiniteGroup::contains(const SpElement& e) const {
  return index_.count(encode_mod_matrix(e.m, q_)) > 0;
}

FiniteGroup FiniteGroup::generate(std::size_t genus, long long q,
                                  const std::vector<SpElement>& generators,
                                  std::uint64_t cap) {
  FiniteGroup g;
  g.genus_ = genus;
  g.q_ = q;
  const std::size_t n = 2 * genus;

  std::string id_key(n * n, '\0');
  for (std::size_t i = 0; i < n; ++i) id_key[i * n + i] = 1;
  g.elements_.push_back(id_key);
  g.index_[id_key] = 0;

  // close the generator list under inverses
  std::vector<std::string> gen_keys;
  for (const auto& e : generators) {
    if (e.genus != genus)
      fail(ErrorKind::DimensionMismatch, "generator genus mismatch");
    SpElement r = e.q == q ? e : reduce_mod(SpElement{e.genus, 0, e.m}, q);
    gen_keys.push_back(encode_mod_matrix(r.m, q));
    gen_keys.push_back(encode_mod_matrix(sp_inverse(r).m, q));
  }

  // seed the table with the generators so BFS can multiply by index
  std::vector<std::size_t> gen_idx;
  for (const auto& k : gen_keys) {
    auto [it, inserted] = g.index_.try_emplace(k, g.elements_.size());
    if (inserted) g.elements_.push_back(k);
    gen_idx.push_back(it->second);
  }
  g.generator_indices_ = gen_idx;

  std::deque<std::size_t> queue;
  for (std::size_t i = 0; i < g.elements_.size(); ++i) queue.push_back(i);
  while (!queue.empty()) {
    std::size_t a = queue.front();
    queue.pop_front();
    for (std::size_t s : gen_idx) {
      std::string key = g.mul_key(a, s);
      auto [it, inserted] = g.index_.try_emplace(key, g.elements_.size());
      if (inserted) {
        if (g.elements_.size() >= cap)
          fail(ErrorKind::CapExceeded, "group closure exceeds cap");
        g.elements_.push_back(key);
        queue.push_back(it->second);
      }
    }
  }

  g.inv_table_.assign(g.size(), 0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    SpElement e = g.element(i);
    g.inv_table_[i] = g.index_of(sp_inverse(e));
  }
  return g;
}

std::vector<std::size_t> FiniteGroup::reduction_ids(long long divisor) const {
  if (divisor < 1 || q_ % divisor != 0)
    fail(ErrorKind::ValidationError, "reduction level must divide the modulus");
  std::vector<std::size_t> ids(size());
  if (divisor == 1) return ids;  // everything collapses
  std::unordered_map<std::string, std::size_t> seen;
  const std::size_t n = dim();
  for (std::size_t i = 0; i < size(); ++i) {
    std::string key(n * n, '\0');
    for (std::size_t t = 0; t < n * n; ++t)
      key[t] = static_cast<char>(static_cast<unsigned char>(elements_[i][t]) %
                                 divisor);
    auto [it, inserted] = seen.try_emplace(key, seen.size());
    ids[i] = it->second;
  }
  return ids;
}

}  // namespace rauzylab
