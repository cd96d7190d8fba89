#include "formalcalc/multi_index.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "formalcalc/errors.hpp"

namespace formalcalc {

namespace {

void require_same_length(const MultiIndex& a, const MultiIndex& b) {
  if (a.length() != b.length()) {
    throw MismatchError("multi-index length mismatch: " + std::to_string(a.length()) + " vs " +
                        std::to_string(b.length()));
  }
}

}  // namespace

MultiIndex MultiIndex::unit(std::size_t length, std::size_t i) {
  MultiIndex m(length);
  m.entries_.at(i) = 1;
  return m;
}

std::uint64_t MultiIndex::degree() const {
  return std::accumulate(entries_.begin(), entries_.end(), std::uint64_t{0});
}

mpz_class MultiIndex::factorial() const {
  mpz_class result = 1;
  for (auto e : entries_) {
    mpz_class f;
    mpz_fac_ui(f.get_mpz_t(), e);
    result *= f;
  }
  return result;
}

bool MultiIndex::dominates(const MultiIndex& l) const {
  require_same_length(*this, l);
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (l.entries_[i] > entries_[i]) return false;
  }
  return true;
}

MultiIndex MultiIndex::operator+(const MultiIndex& other) const {
  require_same_length(*this, other);
  MultiIndex out(*this);
  for (std::size_t i = 0; i < entries_.size(); ++i) out.entries_[i] += other.entries_[i];
  return out;
}

MultiIndex MultiIndex::operator-(const MultiIndex& other) const {
  require_same_length(*this, other);
  if (!dominates(other)) {
    throw PreconditionError("multi-index subtraction " + to_csv() + " - " + other.to_csv() +
                            " would go negative");
  }
  MultiIndex out(*this);
  for (std::size_t i = 0; i < entries_.size(); ++i) out.entries_[i] -= other.entries_[i];
  return out;
}

std::string MultiIndex::to_csv() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (i) os << ',';
    os << entries_[i];
  }
  return os.str();
}

MultiIndex MultiIndex::from_csv(const std::string& text, std::size_t expected_length) {
  std::vector<std::uint32_t> entries;
  if (!text.empty()) {
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        std::size_t used = 0;
        long v = std::stol(item, &used);
        if (used != item.size() || v < 0) throw ParseError("bad entry");
        entries.push_back(static_cast<std::uint32_t>(v));
      } catch (const std::logic_error&) {
        throw ParseError("malformed multi-index '" + text + "'");
      } catch (const ParseError&) {
        throw ParseError("malformed multi-index '" + text + "'");
      }
    }
  }
  if (entries.size() != expected_length) {
    throw ParseError("multi-index '" + text + "' has length " + std::to_string(entries.size()) +
                     ", expected " + std::to_string(expected_length));
  }
  return MultiIndex(std::move(entries));
}

std::strong_ordering MultiIndex::operator<=>(const MultiIndex& other) const {
  require_same_length(*this, other);
  if (auto c = degree() <=> other.degree(); c != 0) return c;
  return entries_ <=> other.entries_;
}

std::uint64_t degree(const MultiIndex& m) { return m.degree(); }
mpz_class factorial(const MultiIndex& m) { return m.factorial(); }
MultiIndex sub(const MultiIndex& m, const MultiIndex& l) { return m - l; }

mpz_class binomial(const MultiIndex& m, const MultiIndex& l) {
  if (!m.dominates(l)) return 0;
  mpz_class result = 1;
  for (std::size_t i = 0; i < m.length(); ++i) {
    mpz_class b;
    mpz_bin_uiui(b.get_mpz_t(), m[i], l[i]);
    result *= b;
  }
  return result;
}

namespace {

// Fills entries[pos..] with all tuples summing to exactly `remaining`, lexicographic.
void compositions(std::vector<std::uint32_t>& entries, std::size_t pos, std::uint32_t remaining,
                  std::vector<MultiIndex>& out) {
  if (pos + 1 == entries.size()) {
    entries[pos] = remaining;
    out.emplace_back(entries);
    return;
  }
  for (std::uint32_t v = 0; v <= remaining; ++v) {
    entries[pos] = v;
    compositions(entries, pos + 1, remaining - v, out);
  }
}

}  // namespace

std::vector<MultiIndex> enumerate_upto(std::size_t length, std::uint32_t max_degree) {
  std::vector<MultiIndex> out;
  if (length == 0) {
    out.emplace_back(MultiIndex(0));
    return out;
  }
  std::vector<std::uint32_t> entries(length, 0);
  for (std::uint32_t d = 0; d <= max_degree; ++d) compositions(entries, 0, d, out);
  return out;
}

std::vector<MultiIndex> enumerate_below(const MultiIndex& m) {
  std::vector<MultiIndex> out;
  for (auto& l : enumerate_upto(m.length(), static_cast<std::uint32_t>(m.degree()))) {
    if (m.dominates(l)) out.push_back(l);
  }
  return out;
}

mpz_class count_upto(std::size_t length, std::uint32_t max_degree) {
  mpz_class b;
  mpz_bin_uiui(b.get_mpz_t(), length + max_degree, length);
  return b;
}

}  // namespace formalcalc
