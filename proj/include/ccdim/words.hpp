#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

#include "ccdim/errors.hpp"

namespace ccdim {

/// Finite word over the alphabet {1, ..., N}. Letters are 1-based to match
/// the branch numbering used everywhere else (configs, CSV, CLI).
class Word {
 public:
  Word() = default;
  explicit Word(std::vector<int> letters) : letters_(std::move(letters)) {}
  Word(std::initializer_list<int> letters) : letters_(letters) {}

  int length() const { return static_cast<int>(letters_.size()); }
  bool empty() const { return letters_.empty(); }
  int letter(int i) const { return letters_[static_cast<std::size_t>(i)]; }
  const std::vector<int>& letters() const { return letters_; }

  /// Drops the last letter. The empty word has no parent.
  Word parent() const {
    if (empty()) throw InputError("the empty word has no parent");
    return Word(std::vector<int>(letters_.begin(), letters_.end() - 1));
  }

  Word extended(int j) const {
    std::vector<int> out = letters_;
    out.push_back(j);
    return Word(std::move(out));
  }

  Word truncated(int k) const {
    if (k < 0 || k > length())
      throw InputError("truncation length " + std::to_string(k) +
                       " out of range for a word of length " +
                       std::to_string(length()));
    return Word(std::vector<int>(letters_.begin(), letters_.begin() + k));
  }

  bool operator==(const Word&) const = default;

  /// Digit string like "1211" for N <= 9, comma-separated ("1,12,3")
  /// otherwise. The empty word serializes as "-".
  std::string str(int alphabet_size) const;
  static Word parse(const std::string& text, int alphabet_size);

 private:
  std::vector<int> letters_;

  template <typename F>
  friend void for_each_extension(const Word&, int, int, F&&);
};

Word concat(const Word& a, const Word& b);

/// True iff tau extends sigma (sigma is a prefix of tau); reflexive.
bool is_extension(const Word& sigma, const Word& tau);

struct WordHash {
  std::size_t operator()(const Word& w) const {
    std::size_t h = 0x9e3779b97f4a7c15ull;
    for (int letter : w.letters())
      h = (h ^ static_cast<std::size_t>(letter)) * 0x100000001b3ull;
    return h;
  }
};

namespace detail {
inline void check_alphabet(int alphabet_size) {
  if (alphabet_size < 2)
    throw InputError("alphabet size must be at least 2, got " +
                     std::to_string(alphabet_size));
}
}  // namespace detail

/// N^n as an unsigned count; rejects sizes that do not fit in 63 bits.
std::uint64_t level_size(int alphabet_size, int depth);

/// Visits every extension prefix*tau with |tau| = extra_depth, in
/// lexicographic order of tau, without materializing the level. The Word
/// passed to the visitor is reused between calls; copy it to keep it.
template <typename F>
void for_each_extension(const Word& prefix, int alphabet_size, int extra_depth,
                        F&& visit) {
  detail::check_alphabet(alphabet_size);
  if (extra_depth < 0)
    throw InputError("word depth must be nonnegative, got " +
                     std::to_string(extra_depth));
  for (int letter : prefix.letters())
    if (letter < 1 || letter > alphabet_size)
      throw InputError("word letter " + std::to_string(letter) +
                       " outside alphabet {1.." +
                       std::to_string(alphabet_size) + "}");
  Word w = prefix;
  if (extra_depth == 0) {
    visit(static_cast<const Word&>(w));
    return;
  }
  auto& ls = w.letters_;
  const int base = prefix.length();
  ls.insert(ls.end(), static_cast<std::size_t>(extra_depth), 1);
  for (;;) {
    visit(static_cast<const Word&>(w));
    int i = base + extra_depth - 1;
    while (i >= base && ls[static_cast<std::size_t>(i)] == alphabet_size) {
      ls[static_cast<std::size_t>(i)] = 1;
      --i;
    }
    if (i < base) break;
    ++ls[static_cast<std::size_t>(i)];
  }
}

/// Visits all of {1..N}^n in lexicographic order (the level stream).
template <typename F>
void for_each_word(int alphabet_size, int depth, F&& visit) {
  for_each_extension(Word{}, alphabet_size, depth, std::forward<F>(visit));
}

}  // namespace ccdim
