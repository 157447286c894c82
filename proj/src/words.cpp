#include "ccdim/words.hpp"

#include <charconv>

namespace ccdim {

std::string Word::str(int alphabet_size) const {
  detail::check_alphabet(alphabet_size);
  if (empty()) return "-";
  std::string out;
  if (alphabet_size <= 9) {
    for (int letter : letters_) out.push_back(static_cast<char>('0' + letter));
  } else {
    for (std::size_t i = 0; i < letters_.size(); ++i) {
      if (i > 0) out.push_back(',');
      out += std::to_string(letters_[i]);
    }
  }
  return out;
}

Word Word::parse(const std::string& text, int alphabet_size) {
  detail::check_alphabet(alphabet_size);
  if (text == "-" || text.empty()) return Word{};
  std::vector<int> letters;
  auto push_checked = [&](int v, const std::string& token) {
    if (v < 1 || v > alphabet_size)
      throw InputError("word letter '" + token + "' outside alphabet {1.." +
                       std::to_string(alphabet_size) + "}");
    letters.push_back(v);
  };
  if (alphabet_size <= 9 && text.find(',') == std::string::npos) {
    for (char ch : text) {
      if (ch < '0' || ch > '9')
        throw InputError("invalid character '" + std::string(1, ch) +
                         "' in word \"" + text + "\"");
      push_checked(ch - '0', std::string(1, ch));
    }
    return Word(std::move(letters));
  }
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::string token =
        text.substr(start, comma == std::string::npos ? comma : comma - start);
    int v = 0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc{} || ptr != token.data() + token.size())
      throw InputError("invalid letter token '" + token + "' in word \"" +
                       text + "\"");
    push_checked(v, token);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return Word(std::move(letters));
}

Word concat(const Word& a, const Word& b) {
  std::vector<int> out = a.letters();
  out.insert(out.end(), b.letters().begin(), b.letters().end());
  return Word(std::move(out));
}

bool is_extension(const Word& sigma, const Word& tau) {
  if (tau.length() < sigma.length()) return false;
  for (int i = 0; i < sigma.length(); ++i)
    if (tau.letter(i) != sigma.letter(i)) return false;
  return true;
}

std::uint64_t level_size(int alphabet_size, int depth) {
  detail::check_alphabet(alphabet_size);
  if (depth < 0)
    throw InputError("word depth must be nonnegative, got " +
                     std::to_string(depth));
  std::uint64_t n = 1;
  for (int i = 0; i < depth; ++i) {
    if (n > (std::uint64_t{1} << 62) / static_cast<std::uint64_t>(alphabet_size))
      throw InputError("level {1.." + std::to_string(alphabet_size) + "}^" +
                       std::to_string(depth) + " is too large to count");
    n *= static_cast<std::uint64_t>(alphabet_size);
  }
  return n;
}

}  // namespace ccdim
