#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace vlmc {

/// Symbols are indices into an Alphabet.
using Symbol = std::uint16_t;

/// A finite string of symbols, always stored in time order: element 0 is the
/// oldest symbol. Used for samples, contexts and arbitrary query strings.
using Word = std::vector<Symbol>;
using WordView = std::span<const Symbol>;

inline constexpr std::size_t kMaxAlphabetSize = 65536;

/// Ordered set of distinct text labels; the position of a label is its Symbol.
class Alphabet {
 public:
  Alphabet() = default;
  explicit Alphabet(std::vector<std::string> labels);

  /// The binary alphabet {0, 1} used by the renewal family and the builtins.
  static Alphabet binary();

  std::size_t size() const noexcept { return labels_.size(); }
  const std::string& label(Symbol s) const { return labels_.at(s); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }

  /// Throws PreconditionError for unknown labels.
  Symbol index_of(std::string_view label) const;
  bool contains(std::string_view label) const;

  /// True when every label is exactly one byte long, in which case strings
  /// are written by concatenating labels.
  bool single_char() const noexcept { return single_char_; }

  /// Render a word with this alphabet's labels (concatenated, or joined with
  /// ',' for multi-character alphabets). The empty word renders as "".
  std::string format(WordView w) const;
  /// Inverse of format().
  Word parse(std::string_view text) const;

  bool operator==(const Alphabet& other) const { return labels_ == other.labels_; }

 private:
  std::vector<std::string> labels_;
  std::unordered_map<std::string, Symbol> index_;
  bool single_char_ = true;
};

/// Whether `suffix` is a (not necessarily proper) suffix of `w`.
bool is_suffix(WordView suffix, WordView w);

/// The most recent `k` symbols of `w` (k <= |w|).
inline WordView last_symbols(WordView w, std::size_t k) { return w.subspan(w.size() - k); }

}  // namespace vlmc
