#include "vlmc/alphabet.hpp"

#include <algorithm>

#include "vlmc/error.hpp"

namespace vlmc {

Alphabet::Alphabet(std::vector<std::string> labels) : labels_(std::move(labels)) {
  if (labels_.size() < 2) throw PreconditionError("alphabet needs at least 2 symbols");
  if (labels_.size() > kMaxAlphabetSize) throw PreconditionError("alphabet exceeds 65536 symbols");
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    const auto& l = labels_[i];
    if (l.empty()) throw PreconditionError("empty symbol label");
    if (l.find_first_of(" \t\r\n,") != std::string::npos)
      throw PreconditionError("symbol label contains whitespace or ',': '" + l + "'");
    if (!index_.emplace(l, static_cast<Symbol>(i)).second)
      throw PreconditionError("duplicate symbol label '" + l + "'");
    if (l.size() != 1) single_char_ = false;
  }
}

Alphabet Alphabet::binary() { return Alphabet({"0", "1"}); }

Symbol Alphabet::index_of(std::string_view label) const {
  auto it = index_.find(std::string(label));
  if (it == index_.end()) throw PreconditionError("unknown symbol '" + std::string(label) + "'");
  return it->second;
}

bool Alphabet::contains(std::string_view label) const {
  return index_.contains(std::string(label));
}

std::string Alphabet::format(WordView w) const {
  std::string out;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!single_char_ && i > 0) out += ',';
    out += labels_.at(w[i]);
  }
  return out;
}

Word Alphabet::parse(std::string_view text) const {
  Word w;
  if (single_char_) {
    w.reserve(text.size());
    for (char c : text) w.push_back(index_of(std::string_view(&c, 1)));
    return w;
  }
  std::size_t start = 0;
  while (start <= text.size() && !text.empty()) {
    auto comma = text.find(',', start);
    if (comma == std::string_view::npos) comma = text.size();
    w.push_back(index_of(text.substr(start, comma - start)));
    start = comma + 1;
    if (comma == text.size()) break;
  }
  return w;
}

bool is_suffix(WordView suffix, WordView w) {
  if (suffix.size() > w.size()) return false;
  return std::equal(suffix.begin(), suffix.end(), w.end() - static_cast<std::ptrdiff_t>(suffix.size()));
}

}  // namespace vlmc
