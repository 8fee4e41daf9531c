#include "vlmc/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iterator>
#include <set>
#include <sstream>
#include <unordered_map>

#include "vlmc/error.hpp"

namespace vlmc {

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split_ws(const std::string& line) {
  std::istringstream is(line);
  return {std::istream_iterator<std::string>(is), std::istream_iterator<std::string>()};
}

double parse_double(const std::string& token, const std::string& source, std::size_t line_no) {
  double v = 0.0;
  const auto* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, v);
  if (ec != std::errc() || ptr != end)
    throw IoError(source, "line " + std::to_string(line_no) + ": not a number '" + token + "'");
  return v;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path, "cannot open for reading");
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path, "cannot open for writing");
  return out;
}

void finish(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw IoError(path, "write failed");
}

}  // namespace

// ---------------------------------------------------------------------------
// Trees

void write_tree(std::ostream& os, const ProbabilisticContextTree& pct) {
  const Alphabet& A = pct.alphabet();
  os << "alphabet";
  for (const auto& l : A.labels()) os << ' ' << l;
  os << '\n';
  if (const auto& spec = pct.family()) {
    os << "renewal head";
    for (double q : spec->head) os << ' ' << format_double(q);
    os << '\n';
    if (spec->tail == RenewalSpec::Tail::kConstant)
      os << "renewal tail constant " << format_double(spec->c) << '\n';
    else
      os << "renewal tail geometric " << format_double(spec->c) << ' ' << format_double(spec->r) << '\n';
    return;
  }
  for (std::size_t i = 0; i < pct.tree().size(); ++i) {
    os << A.format(pct.tree().contexts()[i]);
    for (Eigen::Index a = 0; a < pct.row(i).size(); ++a) os << ' ' << format_double(pct.row(i)[a]);
    os << '\n';
  }
}

ProbabilisticContextTree read_tree(std::istream& is, const std::string& source) {
  std::optional<Alphabet> alphabet;
  std::vector<std::pair<Word, Eigen::VectorXd>> rows;
  std::optional<RenewalSpec> renewal;
  bool have_tail = false;
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& what) -> IoError {
    return IoError(source, "line " + std::to_string(line_no) + ": " + what);
  };
  while (std::getline(is, line)) {
    ++line_no;
    const auto tokens = split_ws(line);
    if (tokens.empty() || tokens[0][0] == '#') continue;
    if (tokens[0] == "alphabet") {
      if (alphabet) throw fail("duplicate alphabet line");
      try {
        alphabet = Alphabet(std::vector<std::string>(tokens.begin() + 1, tokens.end()));
      } catch (const PreconditionError& e) {
        throw fail(e.what());
      }
      continue;
    }
    if (!alphabet) throw fail("records before the alphabet line");
    if (tokens[0] == "renewal") {
      if (!rows.empty()) throw fail("renewal parameters mixed with context records");
      if (!renewal) renewal = RenewalSpec{};
      if (tokens.size() >= 2 && tokens[1] == "head") {
        for (std::size_t i = 2; i < tokens.size(); ++i) renewal->head.push_back(parse_double(tokens[i], source, line_no));
      } else if (tokens.size() == 4 && tokens[1] == "tail" && tokens[2] == "constant") {
        renewal->tail = RenewalSpec::Tail::kConstant;
        renewal->c = parse_double(tokens[3], source, line_no);
        have_tail = true;
      } else if (tokens.size() == 5 && tokens[1] == "tail" && tokens[2] == "geometric") {
        renewal->tail = RenewalSpec::Tail::kGeometric;
        renewal->c = parse_double(tokens[3], source, line_no);
        renewal->r = parse_double(tokens[4], source, line_no);
        have_tail = true;
      } else {
        throw fail("malformed renewal line");
      }
      continue;
    }
    if (renewal) throw fail("renewal parameters mixed with context records");
    if (tokens.size() != alphabet->size() + 1)
      throw fail("expected a context and " + std::to_string(alphabet->size()) + " probabilities");
    Word context;
    try {
      context = alphabet->parse(tokens[0]);
    } catch (const PreconditionError& e) {
      throw fail(e.what());
    }
    if (context.empty()) throw fail("empty context");
    Eigen::VectorXd row(static_cast<Eigen::Index>(alphabet->size()));
    for (std::size_t a = 0; a < alphabet->size(); ++a)
      row[static_cast<Eigen::Index>(a)] = parse_double(tokens[a + 1], source, line_no);
    rows.emplace_back(std::move(context), std::move(row));
  }
  if (is.bad()) throw IoError(source, "read failed");
  if (!alphabet) throw IoError(source, "missing alphabet line");
  if (renewal) {
    if (!have_tail) throw IoError(source, "renewal family without a tail rule");
    if (!(*alphabet == Alphabet::binary())) throw IoError(source, "renewal family needs alphabet 0 1");
    try {
      return renewal_tree(*renewal, std::max<std::size_t>(1, renewal->head.size()) + 1);
    } catch (const PreconditionError& e) {
      throw IoError(source, e.what());
    }
  }
  if (rows.empty()) throw IoError(source, "no context records");
  return ProbabilisticContextTree(*alphabet, std::move(rows));
}

void save_tree(const std::string& path, const ProbabilisticContextTree& pct) {
  auto out = open_out(path);
  write_tree(out, pct);
  finish(out, path);
}

ProbabilisticContextTree load_tree(const std::string& path) {
  auto in = open_in(path);
  return read_tree(in, path);
}

// ---------------------------------------------------------------------------
// Samples

void write_sample(std::ostream& os, const SymbolSequence& seq) {
  const bool concat = seq.alphabet.single_char();
  for (std::size_t i = 0; i < seq.symbols.size(); ++i) {
    if (!concat && i > 0) os << ' ';
    os << seq.alphabet.label(seq.symbols[i]);
  }
  os << '\n';
}

SymbolSequence read_sample(std::istream& is, const std::string& source, const std::optional<Alphabet>& alphabet) {
  std::string text((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  if (is.bad()) throw IoError(source, "read failed");
  while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) text.pop_back();
  std::vector<std::string> units;
  if (text.find_first_of(" \t\r\n") != std::string::npos) {
    units = split_ws(text);
  } else {
    units.reserve(text.size());
    for (char ch : text) units.emplace_back(1, ch);
  }
  if (units.empty()) throw PreconditionError(source + ": empty sample");
  Alphabet A;
  if (alphabet) {
    A = *alphabet;
  } else {
    std::set<std::string> distinct(units.begin(), units.end());
    A = Alphabet(std::vector<std::string>(distinct.begin(), distinct.end()));
  }
  SymbolSequence seq{A, {}};
  seq.symbols.reserve(units.size());
  for (const auto& u : units) {
    if (!A.contains(u)) throw PreconditionError(source + ": symbol '" + u + "' is not in the alphabet");
    seq.symbols.push_back(A.index_of(u));
  }
  return seq;
}

void save_sample(const std::string& path, const SymbolSequence& seq) {
  auto out = open_out(path);
  write_sample(out, seq);
  finish(out, path);
}

SymbolSequence load_sample(const std::string& path, const std::optional<Alphabet>& alphabet) {
  auto in = open_in(path);
  return read_sample(in, path, alphabet);
}

// ---------------------------------------------------------------------------
// Ingestion

std::optional<IngestMode> parse_ingest_mode(std::string_view name) {
  if (name == "bytes") return IngestMode::kBytes;
  if (name == "chars") return IngestMode::kChars;
  if (name == "token-list") return IngestMode::kTokens;
  return std::nullopt;
}

std::string escape_label(std::string_view unit) {
  std::string out;
  for (unsigned char ch : unit) {
    if (ch <= 0x20 || ch == 0x7f || ch == ',' || ch == '\\' || ch == '#') {
      char buf[5];
      std::snprintf(buf, sizeof buf, "\\x%02X", ch);
      out += buf;
    } else {
      out.push_back(static_cast<char>(ch));
    }
  }
  return out;
}

std::string unescape_label(std::string_view label) {
  std::string out;
  for (std::size_t i = 0; i < label.size(); ++i) {
    if (label[i] == '\\' && i + 3 < label.size() && label[i + 1] == 'x') {
      unsigned value = 0;
      auto [ptr, ec] = std::from_chars(label.data() + i + 2, label.data() + i + 4, value, 16);
      if (ec == std::errc() && ptr == label.data() + i + 4) {
        out.push_back(static_cast<char>(value));
        i += 3;
        continue;
      }
    }
    out.push_back(label[i]);
  }
  return out;
}

namespace {

std::size_t utf8_length(std::string_view text, std::size_t i) {
  const auto lead = static_cast<unsigned char>(text[i]);
  std::size_t len = 1;
  if (lead >= 0xF0 && lead <= 0xF4)
    len = 4;
  else if (lead >= 0xE0)
    len = lead <= 0xEF ? 3 : 1;
  else if (lead >= 0xC2)
    len = 2;
  if (i + len > text.size()) return 1;
  for (std::size_t j = 1; j < len; ++j)
    if ((static_cast<unsigned char>(text[i + j]) & 0xC0) != 0x80) return 1;
  return len;
}

}  // namespace

SymbolSequence ingest_string(std::string_view text, IngestMode mode) {
  std::vector<std::string_view> units;
  switch (mode) {
    case IngestMode::kBytes:
      for (std::size_t i = 0; i < text.size(); ++i) units.push_back(text.substr(i, 1));
      break;
    case IngestMode::kChars:
      for (std::size_t i = 0; i < text.size();) {
        const std::size_t len = utf8_length(text, i);
        units.push_back(text.substr(i, len));
        i += len;
      }
      break;
    case IngestMode::kTokens: {
      std::size_t i = 0;
      while (i < text.size()) {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        std::size_t j = i;
        while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
        if (j > i) units.push_back(text.substr(i, j - i));
        i = j;
      }
      break;
    }
  }
  if (units.empty()) throw PreconditionError("empty input");
  std::unordered_map<std::string_view, Symbol> index;
  std::vector<std::string> labels;
  Word symbols;
  symbols.reserve(units.size());
  for (auto u : units) {
    auto it = index.find(u);
    if (it == index.end()) {
      if (labels.size() == kMaxAlphabetSize) throw PreconditionError("more than 65536 distinct units");
      it = index.emplace(u, static_cast<Symbol>(labels.size())).first;
      labels.push_back(escape_label(u));
    }
    symbols.push_back(it->second);
  }
  if (labels.size() < 2) throw PreconditionError("input has a single distinct unit; an alphabet needs two");
  return SymbolSequence{Alphabet(std::move(labels)), std::move(symbols)};
}

SymbolSequence ingest_text(const std::string& path, IngestMode mode) {
  auto in = open_in(path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError(path, "read failed");
  try {
    return ingest_string(text, mode);
  } catch (const PreconditionError& e) {
    throw PreconditionError(path + ": " + e.what());
  }
}

std::string export_text(const SymbolSequence& seq, IngestMode mode) {
  std::vector<std::string> raw;
  raw.reserve(seq.alphabet.size());
  for (const auto& l : seq.alphabet.labels()) raw.push_back(unescape_label(l));
  std::string out;
  for (std::size_t i = 0; i < seq.symbols.size(); ++i) {
    if (mode == IngestMode::kTokens && i > 0) out.push_back(' ');
    out += raw[seq.symbols[i]];
  }
  return out;
}

}  // namespace vlmc
