#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "vlmc/alphabet.hpp"
#include "vlmc/context_tree.hpp"
#include "vlmc/sampler.hpp"

namespace vlmc {

// Tree files
//
//   # comment
//   alphabet 0 1
//   1 0.7 0.3
//   10 0.2 0.8
//   00 0.8 0.2
//
// One record per context: the context in time order, then |A| probabilities
// written with 17 significant digits. Contexts over multi-character labels
// are written with ',' between labels. A renewal family replaces the records
// by its parameters:
//
//   alphabet 0 1
//   renewal head 0.9 0.4
//   renewal tail constant 0.5          (or: renewal tail geometric c r)

void write_tree(std::ostream& os, const ProbabilisticContextTree& pct);
/// Syntax errors throw IoError naming `source` and the line; the tree is not
/// validated here.
ProbabilisticContextTree read_tree(std::istream& is, const std::string& source);

void save_tree(const std::string& path, const ProbabilisticContextTree& pct);
ProbabilisticContextTree load_tree(const std::string& path);

// Sample files: a single line holding the labels, concatenated when every
// label is one character and whitespace-separated otherwise.

void write_sample(std::ostream& os, const SymbolSequence& seq);
/// Reads whitespace-separated tokens when the line contains whitespace and
/// single characters otherwise. Without an alphabet the distinct units are
/// used in sorted order.
SymbolSequence read_sample(std::istream& is, const std::string& source,
                           const std::optional<Alphabet>& alphabet = std::nullopt);

void save_sample(const std::string& path, const SymbolSequence& seq);
SymbolSequence load_sample(const std::string& path, const std::optional<Alphabet>& alphabet = std::nullopt);

// Ingestion of raw text

enum class IngestMode { kBytes, kChars, kTokens };

std::optional<IngestMode> parse_ingest_mode(std::string_view name);

/// Units are bytes, UTF-8 code points, or whitespace-separated tokens. The
/// alphabet lists distinct units in first-occurrence order; labels escape
/// whitespace, control bytes, ',', '#' and '\' as \xNN.
SymbolSequence ingest_text(const std::string& path, IngestMode mode);
SymbolSequence ingest_string(std::string_view text, IngestMode mode);

/// Raw text whose ingestion in `mode` gives back `seq` (tokens are joined by
/// single spaces).
std::string export_text(const SymbolSequence& seq, IngestMode mode);

std::string escape_label(std::string_view unit);
std::string unescape_label(std::string_view label);

}  // namespace vlmc
