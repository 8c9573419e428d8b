#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace ens::text {

std::string_view trim(std::string_view s);
std::string to_lower(std::string_view s);
bool starts_with(std::string_view s, std::string_view prefix);

// Lowercase, hyphens and underscores to spaces, whitespace collapsed.
std::string normalize_label(std::string_view s);

// Lowercase, punctuation stripped, whitespace collapsed. Used for dedup keys.
std::string normalize_for_dedup(std::string_view s);

std::vector<std::string> split_whitespace(std::string_view s);

// Metric tokenizer: lowercase, punctuation detached into its own tokens,
// whitespace split. Apostrophes inside words are kept ("don't").
std::vector<std::string> metric_tokens(std::string_view s);

std::size_t word_count(std::string_view s);

std::uint64_t fnv1a(std::string_view s);

// SplitMix64 finalizer; used to derive independent seeds from a run seed.
std::uint64_t mix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                          std::uint64_t c = 0);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

}  // namespace ens::text
