#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "ens/core/dialogue.hpp"

namespace ens::corpus {

struct SplitSizes {
  std::size_t train = 0, dev = 0, test = 0;
};

// train = round(r0 n), dev = round(r1 n), test = the rest. Throws RatioError
// unless ratios are non-negative and sum to 1 within 1e-9.
SplitSizes split_sizes(std::size_t n, const std::array<double, 3>& ratios);

// Seeded shuffle of indices [0, n) cut into train/dev/test.
std::array<std::vector<std::size_t>, 3> split_indices(std::size_t n,
                                                      const std::array<double, 3>& ratios,
                                                      std::uint64_t seed);

struct CorpusSplits {
  std::vector<Dialogue> train, dev, test;
};

CorpusSplits split_corpus(const std::vector<Dialogue>& dialogues,
                          const std::array<double, 3>& ratios, std::uint64_t seed);

struct CorpusStats {
  std::string split;
  std::size_t dialogues = 0;
  std::size_t utterances = 0;
  double mean_utterances = 0.0;  // 0 for an empty corpus
};

CorpusStats corpus_stats(const std::string& split, const std::vector<Dialogue>& dialogues);

// "split  dialogues  utterances  mean" table, mean to 2 decimals.
std::string format_stats(const std::vector<CorpusStats>& stats);

}  // namespace ens::corpus
