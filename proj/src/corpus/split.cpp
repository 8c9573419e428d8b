#include "ens/corpus/split.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>

#include "ens/core/error.hpp"
#include "ens/core/random.hpp"
#include "ens/core/text.hpp"

namespace ens::corpus {

SplitSizes split_sizes(std::size_t n, const std::array<double, 3>& r) {
  for (double v : r) {
    if (!(v >= 0.0)) throw Error(ErrorCode::kRatio, "split ratios must be non-negative");
  }
  if (std::abs(r[0] + r[1] + r[2] - 1.0) > 1e-9) {
    throw Error(ErrorCode::kRatio, "split ratios must sum to 1");
  }
  const double dn = static_cast<double>(n);
  SplitSizes s;
  s.train = std::min<std::size_t>(n, static_cast<std::size_t>(std::llround(r[0] * dn)));
  s.dev = std::min<std::size_t>(n - s.train, static_cast<std::size_t>(std::llround(r[1] * dn)));
  s.test = n - s.train - s.dev;
  return s;
}

std::array<std::vector<std::size_t>, 3> split_indices(std::size_t n,
                                                      const std::array<double, 3>& ratios,
                                                      std::uint64_t seed) {
  const auto sizes = split_sizes(n, ratios);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 g(text::derive_seed(seed, 0x5917ULL));
  rng::shuffle(order, g);
  std::array<std::vector<std::size_t>, 3> out;
  out[0].assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(sizes.train));
  out[1].assign(order.begin() + static_cast<std::ptrdiff_t>(sizes.train),
                order.begin() + static_cast<std::ptrdiff_t>(sizes.train + sizes.dev));
  out[2].assign(order.begin() + static_cast<std::ptrdiff_t>(sizes.train + sizes.dev), order.end());
  return out;
}

CorpusSplits split_corpus(const std::vector<Dialogue>& dialogues,
                          const std::array<double, 3>& ratios, std::uint64_t seed) {
  const auto idx = split_indices(dialogues.size(), ratios, seed);
  CorpusSplits out;
  for (auto i : idx[0]) out.train.push_back(dialogues[i]);
  for (auto i : idx[1]) out.dev.push_back(dialogues[i]);
  for (auto i : idx[2]) out.test.push_back(dialogues[i]);
  return out;
}

CorpusStats corpus_stats(const std::string& split, const std::vector<Dialogue>& dialogues) {
  CorpusStats s;
  s.split = split;
  s.dialogues = dialogues.size();
  for (const auto& d : dialogues) s.utterances += d.turns.size();
  s.mean_utterances =
      s.dialogues == 0 ? 0.0 : static_cast<double>(s.utterances) / static_cast<double>(s.dialogues);
  return s;
}

std::string format_stats(const std::vector<CorpusStats>& stats) {
  std::string out = "split\tdialogues\tutterances\tmean\n";
  for (const auto& s : stats) {
    char mean[32];
    std::snprintf(mean, sizeof(mean), "%.2f", s.mean_utterances);
    out += s.split + "\t" + std::to_string(s.dialogues) + "\t" + std::to_string(s.utterances) + "\t" +
           mean + "\n";
  }
  return out;
}

}  // namespace ens::corpus
