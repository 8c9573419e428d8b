#include "ens/training/desk_script.hpp"

#include "ens/core/error.hpp"
#include "ens/core/text.hpp"

namespace ens::training {

namespace {

constexpr std::string_view kGenericReply = "I understand. Let us keep talking about the offer.";
constexpr std::string_view kGarbage = "<R> The user feels ??? </A> incomplete output";

std::string blend(const std::string& a, const std::string& b) {
  const auto wa = text::split_whitespace(a);
  const auto wb = text::split_whitespace(b);
  std::vector<std::string> out(wa.begin(), wa.begin() + static_cast<std::ptrdiff_t>((wa.size() + 1) / 2));
  out.insert(out.end(), wb.begin() + static_cast<std::ptrdiff_t>(wb.size() / 2), wb.end());
  return text::join(out, " ");
}

// Drops roughly a third of the words, keeping order.
std::string perturb(const std::string& s, std::uint64_t salt) {
  const auto words = text::split_whitespace(s);
  if (words.size() < 3) return s + " Please consider it.";
  std::vector<std::string> kept;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (text::mix64(salt + i) % 3 != 0 || kept.empty()) kept.push_back(words[i]);
  }
  return text::join(kept, " ");
}

std::string completion(const EnsCotRationale& rationale, const std::string& response,
                       AblationMask mask) {
  EnsCotRationale r = rationale;
  r.response = response;
  return render_tagged_target(apply_mask(r, mask), response, mask).text;
}

}  // namespace

model::ScriptTable build_desk_script(const std::vector<LabeledRecord>& labeled,
                                     const std::vector<UnlabeledRecord>& unlabeled,
                                     AblationMask mask, std::uint64_t seed) {
  if (labeled.empty()) throw Error(ErrorCode::kEmptyBatch, "desk script needs labeled records");

  struct Context {
    std::string id;
    std::string prompt;
    std::string response;
    const EnsCotRationale* rationale;
  };
  std::vector<Context> contexts;
  for (const auto& r : labeled) contexts.push_back({r.id, render_prompt(r.context), r.response, &r.rationale});
  for (const auto& u : unlabeled) {
    const auto& donor = labeled[text::derive_seed(seed, text::fnv1a(u.id)) % labeled.size()];
    contexts.push_back({u.id, render_prompt(u.context), u.response, &donor.rationale});
  }

  model::ScriptTable table;
  for (std::size_t i = 0; i < contexts.size(); ++i) {
    const auto& c = contexts[i];
    const std::uint64_t h = text::derive_seed(seed, text::fnv1a(c.id));
    const auto& other = contexts[(i + 1 + h % std::max<std::size_t>(1, contexts.size() - 1)) % contexts.size()];
    const std::string foreign = other.response == c.response ? std::string(kGenericReply) + " Really."
                                                             : other.response;
    table.add(c.prompt, {
                            completion(*c.rationale, c.response, mask),
                            completion(*c.rationale, perturb(c.response, h), mask),
                            completion(*other.rationale, foreign, mask),
                            completion(*c.rationale, std::string(kGenericReply), mask),
                            std::string(kGarbage),
                            completion(*c.rationale, blend(c.response, foreign), mask),
                        });
  }
  std::vector<std::string> fallback;
  for (std::size_t i = 0; i < labeled.size() && i < 4; ++i) {
    fallback.push_back(completion(labeled[i].rationale, labeled[i].response, mask));
  }
  table.set_fallback(std::move(fallback));
  return table;
}

}  // namespace ens::training
