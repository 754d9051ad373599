#include "nooks/domain/samples.hpp"

#include <algorithm>

namespace nooks {

std::vector<SampleNook> default_samples() {
  return {
      {"Is anyone else also watching the match tonight", "Let's meet"},
      {"Let's plan an activity for the weekend", "Museums, parks, food?"},
      {"Share an embarrassing moment in your life", "I (unfortunately) have too many to share :)"},
      {"What's a new interest you've gotten into in the last 6-12 months?", ""},
      {"Has anyone watched any interesting TV series recently?", ""},
  };
}

std::vector<SampleNook> sample_nooks(std::size_t page, std::span<const SampleNook> samples) {
  std::vector<SampleNook> out;
  if (samples.empty()) return out;
  const std::size_t n = samples.size();
  const std::size_t count = std::min(kSamplePageSize, n);
  const std::size_t start = (page % n) * kSamplePageSize % n;
  for (std::size_t i = 0; i < count; ++i) out.push_back(samples[(start + i) % n]);
  return out;
}

}  // namespace nooks
