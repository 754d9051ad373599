#pragma once

#include <span>
#include <string>
#include <vector>

namespace nooks {

struct SampleNook {
  std::string topic;
  std::string initial_thoughts;
  bool operator==(const SampleNook&) const = default;
};

inline constexpr std::size_t kSamplePageSize = 2;

/// Samples shipped with a fresh workspace; administrators can replace them.
std::vector<SampleNook> default_samples();

/// Round-robin page of up to two samples. Page p starts at index 2p modulo
/// the list size and wraps. Empty input gives an empty page.
std::vector<SampleNook> sample_nooks(std::size_t page, std::span<const SampleNook> samples);

}  // namespace nooks
