#pragma once

#include "levyshe/errors.hpp"
#include "levyshe/parallel.hpp"
#include "levyshe/summation.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace levyshe {

struct BlowUpRecord
{
  std::size_t replica;
  std::size_t step;
  double max_abs;
};

/// Per-slot replica means of x and x^2, reproducible for any worker count.
struct ReplicaMoments
{
  std::vector<double> mean;
  std::vector<double> mean_sq;
  std::size_t count = 0;
  std::vector<BlowUpRecord> blowups;

  /// Standard error of slot j's mean.
  double stderr_of(std::size_t j) const
  {
    if (count < 2)
      return std::nan("");
    const double n = static_cast<double>(count);
    const double var = std::max(0.0, (mean_sq[j] - mean[j] * mean[j]) * n / (n - 1.0));
    return std::sqrt(var / n);
  }
};

/// body(workspace, replica, out) writes `slots` values for one replica; a
/// BlowUpError drops that replica and is recorded. Replicas are grouped in
/// fixed blocks, each block summed in replica order and the blocks combined
/// in block order.
template <class MakeWorkspace, class Body>
ReplicaMoments reduce_replicas(std::size_t replicas, std::size_t slots,
                               unsigned workers, MakeWorkspace make_workspace,
                               Body body)
{
  struct Block
  {
    std::vector<CompensatedSum> sum, sum_sq;
    std::size_t count = 0;
    std::vector<BlowUpRecord> blowups;
  };
  const std::size_t nblocks = block_count(replicas);
  std::vector<Block> blocks(nblocks);
  parallel_for(nblocks, workers, make_workspace, [&](auto& ws, std::size_t b) {
    Block& blk = blocks[b];
    blk.sum.assign(slots, {});
    blk.sum_sq.assign(slots, {});
    std::vector<double> out(slots);
    const std::size_t end = std::min(replicas, (b + 1) * kReplicaBlock);
    for (std::size_t r = b * kReplicaBlock; r < end; ++r) {
      try {
        body(ws, r, std::span<double>(out));
      } catch (const BlowUpError& e) {
        blk.blowups.push_back({ r, e.step(), e.max_abs() });
        continue;
      }
      for (std::size_t j = 0; j < slots; ++j) {
        blk.sum[j].add(out[j]);
        blk.sum_sq[j].add(out[j] * out[j]);
      }
      ++blk.count;
    }
  });

  ReplicaMoments m;
  std::vector<CompensatedSum> sum(slots), sum_sq(slots);
  for (auto& blk : blocks) {
    for (std::size_t j = 0; j < slots; ++j) {
      sum[j].add(blk.sum[j]);
      sum_sq[j].add(blk.sum_sq[j]);
    }
    m.count += blk.count;
    m.blowups.insert(m.blowups.end(), blk.blowups.begin(), blk.blowups.end());
  }
  m.mean.resize(slots);
  m.mean_sq.resize(slots);
  const double n = static_cast<double>(m.count);
  for (std::size_t j = 0; j < slots; ++j) {
    m.mean[j] = m.count ? sum[j].value() / n : std::nan("");
    m.mean_sq[j] = m.count ? sum_sq[j].value() / n : std::nan("");
  }
  return m;
}

} // namespace levyshe
