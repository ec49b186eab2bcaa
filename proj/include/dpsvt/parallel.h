// Copyright 2026 The dpsvt Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DPSVT_PARALLEL_H_
#define DPSVT_PARALLEL_H_

#include <algorithm>
#include <cstdint>
#include <thread>
#include <vector>

#include "absl/status/status.h"

namespace dpsvt {

// Splits [0, count) into contiguous chunks, one per hardware thread, and
// calls fn(begin, end, chunk_index) for each. Returns the first failing
// status in chunk order. Results that callers merge must be indexed by chunk
// so the merge order never depends on scheduling.
template <typename Fn>
absl::Status ParallelChunks(std::int64_t count, Fn fn,
                            std::int64_t* num_chunks = nullptr) {
  const std::int64_t workers = std::max<std::int64_t>(
      1, std::min<std::int64_t>(std::thread::hardware_concurrency(), count));
  if (num_chunks != nullptr) *num_chunks = workers;
  std::vector<absl::Status> status(static_cast<std::size_t>(workers));
  auto run = [&](std::int64_t c) {
    const std::int64_t begin = count * c / workers;
    const std::int64_t end = count * (c + 1) / workers;
    status[static_cast<std::size_t>(c)] = fn(begin, end, c);
  };
  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(workers));
    for (std::int64_t c = 0; c < workers; ++c) threads.emplace_back(run, c);
    for (auto& t : threads) t.join();
  }
  for (const absl::Status& s : status) {
    if (!s.ok()) return s;
  }
  return absl::OkStatus();
}

// Number of chunks ParallelChunks will use for count items.
inline std::int64_t ChunkCount(std::int64_t count) {
  return std::max<std::int64_t>(
      1, std::min<std::int64_t>(std::thread::hardware_concurrency(), count));
}

}  // namespace dpsvt

#endif  // DPSVT_PARALLEL_H_
