// Copyright 2026 The kopkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef KOPKIT_PARALLEL_H_
#define KOPKIT_PARALLEL_H_

#include <cstddef>
#include <functional>

namespace kopkit {

// Worker count: KOPKIT_THREADS if set and positive, otherwise the hardware
// concurrency (at least 1).
int WorkerCount();

// Runs body(i) for i in [0, count) over up to `workers` threads (0 means
// WorkerCount()). The first exception thrown by any body is rethrown after
// all workers have joined.
void ParallelFor(std::size_t count, const std::function<void(std::size_t)>& body,
                 int workers = 0);

}  // namespace kopkit

#endif  // KOPKIT_PARALLEL_H_
