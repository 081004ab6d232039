// Copyright 2026 The NOMAD Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef NOMAD_PARALLEL_H_
#define NOMAD_PARALLEL_H_

#include <cstddef>
#include <functional>

namespace nomad {

// Runs fn(i) for every i in [0, count) on up to `jobs` threads. Work items
// are claimed dynamically; callers that need deterministic results must
// write into per-index slots and reduce afterwards. The first exception
// thrown by any worker is rethrown on the calling thread.
void ParallelFor(size_t count, int jobs, const std::function<void(size_t)>& fn);

}  // namespace nomad

#endif  // NOMAD_PARALLEL_H_
