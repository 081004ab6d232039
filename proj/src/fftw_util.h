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

#ifndef NOMAD_SRC_FFTW_UTIL_H_
#define NOMAD_SRC_FFTW_UTIL_H_

#include <mutex>

namespace nomad::internal {

// FFTW planning is not thread-safe; every plan create/destroy in this
// library holds this lock. Executing distinct plans concurrently is safe.
std::mutex& FftwPlannerMutex();

}  // namespace nomad::internal

#endif  // NOMAD_SRC_FFTW_UTIL_H_
