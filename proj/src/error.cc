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

#include "nomad/error.h"

namespace nomad {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kNotFound: return "NotFound";
    case ErrorCode::kIo: return "IoError";
    case ErrorCode::kUnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::kCorruptHeader: return "CorruptHeader";
    case ErrorCode::kSignalTooShort: return "SignalTooShort";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kPatchTooLarge: return "PatchTooLarge";
    case ErrorCode::kDegenerateSignal: return "DegenerateSignal";
    case ErrorCode::kSilentInput: return "SilentInput";
    case ErrorCode::kUnsupportedBitrate: return "UnsupportedBitrate";
    case ErrorCode::kMissingEncoder: return "MissingEncoder";
    case ErrorCode::kEncoderFailed: return "EncoderFailed";
    case ErrorCode::kEmptyCorpus: return "EmptyCorpus";
    case ErrorCode::kTooFewEntries: return "TooFewEntries";
    case ErrorCode::kEmptyNegativeSet: return "EmptyNegativeSet";
    case ErrorCode::kExhaustedSampler: return "ExhaustedSampler";
    case ErrorCode::kBandMismatch: return "BandMismatch";
    case ErrorCode::kCorruptCheckpoint: return "CorruptCheckpoint";
    case ErrorCode::kEmptyPool: return "EmptyPool";
    case ErrorCode::kJoinEmpty: return "JoinEmpty";
    case ErrorCode::kDegenerateInput: return "DegenerateInput";
    case ErrorCode::kDataError: return "DataError";
  }
  return "Unknown";
}

}  // namespace nomad
