// SPDX-License-Identifier: Apache-2.0
//
// waveformlab: multicarrier waveform and iterative detector simulation
// Copyright (C) 2026 The waveformlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include "waveformlab/channel/channel_io.hpp"
#include "waveformlab/channel/mimo_channel.hpp"
#include "waveformlab/channel/paths.hpp"
#include "waveformlab/channel/time_channel.hpp"
#include "waveformlab/detectors/constellation.hpp"
#include "waveformlab/detectors/damping.hpp"
#include "waveformlab/detectors/denoiser.hpp"
#include "waveformlab/detectors/lmmse.hpp"
#include "waveformlab/detectors/mamp.hpp"
#include "waveformlab/detectors/moments.hpp"
#include "waveformlab/detectors/oamp.hpp"
#include "waveformlab/detectors/trace.hpp"
#include "waveformlab/harness/compare.hpp"
#include "waveformlab/harness/config.hpp"
#include "waveformlab/harness/oracle.hpp"
#include "waveformlab/harness/probes.hpp"
#include "waveformlab/harness/sweep.hpp"
#include "waveformlab/harness/trial.hpp"
#include "waveformlab/numerics/fft.hpp"
#include "waveformlab/numerics/permutation.hpp"
#include "waveformlab/numerics/rng.hpp"
#include "waveformlab/numerics/spectral.hpp"
#include "waveformlab/numerics/stats.hpp"
#include "waveformlab/numerics/types.hpp"
#include "waveformlab/waveforms/effective_channel.hpp"
#include "waveformlab/waveforms/prefix.hpp"
#include "waveformlab/waveforms/scheme.hpp"

#ifndef WAVEFORMLAB_VERSION
#define WAVEFORMLAB_VERSION "0.1.0"
#endif
#ifndef WAVEFORMLAB_GIT_ID
#define WAVEFORMLAB_GIT_ID "unknown"
#endif

namespace wfl {

inline constexpr const char* version = WAVEFORMLAB_VERSION;
/// `git describe --always --dirty` at configure time, or "unknown".
inline constexpr const char* version_id = WAVEFORMLAB_GIT_ID;

}  // namespace wfl
