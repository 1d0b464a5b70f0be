// Copyright 2026 The mtrvp Authors
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


// Umbrella header for the whole library.

#ifndef MTRVP__MTRVP_HPP_
#define MTRVP__MTRVP_HPP_

#include "mtrvp/core/scenario_io.hpp"
#include "mtrvp/core/types.hpp"
#include "mtrvp/core/validate.hpp"
#include "mtrvp/diffmath/attention.hpp"
#include "mtrvp/diffmath/ops.hpp"
#include "mtrvp/diffmath/random.hpp"
#include "mtrvp/diffmath/tape.hpp"
#include "mtrvp/diffmath/tensor.hpp"
#include "mtrvp/metrics/ade.hpp"
#include "mtrvp/metrics/report.hpp"
#include "mtrvp/metrics/rfs.hpp"
#include "mtrvp/model/decoder.hpp"
#include "mtrvp/model/encoder.hpp"
#include "mtrvp/model/model.hpp"
#include "mtrvp/model/params.hpp"
#include "mtrvp/scenariogen/frame.hpp"
#include "mtrvp/scenariogen/generator.hpp"
#include "mtrvp/training/ablation.hpp"
#include "mtrvp/training/adam.hpp"
#include "mtrvp/training/checkpoint.hpp"
#include "mtrvp/training/config.hpp"
#include "mtrvp/training/split.hpp"
#include "mtrvp/training/trainer.hpp"
#include "mtrvp/training/wta_loss.hpp"

#endif  // MTRVP__MTRVP_HPP_
