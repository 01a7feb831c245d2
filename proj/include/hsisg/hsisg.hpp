// Copyright 2026 The hsisg Authors.
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

#pragma once

#include "hsisg/error.hpp"
#include "hsisg/eval.hpp"
#include "hsisg/io.hpp"
#include "hsisg/manifest.hpp"
#include "hsisg/model.hpp"
#include "hsisg/model_io.hpp"
#include "hsisg/ngrams.hpp"
#include "hsisg/random.hpp"
#include "hsisg/sgd.hpp"
#include "hsisg/text_units.hpp"
#include "hsisg/trainer.hpp"
#include "hsisg/transfer.hpp"
#include "hsisg/utf8.hpp"
#include "hsisg/vocab.hpp"
