// Copyright 2026 the hnmfk authors.
// SPDX-License-Identifier: Apache-2.0
//
// Umbrella header.

#ifndef HNMFK_HNMFK_HPP
#define HNMFK_HNMFK_HPP

#include "hnmfk/classifier.hpp"
#include "hnmfk/clustering.hpp"
#include "hnmfk/io.hpp"
#include "hnmfk/metrics.hpp"
#include "hnmfk/nmf.hpp"
#include "hnmfk/nmfk.hpp"
#include "hnmfk/nnls.hpp"
#include "hnmfk/preprocess.hpp"
#include "hnmfk/synth.hpp"
#include "hnmfk/types.hpp"
#include "hnmfk/wilcoxon.hpp"

#endif  // HNMFK_HNMFK_HPP
