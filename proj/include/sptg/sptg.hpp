// Copyright (c) SPTG Toolkit contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "sptg/formula.hpp"
#include "sptg/game.hpp"
#include "sptg/io.hpp"
#include "sptg/priced.hpp"
#include "sptg/pwl.hpp"
#include "sptg/rational.hpp"
#include "sptg/reductions.hpp"
#include "sptg/solvers.hpp"
