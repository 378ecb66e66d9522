// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "baselines.hpp"
#include "common.hpp"
#include "costmodel.hpp"
#include "design_space.hpp"
#include "digamma.hpp"
#include "dims.hpp"
#include "genome_io.hpp"
#include "harness.hpp"
#include "oracle.hpp"
#include "parallel.hpp"
#include "platform.hpp"
#include "report.hpp"
#include "search.hpp"
#include "workload.hpp"
