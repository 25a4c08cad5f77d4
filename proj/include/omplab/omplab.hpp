#pragma once

// Umbrella header.

#include "omplab/bounds.hpp"
#include "omplab/constants.hpp"
#include "omplab/errors.hpp"
#include "omplab/harness.hpp"
#include "omplab/io.hpp"
#include "omplab/linalg.hpp"
#include "omplab/omp.hpp"
#include "omplab/random.hpp"
#include "omplab/report.hpp"
#include "omplab/sensing.hpp"
#include "omplab/signal.hpp"
#include "omplab/types.hpp"
