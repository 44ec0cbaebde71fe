#pragma once

// Umbrella header for the whole library.

#include "wrc/bccb.hpp"
#include "wrc/bench.hpp"
#include "wrc/dense_oracle.hpp"
#include "wrc/errors.hpp"
#include "wrc/fft.hpp"
#include "wrc/fft_ops.hpp"
#include "wrc/fixtures.hpp"
#include "wrc/forward.hpp"
#include "wrc/io.hpp"
#include "wrc/losses.hpp"
#include "wrc/rng.hpp"
#include "wrc/solver.hpp"
#include "wrc/tensor.hpp"
