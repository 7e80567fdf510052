#pragma once

// Umbrella header.

#include "entlab/core.hpp"
#include "entlab/numeric.hpp"
#include "entlab/random.hpp"
#include "entlab/parallel.hpp"
#include "entlab/hypgeom.hpp"
#include "entlab/profile.hpp"
#include "entlab/smoothing.hpp"
#include "entlab/mesh.hpp"
#include "entlab/flow.hpp"
#include "entlab/entropy.hpp"
#include "entlab/io.hpp"
#include "entlab/config.hpp"
#include "entlab/sweep.hpp"
#include "entlab/checks.hpp"
