#pragma once

#include "ptweyl/discretize.hpp"
#include "ptweyl/errors.hpp"
#include "ptweyl/harness.hpp"
#include "ptweyl/io.hpp"
#include "ptweyl/json_io.hpp"
#include "ptweyl/linalg.hpp"
#include "ptweyl/operator_spec.hpp"
#include "ptweyl/phase_space.hpp"
#include "ptweyl/randomize.hpp"
#include "ptweyl/region.hpp"
#include "ptweyl/rng.hpp"
#include "ptweyl/symbols.hpp"
#include "ptweyl/trig_poly.hpp"
#include "ptweyl/verify.hpp"
#include "ptweyl/weylgeom.hpp"
