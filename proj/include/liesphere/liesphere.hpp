#pragma once
// Convenience umbrella: the whole library in one include.

#include "liesphere/algebra.hpp"
#include "liesphere/config.hpp"
#include "liesphere/core.hpp"
#include "liesphere/errors.hpp"
#include "liesphere/euclid.hpp"
#include "liesphere/fields.hpp"
#include "liesphere/frame.hpp"
#include "liesphere/io.hpp"
#include "liesphere/jet.hpp"
#include "liesphere/ode.hpp"
#include "liesphere/pipeline.hpp"
#include "liesphere/potentials.hpp"
#include "liesphere/spectral.hpp"
#include "liesphere/surface.hpp"
#include "liesphere/wilczynski.hpp"
