#pragma once

#include "qsf/cover.hpp"
#include "qsf/designkit.hpp"
#include "qsf/error.hpp"
#include "qsf/ffield.hpp"
#include "qsf/km.hpp"
#include "qsf/manifest.hpp"
#include "qsf/orbits.hpp"
#include "qsf/pipeline.hpp"
#include "qsf/subspace.hpp"
