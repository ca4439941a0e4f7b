#pragma once

#include "vfe/core.hpp"
#include "vfe/stencil.hpp"
#include "vfe/operators.hpp"
#include "vfe/jet.hpp"
#include "vfe/recursion.hpp"
#include "vfe/compatibility.hpp"
#include "vfe/diagnostics.hpp"
#include "vfe/io.hpp"
#include "vfe/initial_conditions.hpp"
#include "vfe/timestepper.hpp"
#include "vfe/hasimoto.hpp"
