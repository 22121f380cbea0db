#pragma once

#include "cltlab.hpp"
#include "config.hpp"
#include "engine.hpp"
#include "errors.hpp"
#include "gcore.hpp"
#include "gpde.hpp"
#include "grid_spec.hpp"
#include "model.hpp"
#include "numeric.hpp"
#include "run.hpp"
