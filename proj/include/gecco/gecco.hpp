#pragma once

#include "gecco/abstraction.hpp"
#include "gecco/candidates.hpp"
#include "gecco/class_set.hpp"
#include "gecco/constraints.hpp"
#include "gecco/dfg.hpp"
#include "gecco/errors.hpp"
#include "gecco/event_log.hpp"
#include "gecco/instances.hpp"
#include "gecco/json_io.hpp"
#include "gecco/log_io.hpp"
#include "gecco/metrics.hpp"
#include "gecco/optimizer.hpp"
#include "gecco/parallel.hpp"
#include "gecco/pipeline.hpp"
