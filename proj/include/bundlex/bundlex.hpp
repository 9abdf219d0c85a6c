#pragma once

#include "bundlex/audits.hpp"
#include "bundlex/cycles.hpp"
#include "bundlex/enumerate.hpp"
#include "bundlex/errors.hpp"
#include "bundlex/fixtures.hpp"
#include "bundlex/flow.hpp"
#include "bundlex/generator.hpp"
#include "bundlex/io.hpp"
#include "bundlex/mechanism.hpp"
#include "bundlex/model.hpp"
#include "bundlex/object_set.hpp"
#include "bundlex/optimize.hpp"
#include "bundlex/responsive.hpp"
