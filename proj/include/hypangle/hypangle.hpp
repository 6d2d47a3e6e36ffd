#pragma once

#include "hypangle/arith.hpp"
#include "hypangle/geometry.hpp"
#include "hypangle/group.hpp"
#include "hypangle/group_element.hpp"
#include "hypangle/stats.hpp"
#include "hypangle/table.hpp"
#include "hypangle/theory.hpp"
