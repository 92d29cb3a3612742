#pragma once

#include "bevcharge/analytics.hpp"
#include "bevcharge/csv.hpp"
#include "bevcharge/dataset.hpp"
#include "bevcharge/error.hpp"
#include "bevcharge/model.hpp"
#include "bevcharge/report.hpp"
#include "bevcharge/result_tree.hpp"
#include "bevcharge/types.hpp"
#include "bevcharge/uncertainty.hpp"
#include "bevcharge/units.hpp"
#include "bevcharge/version.hpp"
