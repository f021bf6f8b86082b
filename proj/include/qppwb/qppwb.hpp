#pragma once

#include "analysis.hpp"
#include "config.hpp"
#include "correlation.hpp"
#include "error.hpp"
#include "harness.hpp"
#include "index.hpp"
#include "io.hpp"
#include "metrics.hpp"
#include "porter_stemmer.hpp"
#include "predictors.hpp"
#include "reports.hpp"
#include "retrieval.hpp"
