#pragma once

#include "tsecon/arima.hpp"
#include "tsecon/correlation.hpp"
#include "tsecon/dates.hpp"
#include "tsecon/distributions.hpp"
#include "tsecon/errors.hpp"
#include "tsecon/hypothesis.hpp"
#include "tsecon/io.hpp"
#include "tsecon/pipeline.hpp"
#include "tsecon/series.hpp"
#include "tsecon/unit_root.hpp"
#include "tsecon/version.hpp"
