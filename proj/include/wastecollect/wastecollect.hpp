#pragma once

#include "wastecollect/coverage.hpp"
#include "wastecollect/error.hpp"
#include "wastecollect/impact.hpp"
#include "wastecollect/key_values.hpp"
#include "wastecollect/pipeline.hpp"
#include "wastecollect/road_network.hpp"
#include "wastecollect/route_geometry.hpp"
#include "wastecollect/synthetic_city.hpp"
#include "wastecollect/text_table.hpp"
#include "wastecollect/vrp.hpp"
