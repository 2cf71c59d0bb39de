#pragma once

#include "spiralbend/annulus_embed.hpp"
#include "spiralbend/bending.hpp"
#include "spiralbend/capspace.hpp"
#include "spiralbend/common.hpp"
#include "spiralbend/harness.hpp"
#include "spiralbend/invariance.hpp"
#include "spiralbend/io.hpp"
#include "spiralbend/model_space.hpp"
#include "spiralbend/norms2d.hpp"
#include "spiralbend/polygon_cover.hpp"
#include "spiralbend/svg.hpp"
