#pragma once

#include "pansharp/caploss.hpp"
#include "pansharp/color.hpp"
#include "pansharp/error.hpp"
#include "pansharp/featbank.hpp"
#include "pansharp/image.hpp"
#include "pansharp/metrics.hpp"
#include "pansharp/parallel.hpp"
#include "pansharp/raster.hpp"
#include "pansharp/rawten.hpp"
#include "pansharp/recolor.hpp"
