#pragma once

// Umbrella header for the liporos toolkit.

#include "liporos/cloud.hpp"
#include "liporos/core.hpp"
#include "liporos/extraction.hpp"
#include "liporos/glue.hpp"
#include "liporos/io.hpp"
#include "liporos/kalton.hpp"
#include "liporos/kr.hpp"
#include "liporos/lipschitz.hpp"
#include "liporos/porosity.hpp"
#include "liporos/quotient.hpp"
#include "liporos/report.hpp"
#include "liporos/separation.hpp"
#include "liporos/showcase.hpp"
#include "liporos/space.hpp"
#include "liporos/verify.hpp"
