#pragma once

#include "wqo/core.hpp"
#include "wqo/io.hpp"
#include "wqo/order.hpp"
#include "wqo/powerset.hpp"
#include "wqo/powerspace.hpp"
#include "wqo/reversal.hpp"
#include "wqo/topology.hpp"
#include "wqo/true_stages.hpp"
#include "wqo/xi.hpp"
