#pragma once

#include <cstdint>

#include "sfc/model/types.hpp"

namespace sfc::sim {

using model::Direction;
using model::FlowSpec;
using model::MacAddress;
using model::PortNo;
using model::SimTime;

struct Packet
{
    MacAddress eth_src;
    MacAddress eth_dst;
    FlowSpec header;
    std::uint32_t payload_size = 0;
    std::uint64_t seq = 0;
    SimTime created_at = 0;
};

} // namespace sfc::sim
