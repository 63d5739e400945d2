#pragma once

#include <string>

#include "sfc/model/repository.hpp"

namespace sfc::test {

inline std::string data_path(const std::string& name)
{
    return std::string(SFC_DATA_DIR) + "/" + name;
}

inline model::Repository three_sff()
{
    return model::repository_load_file(data_path("three_sff_repository.json"));
}

inline model::MacAddress mac(const char* text)
{
    return *model::MacAddress::parse(text);
}

inline model::Ipv4Address ip(const char* text)
{
    return *model::Ipv4Address::parse(text);
}

} // namespace sfc::test
