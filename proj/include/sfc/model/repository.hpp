#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "sfc/model/types.hpp"

namespace sfc::model {

/// One broken invariant. `rule` is a stable kebab-case name such as
/// "duplicate-mac"; `id` names the offending object.
struct Violation
{
    std::string rule;
    std::string id;

    bool operator==(const Violation&) const = default;
};

/// Checks every repository invariant. Never throws.
std::vector<Violation> repository_validate(const Repository& repo);

/// Parses the JSON repository document and enforces validity.
/// Throws ParseError, IntegrityError, DuplicateIdError or ValidationError.
Repository repository_load(std::istream& source);
Repository repository_load_text(std::string_view text);
Repository repository_load_file(const std::string& path);

/// Canonical JSON form; load(serialize(r)) == r.
std::string repository_serialize(const Repository& repo);

const ServiceChain& lookup_chain(const Repository& repo, SfcId sfc_id);

Repository remove_chain(const Repository& repo, SfcId sfc_id);

/// Copy of `repo` where every SF requires symmetry.
Repository with_full_symmetry(const Repository& repo);

/// Copy of `repo` where every SF has the given processing delay.
Repository with_processing_delay(const Repository& repo, SimTime delay);

} // namespace sfc::model
