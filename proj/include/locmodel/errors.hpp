#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace locmodel {

enum class Errc {
    budget_exceeded,
    dimension_mismatch,
    singular_gram,
    invalid_index,
    datum_mismatch,
    kind_mismatch,
    wild_ramification,
    bad_ranks,
    incompatible_element,
    signature_collision,
    unmatched_point,
    invalid_argument,
    manifest_parse,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

// Enumeration guard shared by every exhaustive search. Defaults to 10^7 and
// can be overridden through the LOCMODEL_BUDGET environment variable.
std::uint64_t budget();
void set_budget(std::uint64_t limit);

// Throws budget_exceeded when `count` exceeds the guard.
void check_budget(std::uint64_t count, const char* what);

}  // namespace locmodel
