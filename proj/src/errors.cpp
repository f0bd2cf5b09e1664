#include "locmodel/errors.hpp"

#include <atomic>
#include <cstdlib>
#include <mutex>

namespace locmodel {

const char* errc_name(Errc c) {
    switch (c) {
        case Errc::budget_exceeded: return "BudgetExceeded";
        case Errc::dimension_mismatch: return "DimensionMismatch";
        case Errc::singular_gram: return "SingularGram";
        case Errc::invalid_index: return "InvalidIndex";
        case Errc::datum_mismatch: return "DatumMismatch";
        case Errc::kind_mismatch: return "KindMismatch";
        case Errc::wild_ramification: return "WildRamification";
        case Errc::bad_ranks: return "BadRanks";
        case Errc::incompatible_element: return "IncompatibleElement";
        case Errc::signature_collision: return "SignatureCollision";
        case Errc::unmatched_point: return "UnmatchedPoint";
        case Errc::invalid_argument: return "InvalidArgument";
        case Errc::manifest_parse: return "ManifestParseError";
    }
    return "Unknown";
}

namespace {

std::atomic<std::uint64_t> g_budget{0};
std::once_flag g_budget_once;

void init_budget() {
    std::uint64_t v = 10'000'000;
    if (const char* env = std::getenv("LOCMODEL_BUDGET")) {
        char* end = nullptr;
        unsigned long long parsed = std::strtoull(env, &end, 10);
        if (end != env && *end == '\0' && parsed > 0) v = parsed;
    }
    std::uint64_t expected = 0;
    g_budget.compare_exchange_strong(expected, v);
}

}  // namespace

std::uint64_t budget() {
    std::call_once(g_budget_once, init_budget);
    return g_budget.load();
}

void set_budget(std::uint64_t limit) {
    std::call_once(g_budget_once, init_budget);
    g_budget.store(limit);
}

void check_budget(std::uint64_t count, const char* what) {
    if (count > budget()) {
        throw Error(Errc::budget_exceeded, std::string(what) + ": " + std::to_string(count) +
                                               " exceeds enumeration budget " +
                                               std::to_string(budget()));
    }
}

}  // namespace locmodel
