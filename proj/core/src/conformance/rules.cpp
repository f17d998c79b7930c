#include "devskit/conformance/rules.hpp"

#include <map>

#include "devskit/error.hpp"

namespace devskit::conformance {

const RuleCatalog& rule_catalog(std::string_view scenario) {
    static const std::map<std::string, RuleCatalog, std::less<>> catalogs = [] {
        std::map<std::string, RuleCatalog, std::less<>> m;
        m.emplace("abp", detail::make_abp_rules());
        m.emplace("seird", detail::make_seird_rules());
        m.emplace("iobs", detail::make_iobs_rules());
        m.emplace("barbershop", detail::make_barbershop_rules());
        return m;
    }();
    const auto it = catalogs.find(scenario);
    if (it == catalogs.end()) {
        throw ConfigError("no rule catalog for scenario '" + std::string(scenario) + "'");
    }
    return it->second;
}

} // namespace devskit::conformance
