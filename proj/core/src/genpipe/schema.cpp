#include "devskit/genpipe/schema.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <utility>

#include <nlohmann/json.hpp>

#include "devskit/error.hpp"

namespace devskit::genpipe {
namespace {

using ordered_json = nlohmann::ordered_json;

const char* const kAllowedTypes[] = {"int", "float", "bool", "str", "dict", "list"};

// init-arg names the generated code owns; a spec must not claim them.
// "name" and "parent" are deliberately absent: every model takes those.
const char* const kReservedInitArgs[] = {"self", "logger", "phase", "sigma"};

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw ConfigError(where + ": " + what);
}

const ordered_json& field(const ordered_json& object, const std::string& where,
                          const char* key) {
    if (!object.is_object()) {
        fail(where, "expected an object");
    }
    const auto it = object.find(key);
    if (it == object.end()) {
        fail(where, std::string("missing field '") + key + "'");
    }
    return *it;
}

std::string str_field(const ordered_json& object, const std::string& where,
                      const char* key) {
    const ordered_json& value = field(object, where, key);
    if (!value.is_string()) {
        fail(where + "." + key, "expected a string");
    }
    return value.get<std::string>();
}

const ordered_json& array_field(const ordered_json& object, const std::string& where,
                                const char* key) {
    const ordered_json& value = field(object, where, key);
    if (!value.is_array()) {
        fail(where + "." + key, "expected an array");
    }
    return value;
}

ProtocolSpec protocol_from(const ordered_json& j, const std::string& where) {
    ProtocolSpec protocol;
    protocol.description = str_field(j, where, "description");
    protocol.initial_state = str_field(j, where, "initial_state");
    protocol.initial_signal = str_field(j, where, "initial_signal");
    return protocol;
}

TypedEntity entity_from(const ordered_json& j, const std::string& where) {
    TypedEntity entity;
    entity.name = str_field(j, where, "name");
    entity.type = str_field(j, where, "type");
    entity.structure = str_field(j, where, "structure");
    return entity;
}

PortEntity port_from(const ordered_json& j, const std::string& where) {
    PortEntity port;
    static_cast<TypedEntity&>(port) = entity_from(j, where);
    port.protocol = protocol_from(field(j, where, "protocol"), where + ".protocol");
    return port;
}

LogContent logging_from(const ordered_json& j, const std::string& where) {
    LogContent logging;
    const ordered_json& detailed = array_field(j, where, "detailed");
    for (std::size_t i = 0; i < detailed.size(); ++i) {
        const std::string entry_where = where + ".detailed[" + std::to_string(i) + "]";
        LogEntry entry;
        const ordered_json& pairs = array_field(detailed[i], entry_where, "dict_content");
        for (std::size_t k = 0; k < pairs.size(); ++k) {
            const std::string pair_where = entry_where + ".dict_content[" + std::to_string(k) + "]";
            LogEntity pair;
            pair.key = str_field(pairs[k], pair_where, "key");
            pair.value = str_field(pairs[k], pair_where, "value");
            entry.dict_content.push_back(std::move(pair));
        }
        entry.extra_info = str_field(detailed[i], entry_where, "extra_info");
        logging.detailed.push_back(std::move(entry));
    }
    logging.general = str_field(j, where, "general");
    return logging;
}

ModelSpecification spec_from(const ordered_json& j, const std::string& where) {
    ModelSpecification spec;
    spec.function = str_field(j, where, "function");
    spec.logging = logging_from(field(j, where, "logging"), where + ".logging");
    const ordered_json& args = array_field(j, where, "model_init_args");
    for (std::size_t i = 0; i < args.size(); ++i) {
        spec.model_init_args.push_back(
            entity_from(args[i], where + ".model_init_args[" + std::to_string(i) + "]"));
    }
    const ordered_json& inputs = array_field(j, where, "input_ports");
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        spec.input_ports.push_back(
            port_from(inputs[i], where + ".input_ports[" + std::to_string(i) + "]"));
    }
    const ordered_json& outputs = array_field(j, where, "output_ports");
    for (std::size_t i = 0; i < outputs.size(); ++i) {
        spec.output_ports.push_back(
            port_from(outputs[i], where + ".output_ports[" + std::to_string(i) + "]"));
    }
    return spec;
}

ordered_json to_j(const ProtocolSpec& protocol) {
    return {{"description", protocol.description},
            {"initial_state", protocol.initial_state},
            {"initial_signal", protocol.initial_signal}};
}

ordered_json to_j(const TypedEntity& entity) {
    return {{"name", entity.name}, {"type", entity.type}, {"structure", entity.structure}};
}

ordered_json to_j(const PortEntity& port) {
    ordered_json j = to_j(static_cast<const TypedEntity&>(port));
    j["protocol"] = to_j(port.protocol);
    return j;
}

ordered_json to_j(const LogContent& logging) {
    ordered_json detailed = ordered_json::array();
    for (const LogEntry& entry : logging.detailed) {
        ordered_json pairs = ordered_json::array();
        for (const LogEntity& pair : entry.dict_content) {
            pairs.push_back({{"key", pair.key}, {"value", pair.value}});
        }
        detailed.push_back({{"dict_content", std::move(pairs)}, {"extra_info", entry.extra_info}});
    }
    return {{"detailed", std::move(detailed)}, {"general", logging.general}};
}

ordered_json to_j(const ModelSpecification& spec) {
    ordered_json j;
    j["function"] = spec.function;
    j["logging"] = to_j(spec.logging);
    j["model_init_args"] = ordered_json::array();
    for (const TypedEntity& entity : spec.model_init_args) {
        j["model_init_args"].push_back(to_j(entity));
    }
    j["input_ports"] = ordered_json::array();
    for (const PortEntity& port : spec.input_ports) {
        j["input_ports"].push_back(to_j(port));
    }
    j["output_ports"] = ordered_json::array();
    for (const PortEntity& port : spec.output_ports) {
        j["output_ports"].push_back(to_j(port));
    }
    return j;
}

PlanNode node_from(const ordered_json& j, const std::string& where) {
    PlanNode node;
    node.class_name = str_field(j, where, "class_name");
    const std::string kind = str_field(j, where, "kind");
    if (kind == "atomic") {
        node.kind = NodeKind::atomic;
    } else if (kind == "coupled") {
        node.kind = NodeKind::coupled;
    } else {
        fail(where + ".kind", "expected \"atomic\" or \"coupled\", got \"" + kind + "\"");
    }
    node.spec = spec_from(field(j, where, "spec"), where + ".spec");
    if (j.contains("coupling_specification")) {
        if (!j["coupling_specification"].is_string()) {
            fail(where + ".coupling_specification", "expected a string");
        }
        node.coupling_specification = j["coupling_specification"].get<std::string>();
    }
    if (j.contains("children")) {
        if (!j["children"].is_array()) {
            fail(where + ".children", "expected an array");
        }
        for (std::size_t i = 0; i < j["children"].size(); ++i) {
            node.children.push_back(
                node_from(j["children"][i], where + ".children[" + std::to_string(i) + "]"));
        }
    }
    return node;
}

ordered_json to_j(const PlanNode& node) {
    ordered_json j;
    j["class_name"] = node.class_name;
    j["kind"] = node.kind == NodeKind::atomic ? "atomic" : "coupled";
    j["spec"] = to_j(node.spec);
    if (node.kind == NodeKind::coupled) {
        j["coupling_specification"] = node.coupling_specification;
        j["children"] = ordered_json::array();
        for (const PlanNode& child : node.children) {
            j["children"].push_back(to_j(child));
        }
    }
    return j;
}

ordered_json parse_document(std::string_view text, const char* what) {
    try {
        return ordered_json::parse(text);
    } catch (const ordered_json::parse_error& error) {
        throw ConfigError(std::string(what) + ": not valid JSON: " + error.what());
    }
}

void check_entities(const std::string& where, const char* label,
                    const std::vector<TypedEntity>& entities,
                    std::vector<std::string>& findings) {
    for (const TypedEntity& entity : entities) {
        const std::string tag = where + ": " + label + " '" + entity.name + "'";
        if (!is_identifier(entity.name)) {
            findings.push_back(tag + " is not a valid identifier");
        }
        if (!is_allowed_type(entity.type)) {
            findings.push_back(tag + " has type '" + entity.type +
                               "' outside the int/float/bool/str/dict/list whitelist");
        }
        if ((entity.type == "dict" || entity.type == "list") && entity.structure.empty()) {
            findings.push_back(tag + " is a " + entity.type +
                               " with an empty structure description");
        }
    }
}

void check_unique_names(const std::string& where, const char* label,
                        const std::vector<PortEntity>& ports,
                        std::vector<std::string>& findings) {
    std::set<std::string> seen;
    for (const PortEntity& port : ports) {
        if (!seen.insert(port.name).second) {
            findings.push_back(where + ": duplicate " + label + " '" + port.name + "'");
        }
    }
}

void validate_node(const PlanNode& node, const std::string& path,
                   std::set<std::string>& names, std::vector<std::string>& findings) {
    if (!is_identifier(node.class_name)) {
        findings.push_back(path + ": class name '" + node.class_name +
                           "' is not a valid identifier");
    }
    if (!names.insert(node.class_name).second) {
        findings.push_back(path + ": duplicate class name '" + node.class_name + "'");
    }
    if (node.kind == NodeKind::atomic && !node.children.empty()) {
        findings.push_back(path + ": atomic node has " +
                           std::to_string(node.children.size()) + " children");
    }
    if (node.kind == NodeKind::coupled && node.children.size() < 2) {
        findings.push_back(path + ": coupled node has " +
                           std::to_string(node.children.size()) +
                           " children; a decomposition needs at least two");
    }
    const std::vector<std::string> spec_findings = validate_spec(path, node.spec);
    findings.insert(findings.end(), spec_findings.begin(), spec_findings.end());
    if (node.kind == NodeKind::coupled) {
        std::set<std::string> child_names;
        for (const PlanNode& child : node.children) {
            child_names.insert(child.class_name);
        }
        for (const std::string& reference : class_references(node.coupling_specification)) {
            if (reference != node.class_name && !child_names.contains(reference)) {
                findings.push_back(path + ": coupling text references `" + reference +
                                   "` which is not a child of this node");
            }
        }
    }
    for (const PlanNode& child : node.children) {
        validate_node(child, path + "/" + child.class_name, names, findings);
    }
}

} // namespace

std::vector<std::string> class_references(const std::string& text) {
    std::vector<std::string> references;
    std::size_t pos = 0;
    while ((pos = text.find('`', pos)) != std::string::npos) {
        const std::size_t end = text.find('`', pos + 1);
        if (end == std::string::npos) {
            break;
        }
        const std::string token = text.substr(pos + 1, end - pos - 1);
        if (!token.empty() && std::isupper(static_cast<unsigned char>(token[0])) != 0 &&
            is_identifier(token)) {
            references.push_back(token);
        }
        pos = end + 1;
    }
    return references;
}

bool is_identifier(std::string_view text) {
    if (text.empty()) {
        return false;
    }
    const auto head = static_cast<unsigned char>(text[0]);
    if (std::isalpha(head) == 0 && text[0] != '_') {
        return false;
    }
    return std::all_of(text.begin() + 1, text.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_';
    });
}

bool is_allowed_type(std::string_view type) {
    return std::any_of(std::begin(kAllowedTypes), std::end(kAllowedTypes),
                       [&](const char* allowed) { return type == allowed; });
}

ModelSpecification model_spec_from_json(std::string_view text) {
    return spec_from(parse_document(text, "model specification"), "spec");
}

std::string to_json(const ModelSpecification& spec) { return to_j(spec).dump(2); }

PlanNode plan_node_from_json(std::string_view text) {
    return node_from(parse_document(text, "plan node"), "plan");
}

std::string to_json(const PlanNode& node) { return to_j(node).dump(2); }

std::vector<std::string> validate_spec(const std::string& where,
                                       const ModelSpecification& spec) {
    std::vector<std::string> findings;
    check_entities(where, "init arg", spec.model_init_args, findings);
    for (const TypedEntity& arg : spec.model_init_args) {
        for (const char* reserved : kReservedInitArgs) {
            if (arg.name == reserved) {
                findings.push_back(where + ": init arg '" + arg.name +
                                   "' collides with an engine-owned name");
            }
        }
    }
    const auto as_entities = [](const std::vector<PortEntity>& ports) {
        return std::vector<TypedEntity>(ports.begin(), ports.end());
    };
    check_entities(where, "input port", as_entities(spec.input_ports), findings);
    check_entities(where, "output port", as_entities(spec.output_ports), findings);
    check_unique_names(where, "input port", spec.input_ports, findings);
    check_unique_names(where, "output port", spec.output_ports, findings);
    return findings;
}

std::vector<std::string> validate_plan(const PlanNode& root) {
    std::vector<std::string> findings;
    std::set<std::string> names;
    validate_node(root, root.class_name, names, findings);
    return findings;
}

int tree_depth(const PlanNode& root) {
    int deepest = 0;
    for (const PlanNode& child : root.children) {
        deepest = std::max(deepest, tree_depth(child));
    }
    return deepest + 1;
}

int leaf_count(const PlanNode& root) {
    if (root.children.empty()) {
        return 1;
    }
    int count = 0;
    for (const PlanNode& child : root.children) {
        count += leaf_count(child);
    }
    return count;
}

} // namespace devskit::genpipe
