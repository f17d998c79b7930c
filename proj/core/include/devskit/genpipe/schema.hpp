#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace devskit::genpipe {

// The planning layer's intermediate representation: a typed description of a
// model's interface and duties, strict enough to validate mechanically, loose
// enough that a language model can fill it in. Serialized as JSON; the parse
// functions below throw ConfigError with a field path on any structural
// problem, and that message is what gets fed back on a retry.

// How a port behaves at startup and in steady state.
struct ProtocolSpec {
    std::string description;
    std::string initial_state;  // usually "None"; credits etc. when not
    std::string initial_signal; // usually "None"; message due at t=0 when not

    friend bool operator==(const ProtocolSpec&, const ProtocolSpec&) = default;
};

// One argument, input port, or output port.
struct TypedEntity {
    std::string name;      // valid identifier
    std::string type;      // one of: int float bool str dict list
    std::string structure; // mandatory elaboration for dict/list

    friend bool operator==(const TypedEntity&, const TypedEntity&) = default;
};

struct PortEntity : TypedEntity {
    ProtocolSpec protocol;

    friend bool operator==(const PortEntity&, const PortEntity&) = default;
};

// One key of a structured log entry: the key name plus a description of the
// value's type and meaning.
struct LogEntity {
    std::string key;
    std::string value;

    friend bool operator==(const LogEntity&, const LogEntity&) = default;
};

struct LogEntry {
    std::vector<LogEntity> dict_content;
    std::string extra_info; // timing, conditions, anything not key-shaped

    friend bool operator==(const LogEntry&, const LogEntry&) = default;
};

struct LogContent {
    std::vector<LogEntry> detailed;
    std::string general;

    friend bool operator==(const LogContent&, const LogContent&) = default;
};

struct ModelSpecification {
    std::string function; // duties, workflow, and the delegated business rules
    LogContent logging;
    std::vector<TypedEntity> model_init_args;
    std::vector<PortEntity> input_ports;
    std::vector<PortEntity> output_ports;

    friend bool operator==(const ModelSpecification&, const ModelSpecification&) = default;
};

enum class NodeKind { atomic, coupled };

// One node of the structural plan. Atomic nodes carry no children and no
// coupling text; coupled nodes have at least two children and describe their
// wiring in prose. Class names referenced inside coupling_specification are
// written between backticks (`Channel`), which is what lets validate_plan
// cross-check them against the child list.
struct PlanNode {
    std::string class_name;
    NodeKind kind = NodeKind::atomic;
    ModelSpecification spec;
    std::string coupling_specification;
    std::vector<PlanNode> children;

    friend bool operator==(const PlanNode&, const PlanNode&) = default;
};

// --- grammar helpers --------------------------------------------------------

bool is_identifier(std::string_view text);
bool is_allowed_type(std::string_view type); // the six-name whitelist

// --- JSON ------------------------------------------------------------------

ModelSpecification model_spec_from_json(std::string_view text);
std::string to_json(const ModelSpecification& spec);

PlanNode plan_node_from_json(std::string_view text);
std::string to_json(const PlanNode& node);

// --- validation ------------------------------------------------------------

// Findings about one specification, each prefixed with `where` (a node path
// or field label). Checked: identifier grammar, the type whitelist, dict/list
// entities with empty structure, duplicate port names per direction, and
// reserved init-arg names (name/parent are allowed, engine-owned names are
// not).
std::vector<std::string> validate_spec(const std::string& where,
                                       const ModelSpecification& spec);

// Structural findings over a whole plan: atomic nodes with children, coupled
// nodes with fewer than two children, duplicate class names anywhere in the
// tree, spec-level findings from validate_spec, and backticked class
// references in coupling text that name no child. Empty means the plan is
// sound.
std::vector<std::string> validate_plan(const PlanNode& root);

// The uppercase-initial identifiers written between backticks in free text —
// the convention coupling descriptions use to name component classes.
std::vector<std::string> class_references(const std::string& text);

// Depth of the tree (a lone node is depth 1) and number of atomic leaves.
int tree_depth(const PlanNode& root);
int leaf_count(const PlanNode& root);

} // namespace devskit::genpipe
