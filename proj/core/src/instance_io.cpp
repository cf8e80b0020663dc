#include "wsc/instance_io.hpp"

#include <fstream>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "wsc/error.hpp"

namespace wsc {

using nlohmann::json;

namespace {

[[noreturn]] void fail(ErrorCode code, const std::string& path, const std::string& msg) {
  throw Error(code, (path.empty() ? std::string("/") : path) + ": " + msg);
}

const json& member(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) fail(ErrorCode::SyntaxError, path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) fail(ErrorCode::SyntaxError, path, std::string("missing '") + key + "'");
  return *it;
}

const json& optional_array(const json& obj, const char* key, const std::string& path) {
  static const json kEmpty = json::array();
  if (!obj.is_object()) fail(ErrorCode::SyntaxError, path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) return kEmpty;
  if (!it->is_array()) fail(ErrorCode::SyntaxError, path + "/" + key, "expected an array");
  return *it;
}

std::string as_string(const json& v, const std::string& path) {
  if (!v.is_string()) fail(ErrorCode::SyntaxError, path, "expected a string");
  return v.get<std::string>();
}

bool as_bool(const json& obj, const char* key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) return false;
  if (!it->is_boolean()) fail(ErrorCode::SyntaxError, path + "/" + key, "expected a boolean");
  return it->get<bool>();
}

// "name" is shorthand for {"name": "name", "concept": "name"}.
ParameterDecl parse_param(const json& v, const std::string& path) {
  if (v.is_string()) {
    auto s = v.get<std::string>();
    return ParameterDecl{s, s};
  }
  ParameterDecl p;
  p.name = as_string(member(v, "name", path), path + "/name");
  p.type = as_string(member(v, "concept", path), path + "/concept");
  return p;
}

// {"relation": r, "from": a, "to": b} or the shorthand [r, a, b].
RelationAtom parse_atom(const json& v, const std::string& path) {
  if (v.is_array()) {
    if (v.size() != 3) fail(ErrorCode::SyntaxError, path, "atom array needs [relation, from, to]");
    return RelationAtom{as_string(v[0], path + "/0"), as_string(v[1], path + "/1"),
                        as_string(v[2], path + "/2")};
  }
  return RelationAtom{as_string(member(v, "relation", path), path + "/relation"),
                      as_string(member(v, "from", path), path + "/from"),
                      as_string(member(v, "to", path), path + "/to")};
}

std::vector<ParameterDecl> parse_params(const json& obj, const char* key, const std::string& path) {
  std::vector<ParameterDecl> out;
  const auto& arr = optional_array(obj, key, path);
  for (std::size_t i = 0; i < arr.size(); ++i) {
    out.push_back(parse_param(arr[i], path + "/" + key + "/" + std::to_string(i)));
  }
  return out;
}

std::vector<RelationAtom> parse_atoms(const json& obj, const char* key, const std::string& path) {
  std::vector<RelationAtom> out;
  const auto& arr = optional_array(obj, key, path);
  for (std::size_t i = 0; i < arr.size(); ++i) {
    out.push_back(parse_atom(arr[i], path + "/" + key + "/" + std::to_string(i)));
  }
  return out;
}

void check_relations(const Ontology& onto, const std::vector<RelationAtom>& atoms,
                     const std::string& path, ErrorCode code) {
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (!onto.find_relation(atoms[i].relation)) {
      fail(code, path + "/" + std::to_string(i) + "/relation",
           "undeclared relation '" + atoms[i].relation + "'");
    }
  }
}

template <typename Fn>
void located(const std::string& path, Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    // Strip the "Code: " prefix the inner error already carries.
    std::string msg = e.what();
    const auto prefix = std::string(to_string(e.code())) + ": ";
    if (msg.rfind(prefix, 0) == 0) msg.erase(0, prefix.size());
    fail(e.code(), path, msg);
  }
}

json param_json(const ParameterDecl& p) {
  json j = {{"name", p.name}};
  if (p.type) j["concept"] = *p.type;
  return j;
}

json atoms_json(const std::vector<RelationAtom>& atoms) {
  json arr = json::array();
  for (const auto& a : atoms) arr.push_back({{"relation", a.relation}, {"from", a.from}, {"to", a.to}});
  return arr;
}

json params_json(const std::vector<ParameterDecl>& params) {
  json arr = json::array();
  for (const auto& p : params) arr.push_back(param_json(p));
  return arr;
}

}  // namespace

CompositionProblem parse_instance(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    std::size_t col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw Error(ErrorCode::SyntaxError,
                "line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + e.what());
  }

  const json& o = member(doc, "ontology", "");
  std::vector<std::string> concepts;
  const auto& concept_arr = optional_array(o, "concepts", "/ontology");
  for (std::size_t i = 0; i < concept_arr.size(); ++i) {
    concepts.push_back(as_string(concept_arr[i], "/ontology/concepts/" + std::to_string(i)));
  }
  std::vector<SubtypeEdge> edges;
  const auto& edge_arr = optional_array(o, "subtypes", "/ontology");
  for (std::size_t i = 0; i < edge_arr.size(); ++i) {
    const std::string path = "/ontology/subtypes/" + std::to_string(i);
    const auto& e = edge_arr[i];
    if (e.is_array() && e.size() == 2) {
      edges.push_back(SubtypeEdge{as_string(e[0], path + "/0"), as_string(e[1], path + "/1")});
    } else {
      edges.push_back(SubtypeEdge{as_string(member(e, "sub", path), path + "/sub"),
                                  as_string(member(e, "super", path), path + "/super")});
    }
  }
  std::vector<RelationDef> relations;
  const auto& rel_arr = optional_array(o, "relations", "/ontology");
  for (std::size_t i = 0; i < rel_arr.size(); ++i) {
    const std::string path = "/ontology/relations/" + std::to_string(i);
    const auto& r = rel_arr[i];
    if (r.is_string()) {
      relations.push_back(RelationDef{r.get<std::string>(), false, false});
    } else {
      relations.push_back(RelationDef{as_string(member(r, "name", path), path + "/name"),
                                      as_bool(r, "transitive", path), as_bool(r, "symmetric", path)});
    }
  }
  std::vector<InferenceRule> rules;
  const auto& rule_arr = optional_array(o, "rules", "/ontology");
  for (std::size_t i = 0; i < rule_arr.size(); ++i) {
    const std::string path = "/ontology/rules/" + std::to_string(i);
    const auto& r = rule_arr[i];
    InferenceRule rule;
    rule.name = as_string(member(r, "name", path), path + "/name");
    const auto& params = optional_array(r, "parameters", path);
    for (std::size_t k = 0; k < params.size(); ++k) {
      rule.parameters.push_back(as_string(params[k], path + "/parameters/" + std::to_string(k)));
    }
    rule.preconditions = parse_atoms(r, "preconditions", path);
    rule.effects = parse_atoms(r, "effects", path);
    rules.push_back(std::move(rule));
  }

  CompositionProblem problem;
  {
    // Relation names in rules are checked first so the error can point at the atom.
    std::unordered_set<std::string> declared;
    for (const auto& r : relations) declared.insert(r.name);
    for (std::size_t i = 0; i < rules.size(); ++i) {
      for (const char* section : {"preconditions", "effects"}) {
        const auto& atoms = std::string(section) == "effects" ? rules[i].effects : rules[i].preconditions;
        for (std::size_t k = 0; k < atoms.size(); ++k) {
          if (!declared.contains(atoms[k].relation)) {
            fail(ErrorCode::UnknownRelationInRule,
                 "/ontology/rules/" + std::to_string(i) + "/" + section + "/" + std::to_string(k) + "/relation",
                 "undeclared relation '" + atoms[k].relation + "'");
          }
        }
      }
    }
  }
  located("/ontology", [&] {
    problem.ontology =
        Ontology::build(std::move(concepts), std::move(edges), std::move(relations), std::move(rules));
  });

  const auto& repo = optional_array(doc, "repository", "");
  for (std::size_t i = 0; i < repo.size(); ++i) {
    const std::string path = "/repository/" + std::to_string(i);
    const auto& s = repo[i];
    Service svc;
    svc.name = as_string(member(s, "name", path), path + "/name");
    svc.inputs = parse_params(s, "inputs", path);
    svc.outputs = parse_params(s, "outputs", path);
    svc.preconditions = parse_atoms(s, "preconditions", path);
    svc.effects = parse_atoms(s, "effects", path);
    check_relations(problem.ontology, svc.preconditions, path + "/preconditions", ErrorCode::UnknownRelation);
    check_relations(problem.ontology, svc.effects, path + "/effects", ErrorCode::UnknownRelation);
    located(path, [&] { validate_service(problem.ontology, svc); });
    if (problem.repository.find(svc.name)) {
      fail(ErrorCode::DuplicateName, path + "/name", "service '" + svc.name + "' declared twice");
    }
    problem.repository.services.push_back(std::move(svc));
  }

  const json& q = member(doc, "query", "");
  Request& req = problem.request;
  req.name = q.contains("name") ? as_string(q["name"], "/query/name") : std::string("query");
  req.provided = parse_params(q, "provided", "/query");
  req.provided_relations = parse_atoms(q, "providedRelations", "/query");
  req.wanted = parse_params(q, "wanted", "/query");
  req.wanted_relations = parse_atoms(q, "wantedRelations", "/query");
  check_relations(problem.ontology, req.provided_relations, "/query/providedRelations", ErrorCode::UnknownRelation);
  check_relations(problem.ontology, req.wanted_relations, "/query/wantedRelations", ErrorCode::UnknownRelation);
  located("/query", [&] { validate_request(problem.ontology, req); });
  return problem;
}

std::string serialize_instance(const CompositionProblem& problem) {
  const Ontology& onto = problem.ontology;
  json o;
  o["concepts"] = onto.concepts();
  json subtypes = json::array();
  for (const auto& e : onto.subtype_edges()) subtypes.push_back({{"sub", e.sub}, {"super", e.super}});
  o["subtypes"] = subtypes;
  json relations = json::array();
  for (const auto& r : onto.relations()) {
    relations.push_back({{"name", r.name}, {"transitive", r.transitive}, {"symmetric", r.symmetric}});
  }
  o["relations"] = relations;
  json rules = json::array();
  for (const auto& r : onto.rules()) {
    rules.push_back({{"name", r.name},
                     {"parameters", r.parameters},
                     {"preconditions", atoms_json(r.preconditions)},
                     {"effects", atoms_json(r.effects)}});
  }
  o["rules"] = rules;

  json repo = json::array();
  for (const auto& s : problem.repository.services) {
    repo.push_back({{"name", s.name},
                    {"inputs", params_json(s.inputs)},
                    {"outputs", params_json(s.outputs)},
                    {"preconditions", atoms_json(s.preconditions)},
                    {"effects", atoms_json(s.effects)}});
  }
  const Request& r = problem.request;
  json q = {{"name", r.name},
            {"provided", params_json(r.provided)},
            {"providedRelations", atoms_json(r.provided_relations)},
            {"wanted", params_json(r.wanted)},
            {"wantedRelations", atoms_json(r.wanted_relations)}};
  json doc = {{"ontology", o}, {"repository", repo}, {"query", q}};
  return doc.dump(2) + "\n";
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::SyntaxError, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace wsc
