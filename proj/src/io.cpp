#include "qg/io.hpp"

#include <fstream>

namespace qg {

using nlohmann::json;

namespace {

const json& require(const json& doc, const char* key)
{
    if (!doc.is_object() || !doc.contains(key)) throw InputError(std::string("missing field '") + key + "'");
    return doc.at(key);
}

}  // namespace

QuantumGraph build_from_json(const json& doc)
{
    try {
        const json& jv = require(doc, "vertices");
        const json& je = require(doc, "edges");
        if (!jv.is_array() || !je.is_array()) throw InputError("'vertices' and 'edges' must be arrays");

        std::vector<std::string> ids;
        ConditionAssignment cond;
        for (const json& v : jv) {
            ids.push_back(require(v, "id").get<std::string>());
            const VertexIndex idx = ids.size() - 1;
            const std::string kind = v.value("condition", std::string("standard"));
            if (kind == "dirichlet") cond.dirichlet.insert(idx);
            else if (kind != "standard") throw InputError("unknown vertex condition '" + kind + "'");
            if (v.contains("end") && !v.at("end").is_null())
                cond.end_tags[idx] = parse_end_condition(v.at("end").get<std::string>());
        }
        std::unordered_map<std::string, VertexIndex> lookup;
        for (VertexIndex i = 0; i < ids.size(); ++i) lookup.emplace(ids[i], i);

        std::vector<Edge> edges;
        for (const json& e : je) {
            const json& ends = require(e, "endpoints");
            if (!ends.is_array() || ends.size() != 2) throw InputError("edge endpoints must be a pair");
            auto endpoint = [&](const json& j) {
                auto it = lookup.find(j.get<std::string>());
                if (it == lookup.end()) throw InputError("dangling vertex reference '" + j.get<std::string>() + "'");
                return it->second;
            };
            const json& len = require(e, "length");
            if (!len.is_number()) throw InputError("edge length must be a number");
            edges.push_back({require(e, "id").get<std::string>(), endpoint(ends[0]), endpoint(ends[1]), len.get<double>()});
        }
        QuantumGraph out{MetricGraph(std::move(ids), std::move(edges)), std::move(cond)};
        out.graph.require_connected();
        out.conditions.validate(out.graph);
        return out;
    } catch (const json::exception& ex) {
        throw InputError(std::string("malformed graph document: ") + ex.what());
    }
}

QuantumGraph load_graph_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw InputError("cannot open graph file '" + path + "'");
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& ex) {
        throw InputError("cannot parse '" + path + "': " + ex.what());
    }
    return build_from_json(doc);
}

json to_json(const QuantumGraph& q)
{
    json out;
    out["vertices"] = json::array();
    for (VertexIndex v = 0; v < q.graph.vertex_count(); ++v) {
        json jv;
        jv["id"] = q.graph.vertex_id(v);
        jv["condition"] = q.conditions.dirichlet.count(v) ? "dirichlet" : "standard";
        auto it = q.conditions.end_tags.find(v);
        jv["end"] = it == q.conditions.end_tags.end() ? json(nullptr) : json(to_string(it->second));
        out["vertices"].push_back(jv);
    }
    out["edges"] = json::array();
    for (const Edge& e : q.graph.edges())
        out["edges"].push_back({{"id", e.id},
                                {"endpoints", {q.graph.vertex_id(e.from), q.graph.vertex_id(e.to)}},
                                {"length", e.length}});
    return out;
}

FamilySpec family_from_json(const json& doc)
{
    try {
        FamilySpec s;
        s.family = parse_family(require(doc, "family").get<std::string>());
        s.length = doc.value("length", s.length);
        s.tail_length = doc.value("tail_length", s.tail_length);
        s.arms = doc.value("arms", doc.value("k", s.arms));
        s.arm_length = doc.value("arm_length", s.arm_length);
        if (doc.contains("lengths")) s.lengths = doc.at("lengths").get<std::vector<double>>();
        s.pumpkins = doc.value("pumpkins", s.pumpkins);
        s.edge_length = doc.value("edge_length", s.edge_length);
        s.alpha = doc.value("alpha", s.alpha);
        s.teeth = doc.value("teeth", s.teeth);
        s.branches = doc.value("branches", s.branches);
        s.ratio = doc.value("ratio", doc.value("q", s.ratio));
        s.generations = doc.value("generations", s.generations);
        s.vertices = doc.value("vertices", s.vertices);
        s.beta = doc.value("beta", s.beta);
        s.length_min = doc.value("length_min", s.length_min);
        s.length_max = doc.value("length_max", s.length_max);
        if (doc.contains("seed") && !doc.at("seed").is_null()) s.seed = doc.at("seed").get<std::uint64_t>();
        if (doc.contains("end_condition") && !doc.at("end_condition").is_null())
            s.end_condition = parse_end_condition(doc.at("end_condition").get<std::string>());
        s.validate();
        return s;
    } catch (const json::exception& ex) {
        throw InputError(std::string("malformed family spec: ") + ex.what());
    }
}

json to_json(const FamilySpec& s)
{
    json out{{"family", to_string(s.family)}, {"end_condition", to_string(s.end_condition)}};
    switch (s.family) {
    case Family::interval:
    case Family::loop: out["length"] = s.length; break;
    case Family::lasso:
        out["length"] = s.length;
        out["tail_length"] = s.tail_length;
        break;
    case Family::star:
        if (s.lengths.empty()) {
            out["arms"] = s.arms;
            out["arm_length"] = s.arm_length;
        } else {
            out["lengths"] = s.lengths;
        }
        break;
    case Family::necklace:
        if (s.lengths.empty()) {
            out["pumpkins"] = s.pumpkins;
            out["edge_length"] = s.edge_length;
        } else {
            out["lengths"] = s.lengths;
        }
        break;
    case Family::diagonal_comb:
        out["alpha"] = s.alpha;
        out["teeth"] = s.teeth;
        break;
    case Family::geometric_tree:
        out["branches"] = s.branches;
        out["ratio"] = s.ratio;
        out["generations"] = s.generations;
        break;
    case Family::random_compact:
        out["vertices"] = s.vertices;
        out["beta"] = s.beta;
        out["length_min"] = s.length_min;
        out["length_max"] = s.length_max;
        break;
    }
    out["seed"] = s.seed ? json(*s.seed) : json(nullptr);
    return out;
}

}  // namespace qg
