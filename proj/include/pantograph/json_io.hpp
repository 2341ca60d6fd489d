#pragma once

#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "pantograph/audit.hpp"
#include "pantograph/ensemble.hpp"
#include "pantograph/spectrum.hpp"

namespace pantograph::io {

using nlohmann::ordered_json;

/// Root table: p (verbatim decimal), source, precision, roots and weights as
/// decimal strings, tail mass, and the sigma verification block.
inline ordered_json root_table_json(const spectrum::RootList& roots,
                                    const spectrum::WeightSequence& weights,
                                    int sigma_j_max = 0) {
    ordered_json j;
    j["p"] = roots.p.decimal();
    j["source"] = {{"type", spectrum::to_string(roots.source)},
                   {roots.source == spectrum::RootSource::truncated ? "k" : "m",
                    roots.order}};
    j["precision_bits"] = static_cast<long>(roots.precision_bits);
    j["certified"] = roots.certified;
    j["roots"] = ordered_json::array();
    for (const auto& a : roots.roots) j["roots"].push_back(a.to_string());
    j["weights"] = ordered_json::array();
    for (const auto& c : weights.weights) j["weights"].push_back(c.to_string());
    j["tail_mass"] = weights.tail_mass.to_string();
    if (sigma_j_max > 0) {
        auto rows = spectrum::verify_elementary_symmetric(weights, sigma_j_max);
        ordered_json sig = ordered_json::array();
        for (const auto& r : rows)
            sig.push_back({{"j", r.j},
                           {"sigma", r.sigma.to_string()},
                           {"target", r.target.to_string()},
                           {"rel_dev", r.rel_dev.to_string(6)}});
        j["sigma_check"] = sig;
    }
    return j;
}

/// Reads back the weights of a root table. Roots are informational here;
/// construction only needs the weight sequence.
inline spectrum::WeightSequence weight_sequence_from_json(const ordered_json& j) {
    spectrum::WeightSequence ws{
        defexp::DensityParam::parse(j.at("p").get<std::string>()),
        j.at("source").at("type").get<std::string>() == "truncated"
            ? spectrum::RootSource::truncated
            : spectrum::RootSource::entire,
        0, 128, {}, Real::of(0.0, 128)};
    ws.precision_bits = j.at("precision_bits").get<long>();
    for (const auto& w : j.at("weights"))
        ws.weights.push_back(
            Real::of_string(w.get<std::string>(), ws.precision_bits));
    ws.order = static_cast<int>(ws.weights.size());
    ws.tail_mass = Real::of_string(j.at("tail_mass").get<std::string>(),
                                   ws.precision_bits);
    return ws;
}

inline ordered_json witness_json(const ensemble::PartitionWitness& w) {
    ordered_json j;
    j["parts"] = w.parts;
    j["weights"] = w.weight_decimals;
    if (w.dust_index) j["dust_index"] = *w.dust_index;
    return j;
}

inline ensemble::PartitionWitness witness_from_json(const ordered_json& j) {
    ensemble::PartitionWitness w;
    w.parts = j.at("parts").get<std::vector<std::vector<int>>>();
    w.weight_decimals = j.at("weights").get<std::vector<std::string>>();
    if (j.contains("dust_index")) w.dust_index = j.at("dust_index").get<int>();
    return w;
}

inline ordered_json report_json(const audit::AuditReport& rep) {
    ordered_json j;
    j["graph"] = rep.graph_label;
    j["p"] = rep.p_decimal;
    j["n"] = rep.n;
    auto row_json = [](const audit::CountRow& row) {
        return ordered_json{{"subgraph", row.kind},
                            {"labeled_count", audit::count_to_string(row.labeled_count)},
                            {"expected", row.expected},
                            {"rel_dev", row.rel_dev},
                            {"tolerance", row.tolerance},
                            {"within_tolerance", row.within}};
    };
    j["clique_rows"] = ordered_json::array();
    for (const auto& row : rep.clique_rows) j["clique_rows"].push_back(row_json(row));
    j["c4_row"] = row_json(rep.c4_row);
    j["p3_samples"] = ordered_json::array();
    for (const auto& s : rep.p3_samples)
        j["p3_samples"].push_back({{"subset_size", s.subset_size},
                                   {"labeled_edges_within", s.labeled_edges_within},
                                   {"expected", s.expected},
                                   {"rel_dev", s.rel_dev},
                                   {"from_witness", s.from_witness}});
    if (rep.independent_set)
        j["independent_set"] = {
            {"part_index", rep.independent_set->part_index},
            {"size", rep.independent_set->size},
            {"labeled_edges_within", rep.independent_set->labeled_edges_within}};
    j["verdict"] = audit::to_string(rep.verdict);
    return j;
}

/// One row per subgraph count or P3 sample.
inline void report_csv(const audit::AuditReport& rep, std::ostream& os) {
    os << "row_kind,subgraph_or_size,labeled_count,expected,rel_dev,flag\n";
    auto emit_count = [&os](const audit::CountRow& row) {
        os << "count," << row.kind << ','
           << audit::count_to_string(row.labeled_count) << ',' << row.expected
           << ',' << row.rel_dev << ',' << (row.within ? "within" : "deviant")
           << '\n';
    };
    for (const auto& row : rep.clique_rows) emit_count(row);
    emit_count(rep.c4_row);
    for (const auto& s : rep.p3_samples)
        os << (s.from_witness ? "p3_witness," : "p3_random,") << s.subset_size
           << ',' << s.labeled_edges_within << ',' << s.expected << ','
           << s.rel_dev << ",\n";
    if (rep.independent_set)
        os << "independent_set," << rep.independent_set->size << ','
           << rep.independent_set->labeled_edges_within << ",,,\n";
    os << "verdict,,,,," << audit::to_string(rep.verdict) << '\n';
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("cannot open for writing: " + path);
    os << content;
}

}  // namespace pantograph::io
