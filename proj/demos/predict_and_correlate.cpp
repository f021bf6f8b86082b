// Builds a small index in memory, retrieves with two models and reports how
// well NQC tracks AP@10 on each.
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include <qppwb/qppwb.hpp>

int main()
{
    using namespace qppwb;
    const std::vector<std::pair<std::string, std::string>> docs = {
        {"d1", "solar panels convert sunlight into electricity"},
        {"d2", "wind turbines generate electricity from moving air"},
        {"d3", "solar eclipse observed across the southern hemisphere"},
        {"d4", "electricity prices rose sharply during the winter"},
        {"d5", "panels of experts discussed renewable energy policy"},
        {"d6", "the turbine blades were damaged by strong wind"},
        {"d7", "sunlight exposure and vitamin levels in winter"},
        {"d8", "renewable energy sources include solar and wind"},
    };
    const auto index = build_index(docs);
    const std::vector<Query> queries = {make_query("q1", "solar electricity"), make_query("q2", "wind turbine"),
                                        make_query("q3", "winter sunlight"), make_query("q4", "renewable policy")};
    Qrels qrels;
    qrels.add("q1", "d1", 2);
    qrels.add("q1", "d8", 1);
    qrels.add("q2", "d2", 1);
    qrels.add("q2", "d6", 2);
    qrels.add("q3", "d7", 1);
    qrels.add("q4", "d5", 1);
    qrels.add("q4", "d8", 1);

    Workbench wb(index, queries, qrels);
    PredictorSpec nqc;
    nqc.kind = PredictorKind::NQC;
    nqc.k = 3;
    const auto ap = MetricSpec::parse("AP@10");
    for (const auto& model : {RetrievalModel::lmdir(100), RetrievalModel::bm25(1.2, 0.75)}) {
        const auto o = wb.evaluate_outcome(nqc, {ap, model, 10});
        std::cout << o.context;
        for (const auto kind : kAllCorrelations)
            std::cout << "  " << correlation_symbol(kind) << '=' << format_cell(o.get(kind), 4);
        std::cout << '\n';
    }
}
