#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <json.hpp>

#include <qppwb/config.hpp>
#include <qppwb/io.hpp>

using namespace qppwb;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name)
{
    const auto dir = fs::temp_directory_path() / "qppwb_io_tests";
    fs::create_directories(dir);
    return dir / name;
}

fs::path write(const std::string& name, const std::string& content)
{
    const auto p = scratch(name);
    std::ofstream(p) << content;
    return p;
}

}  // namespace

TEST(TsvCorpus, ReadsRecordsAndReportsBadLines)
{
    std::istringstream in("d1\tHello world\n\nd2\tSecond doc\r\n");
    std::vector<std::string> ids;
    read_tsv_corpus(in, [&](std::string id, std::string_view) { ids.push_back(id); });
    EXPECT_EQ(ids, (std::vector<std::string>{"d1", "d2"}));
    std::istringstream bad("d1\tok\nno tab here\n");
    try {
        read_tsv_corpus(bad, [](std::string, std::string_view) {});
        FAIL();
    }
    catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
    }
}

TEST(TrecCorpus, ParsesDocumentsAndRejectsOtherFiles)
{
    const std::string sgml = "<DOC>\n<DOCNO> FT-1 </DOCNO>\n<TEXT>Solar <B>panels</B></TEXT><TEXT>twice</TEXT>\n</DOC>\n"
                             "<DOC><DOCNO>FT-2</DOCNO><HEADLINE>x</HEADLINE><TEXT>wind</TEXT></DOC>";
    std::vector<std::pair<std::string, std::string>> docs;
    read_trec_documents(sgml, [&](std::string id, std::string_view text) { docs.emplace_back(id, std::string(text)); },
                        "mem");
    ASSERT_EQ(docs.size(), 2u);
    EXPECT_EQ(docs[0].first, "FT-1");
    EXPECT_EQ(analyze(docs[0].second), (std::vector<std::string>{"solar", "panel", "twice"}));
    EXPECT_EQ(analyze(docs[1].second), (std::vector<std::string>{"wind"}));
    try {
        read_trec_documents("just text", [](std::string, std::string_view) {}, "plain.txt");
        FAIL();
    }
    catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("not a TREC SGML file"), std::string::npos);
    }
}

TEST(TrecCorpus, DirectoryIsReadInPathOrder)
{
    const auto dir = scratch("trec_dir");
    fs::remove_all(dir);
    fs::create_directories(dir / "sub");
    std::ofstream(dir / "b.txt") << "<DOC><DOCNO>B</DOCNO><TEXT>beta</TEXT></DOC>";
    std::ofstream(dir / "sub" / "a.txt") << "<DOC><DOCNO>C</DOCNO><TEXT>gamma</TEXT></DOC>";
    std::ofstream(dir / "a.txt") << "<DOC><DOCNO>A</DOCNO><TEXT>alpha</TEXT></DOC>";
    const auto idx = load_index(dir, CorpusFormat::Trec);
    ASSERT_EQ(idx.size(), 3u);
    EXPECT_EQ(idx.document(0).doc_id, "A");
    EXPECT_EQ(idx.document(1).doc_id, "B");
    EXPECT_EQ(idx.document(2).doc_id, "C");
    EXPECT_THROW(load_index(dir, CorpusFormat::Tsv), Error);
}

TEST(Topics, TsvAndTrecFormats)
{
    std::istringstream tsv("301\tInternational Organized Crime\n302\tPoliomyelitis and Post-Polio\n");
    const auto a = read_tsv_topics(tsv);
    ASSERT_EQ(a.size(), 2u);
    EXPECT_EQ(a[0].terms, (std::vector<std::string>{"intern", "organ", "crime"}));

    const auto trec = write("topics.trec",
                            "<top>\n<num> Number: 301\n<title> International Organized Crime\n\n<desc> Description:\n"
                            "Identify organizations\n</top>\n<top>\n<num> Number: 302\n<title> Topic: Polio\n</top>\n");
    const auto b = load_topics(trec);
    ASSERT_EQ(b.size(), 2u);
    EXPECT_EQ(b[0].qid, "301");
    EXPECT_EQ(b[0].terms, a[0].terms);
    EXPECT_EQ(b[1].qid, "302");
    EXPECT_EQ(b[1].terms, (std::vector<std::string>{"polio"}));

    std::istringstream empty("303\tthe of and\n");
    try {
        read_tsv_topics(empty);
        FAIL();
    }
    catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("303"), std::string::npos);
    }
}

TEST(Config, DefaultConfigMirrorsBuiltInDefaults)
{
    const auto cfg = load_config(QPPWB_SOURCE_DIR "/configs/default.json");
    const auto d = GridConfig::defaults();
    EXPECT_EQ(cfg.grid.models, d.models);
    EXPECT_EQ(cfg.grid.metrics, d.metrics);
    EXPECT_EQ(cfg.grid.sensitivity.models, d.sensitivity.models);
    EXPECT_EQ(cfg.grid.sensitivity.metrics, d.sensitivity.metrics);
    EXPECT_EQ(cfg.grid.metric_contingency.metrics, d.metric_contingency.metrics);
    EXPECT_EQ(cfg.grid.metric_contingency.models, d.metric_contingency.models);
    EXPECT_EQ(cfg.grid.model_contingency.models, d.model_contingency.models);
    EXPECT_EQ(cfg.grid.model_contingency.metrics, d.model_contingency.metrics);
    EXPECT_EQ(cfg.grid.rank_by, d.rank_by);
    EXPECT_EQ(cfg.grid.correlations, d.correlations);
    ASSERT_EQ(cfg.grid.battery.size(), d.battery.size());
    for (std::size_t i = 0; i < d.battery.size(); ++i)
        EXPECT_EQ(cfg.grid.battery[i].label(), d.battery[i].label());
    EXPECT_EQ(cfg.grid.seed, 42u);
    EXPECT_EQ(cfg.grid.kappa, 1000u);
    EXPECT_TRUE(fs::exists(cfg.corpus));
    EXPECT_TRUE(fs::exists(cfg.topics));
}

TEST(Config, ReportsEveryProblemAtOnce)
{
    const auto j = nlohmann::json::parse(R"({
        "corpus": "missing/corpus.tsv",
        "qrels": "missing/qrels.txt",
        "models": ["LMJM:1.5", "BM25:0.7,0.3"],
        "metrics": ["AP@100", "MRR@5"],
        "predictors": ["NQC", "UEF"],
        "ndcg_gain": "fuzzy",
        "colour": "blue"
    })");
    try {
        parse_config(j, scratch(""));
        FAIL();
    }
    catch (const ConfigError& e) {
        const auto& p = e.problems();
        EXPECT_GE(p.size(), 7u);
        const std::string all = e.what();
        for (const char* needle : {"corpus", "topics: required", "qrels", "models[0]", "metrics[1]", "predictors[1]",
                                   "ndcg_gain", "unknown key 'colour'"})
            EXPECT_NE(all.find(needle), std::string::npos) << needle << "\n" << all;
    }
}

TEST(Config, CustomListsFillEveryAxis)
{
    const auto corpus = write("c.tsv", "d1\ta b\n");
    const auto topics = write("t.tsv", "1\ta\n");
    const auto qrels = write("q.txt", "1 0 d1 1\n");
    const auto j = nlohmann::json::parse(R"({
        "corpus": {"path": "c.tsv", "format": "tsv"}, "topics": "t.tsv", "qrels": "q.txt",
        "models": [{"kind": "LMDIR", "mu": 500}], "metrics": ["nDCG@10"],
        "predictors": ["WIG", {"name": "NQC", "k": 5}],
        "predictor_params": {"k": 7}, "ndcg_gain": "binary", "seed": 9
    })");
    const auto cfg = parse_config(j, scratch(""));
    EXPECT_EQ(cfg.corpus, corpus);
    EXPECT_EQ(cfg.topics, topics);
    EXPECT_EQ(cfg.qrels, qrels);
    EXPECT_EQ(cfg.grid.models.front().id(), "LMDir(500)");
    EXPECT_EQ(cfg.grid.sensitivity.models, cfg.grid.models);
    EXPECT_EQ(cfg.grid.model_contingency.metrics.front().gain, Gain::Binary);
    EXPECT_EQ(cfg.grid.battery[0].k, 7u);
    EXPECT_EQ(cfg.grid.battery[1].k, 5u);
    EXPECT_EQ(cfg.grid.seed, 9u);
}
