#include <fstream>
#include <string>

#include <gtest/gtest.h>

#include <qppwb/analysis.hpp>

using namespace qppwb;

TEST(Tokenize, LowercasesAndSplitsOnNonAlphanumerics)
{
    EXPECT_EQ(tokenize("Hello, World! x86-64 isn't"),
              (std::vector<std::string>{"hello", "world", "x86", "64", "isn", "t"}));
    EXPECT_TRUE(tokenize("  ..;; ").empty());
}

TEST(Stopwords, CommonFunctionWords)
{
    for (const char* w : {"the", "and", "of", "ourselves", "t", "s"})
        EXPECT_TRUE(is_stopword(w)) << w;
    for (const char* w : {"crime", "international", "organ", "hence"})
        EXPECT_FALSE(is_stopword(w)) << w;
}

TEST(PorterStemmer, KnownStems)
{
    PorterStemmer s;
    EXPECT_EQ(s.stem("international"), "intern");
    EXPECT_EQ(s.stem("organized"), "organ");
    EXPECT_EQ(s.stem("crime"), "crime");
    EXPECT_EQ(s.stem("caresses"), "caress");
    EXPECT_EQ(s.stem("ponies"), "poni");
    EXPECT_EQ(s.stem("relational"), "relat");
    EXPECT_EQ(s.stem("as"), "as");
    EXPECT_EQ(s.stem(""), "");
}

// Reference stems produced by scripts/make_oracles.py (nltk).
TEST(PorterStemmer, MatchesReferenceVectors)
{
    std::ifstream in(QPPWB_SOURCE_DIR "/tests/data/porter_vectors.tsv");
    ASSERT_TRUE(in) << "missing tests/data/porter_vectors.tsv";
    PorterStemmer s;
    std::string line;
    std::size_t checked = 0, wrong = 0;
    while (std::getline(in, line)) {
        const auto tab = line.find('\t');
        ASSERT_NE(tab, std::string::npos);
        const auto word = line.substr(0, tab), expected = line.substr(tab + 1);
        const auto got = s.stem(word);
        if (got != expected && ++wrong <= 10)
            ADD_FAILURE() << word << ": got " << got << ", expected " << expected;
        ++checked;
    }
    EXPECT_GT(checked, 1000u);
    EXPECT_EQ(wrong, 0u);
}

TEST(Analyze, DropsStopwordsThenStems)
{
    EXPECT_EQ(analyze("The International Crimes of the organized"),
              (std::vector<std::string>{"intern", "crime", "organ"}));
}
