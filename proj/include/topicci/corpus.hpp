// corpus.hpp - tokenization, vocabulary filtering and the document-term matrix.
#pragma once

#include <Eigen/SparseCore>

#include <cstddef>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace topicci {

using StopwordSet = std::unordered_set<std::string>;

struct Document {
    std::string id;
    std::string text;
    std::vector<std::string> tokens;
};

struct Vocabulary {
    std::vector<std::string> terms;                     // lexicographic
    std::unordered_map<std::string, std::size_t> index; // inverse of terms
    std::vector<std::size_t> doc_freq;                  // parallel to terms

    std::size_t size() const noexcept { return terms.size(); }
    bool contains(const std::string& term) const { return index.count(term) != 0; }
};

/// Row-major sparse document x term count matrix.
using CountMatrix = Eigen::SparseMatrix<int, Eigen::RowMajor>;

struct DocTermMatrix {
    CountMatrix counts;

    Eigen::Index n_docs() const noexcept { return counts.rows(); }
    Eigen::Index n_terms() const noexcept { return counts.cols(); }
    long long total() const;
};

class EmptyVocabularyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Lowercased alphanumeric-split tokens; tokens containing digits and
/// stopwords are dropped.
std::vector<std::string> tokenize(std::string_view text, const StopwordSet& stopwords);

void tokenize_all(std::vector<Document>& docs, const StopwordSet& stopwords);

/// Keeps terms with min_df <= df/D <= max_df, sorted lexicographically.
Vocabulary build_vocabulary(const std::vector<Document>& docs, double min_df, double max_df);

DocTermMatrix vectorize(const std::vector<Document>& docs, const Vocabulary& vocab);

/// Builds a dense-backed matrix from a row list; convenient in tests and synth.
DocTermMatrix make_dtm(const std::vector<std::vector<int>>& rows);

// ---- I/O ------------------------------------------------------------------

const StopwordSet& default_stopwords();
StopwordSet read_stopwords(const std::filesystem::path& path);

/// A directory of .txt files (sorted by name, id = stem) or one document per
/// non-empty line (id = 1-based line number).
std::vector<Document> read_corpus(const std::filesystem::path& path);

std::string vocabulary_text(const Vocabulary& vocab);
Vocabulary read_vocabulary(const std::filesystem::path& path);

/// `doc_id,term_index,count` with header; doc_id is the 0-based row.
std::string dtm_csv(const DocTermMatrix& dtm);
DocTermMatrix read_dtm_csv(const std::filesystem::path& path, Eigen::Index n_docs,
                           Eigen::Index n_terms);

}  // namespace topicci
