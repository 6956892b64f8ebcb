#include "topicci/corpus.hpp"

#include "topicci/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <map>
#include <set>
#include <sstream>

namespace topicci {

namespace {

bool is_alnum_ascii(unsigned char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

long long parse_int(std::string_view s, const std::string& what) {
    long long v = 0;
    s = trim(s);
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size())
        throw std::runtime_error("malformed integer in " + what + ": '" + std::string(s) + "'");
    return v;
}

}  // namespace

long long DocTermMatrix::total() const {
    long long sum = 0;
    for (Eigen::Index d = 0; d < counts.outerSize(); ++d)
        for (CountMatrix::InnerIterator it(counts, d); it; ++it) sum += it.value();
    return sum;
}

std::vector<std::string> tokenize(std::string_view text, const StopwordSet& stopwords) {
    std::vector<std::string> out;
    std::string cur;
    bool has_digit = false;
    auto flush = [&] {
        if (!cur.empty() && !has_digit && !stopwords.count(cur)) out.push_back(cur);
        cur.clear();
        has_digit = false;
    };
    for (char ch : text) {
        const auto c = static_cast<unsigned char>(ch);
        if (!is_alnum_ascii(c)) {
            flush();
            continue;
        }
        if (c >= '0' && c <= '9') has_digit = true;
        cur.push_back(static_cast<char>(std::tolower(c)));
    }
    flush();
    return out;
}

void tokenize_all(std::vector<Document>& docs, const StopwordSet& stopwords) {
    for (auto& doc : docs) doc.tokens = tokenize(doc.text, stopwords);
}

Vocabulary build_vocabulary(const std::vector<Document>& docs, double min_df, double max_df) {
    if (!(min_df >= 0.0 && min_df < max_df && max_df <= 1.0))
        throw std::invalid_argument("document-frequency bounds must satisfy 0 <= min_df < max_df <= 1");
    if (docs.empty()) throw EmptyVocabularyError("empty vocabulary: corpus has no documents");

    std::map<std::string, std::size_t> df;  // ordered -> lexicographic terms
    for (const auto& doc : docs) {
        std::set<std::string_view> seen(doc.tokens.begin(), doc.tokens.end());
        for (auto term : seen) ++df[std::string(term)];
    }

    const double n_docs = static_cast<double>(docs.size());
    Vocabulary vocab;
    for (const auto& [term, count] : df) {
        const double ratio = static_cast<double>(count) / n_docs;
        if (ratio < min_df || ratio > max_df) continue;
        vocab.index.emplace(term, vocab.terms.size());
        vocab.terms.push_back(term);
        vocab.doc_freq.push_back(count);
    }
    if (vocab.terms.empty())
        throw EmptyVocabularyError("empty vocabulary: no term survives the document-frequency filter");
    return vocab;
}

DocTermMatrix vectorize(const std::vector<Document>& docs, const Vocabulary& vocab) {
    std::vector<Eigen::Triplet<int>> triplets;
    for (std::size_t d = 0; d < docs.size(); ++d) {
        std::map<std::size_t, int> row;
        for (const auto& tok : docs[d].tokens) {
            auto it = vocab.index.find(tok);
            if (it != vocab.index.end()) ++row[it->second];
        }
        for (auto [j, c] : row)
            triplets.emplace_back(static_cast<int>(d), static_cast<int>(j), c);
    }
    DocTermMatrix dtm;
    dtm.counts.resize(static_cast<Eigen::Index>(docs.size()), static_cast<Eigen::Index>(vocab.size()));
    dtm.counts.setFromTriplets(triplets.begin(), triplets.end());
    dtm.counts.makeCompressed();
    return dtm;
}

DocTermMatrix make_dtm(const std::vector<std::vector<int>>& rows) {
    const Eigen::Index n_terms = rows.empty() ? 0 : static_cast<Eigen::Index>(rows.front().size());
    std::vector<Eigen::Triplet<int>> triplets;
    for (std::size_t d = 0; d < rows.size(); ++d) {
        if (static_cast<Eigen::Index>(rows[d].size()) != n_terms)
            throw std::invalid_argument("ragged count rows");
        for (std::size_t j = 0; j < rows[d].size(); ++j) {
            if (rows[d][j] < 0) throw std::invalid_argument("negative count");
            if (rows[d][j] > 0)
                triplets.emplace_back(static_cast<int>(d), static_cast<int>(j), rows[d][j]);
        }
    }
    DocTermMatrix dtm;
    dtm.counts.resize(static_cast<Eigen::Index>(rows.size()), n_terms);
    dtm.counts.setFromTriplets(triplets.begin(), triplets.end());
    dtm.counts.makeCompressed();
    return dtm;
}

const StopwordSet& default_stopwords() {
    static const StopwordSet words = {
        "a", "about", "above", "after", "again", "against", "all", "also", "am", "an",
        "and", "any", "are", "as", "at", "be", "because", "been", "before", "being",
        "below", "between", "both", "but", "by", "can", "could", "did", "do", "does",
        "doing", "down", "during", "each", "few", "for", "from", "further", "had", "has",
        "have", "having", "he", "her", "here", "hers", "herself", "him", "himself", "his",
        "how", "however", "i", "if", "in", "into", "is", "it", "its", "itself", "just",
        "may", "me", "more", "most", "my", "myself", "no", "nor", "not", "now", "of",
        "off", "on", "once", "one", "only", "or", "other", "our", "ours", "ourselves",
        "out", "over", "own", "same", "she", "should", "so", "some", "such", "than",
        "that", "the", "their", "theirs", "them", "themselves", "then", "there", "these",
        "they", "this", "those", "through", "thus", "to", "too", "two", "under", "until",
        "up", "us", "very", "was", "we", "were", "what", "when", "where", "which",
        "while", "who", "whom", "why", "will", "with", "within", "would", "you", "your",
        "yours", "yourself", "yourselves"};
    return words;
}

StopwordSet read_stopwords(const std::filesystem::path& path) {
    StopwordSet words;
    std::istringstream in(read_file(path));
    std::string line;
    while (std::getline(in, line)) {
        auto t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        std::string w(t);
        std::transform(w.begin(), w.end(), w.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        words.insert(std::move(w));
    }
    return words;
}

std::vector<Document> read_corpus(const std::filesystem::path& path) {
    namespace fs = std::filesystem;
    std::vector<Document> docs;
    if (fs::is_directory(path)) {
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(path))
            if (entry.is_regular_file() && entry.path().extension() == ".txt")
                files.push_back(entry.path());
        std::sort(files.begin(), files.end());
        for (const auto& f : files) docs.push_back({f.stem().string(), read_file(f), {}});
    } else if (fs::is_regular_file(path)) {
        std::istringstream in(read_file(path));
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (trim(line).empty()) continue;
            docs.push_back({std::to_string(lineno), std::move(line), {}});
        }
    } else {
        throw std::runtime_error("corpus not readable: " + path.string());
    }
    return docs;
}

std::string vocabulary_text(const Vocabulary& vocab) {
    std::string out;
    for (const auto& t : vocab.terms) {
        out += t;
        out += '\n';
    }
    return out;
}

Vocabulary read_vocabulary(const std::filesystem::path& path) {
    Vocabulary vocab;
    std::istringstream in(read_file(path));
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (!vocab.index.emplace(line, vocab.terms.size()).second)
            throw std::runtime_error("duplicate term '" + line + "' in " + path.string());
        vocab.terms.push_back(line);
    }
    vocab.doc_freq.assign(vocab.terms.size(), 0);
    return vocab;
}

std::string dtm_csv(const DocTermMatrix& dtm) {
    std::string out = "doc_id,term_index,count\n";
    for (Eigen::Index d = 0; d < dtm.counts.outerSize(); ++d)
        for (CountMatrix::InnerIterator it(dtm.counts, d); it; ++it) {
            out += std::to_string(d);
            out += ',';
            out += std::to_string(it.col());
            out += ',';
            out += std::to_string(it.value());
            out += '\n';
        }
    return out;
}

DocTermMatrix read_dtm_csv(const std::filesystem::path& path, Eigen::Index n_docs,
                           Eigen::Index n_terms) {
    std::istringstream in(read_file(path));
    std::string line;
    const std::string what = path.string();
    if (!std::getline(in, line) || trim(line) != "doc_id,term_index,count")
        throw std::runtime_error("missing header in " + what);
    std::vector<Eigen::Triplet<int>> triplets;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        std::string_view s(line);
        const auto c1 = s.find(',');
        const auto c2 = s.find(',', c1 == s.npos ? c1 : c1 + 1);
        if (c1 == s.npos || c2 == s.npos) throw std::runtime_error("malformed row in " + what);
        const auto d = parse_int(s.substr(0, c1), what);
        const auto j = parse_int(s.substr(c1 + 1, c2 - c1 - 1), what);
        const auto c = parse_int(s.substr(c2 + 1), what);
        if (d < 0 || d >= n_docs || j < 0 || j >= n_terms || c < 0)
            throw std::runtime_error("entry out of range in " + what);
        triplets.emplace_back(static_cast<int>(d), static_cast<int>(j), static_cast<int>(c));
    }
    DocTermMatrix dtm;
    dtm.counts.resize(n_docs, n_terms);
    dtm.counts.setFromTriplets(triplets.begin(), triplets.end());
    dtm.counts.makeCompressed();
    return dtm;
}

}  // namespace topicci
