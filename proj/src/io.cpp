#include "spf/io.hpp"

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace spf {

namespace {

std::ifstream open_in(const std::string& path, bool binary = false) {
    std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    return in;
}

std::ofstream open_out(const std::string& path, bool binary = false) {
    std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    return out;
}

// RFC-4180-ish field splitting with double-quote escaping.
std::vector<std::string> split_delimited(const std::string& line, char delim) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"' && cur.empty()) {
            quoted = true;
        } else if (c == delim) {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    fields.push_back(std::move(cur));
    return fields;
}

std::string strip_cr(std::string s) {
    if (!s.empty() && s.back() == '\r') s.pop_back();
    return s;
}

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t");
    return s.substr(a, b - a + 1);
}

} // namespace

RawCorpus read_corpus(const std::string& path) {
    std::ifstream in = open_in(path);
    std::string header;
    if (!std::getline(in, header))
        throw std::runtime_error("corpus file is empty: " + path);
    header = strip_cr(header);
    const char delim = header.find('\t') != std::string::npos ? '\t' : ',';
    const auto cols = split_delimited(header, delim);
    int id_col = -1, text_col = -1, label_col = -1;
    for (std::size_t i = 0; i < cols.size(); ++i) {
        const std::string c = trim(cols[i]);
        if (c == "doc_id" || c == "id") id_col = static_cast<int>(i);
        else if (c == "text") text_col = static_cast<int>(i);
        else if (c == "label") label_col = static_cast<int>(i);
    }
    if (id_col < 0 || text_col < 0)
        throw std::runtime_error("corpus header must contain doc_id and text columns");

    RawCorpus corpus;
    std::string line;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(line);
        if (line.empty()) continue;
        const auto fields = split_delimited(line, delim);
        if (static_cast<int>(fields.size()) <= std::max(id_col, text_col))
            throw std::runtime_error("corpus line " + std::to_string(line_no) +
                                     ": too few fields");
        RawDoc doc;
        doc.id = fields[id_col];
        doc.text = fields[text_col];
        if (label_col >= 0 && label_col < static_cast<int>(fields.size()))
            doc.label = fields[label_col];
        corpus.docs.push_back(std::move(doc));
    }
    return corpus;
}

void save_vocabulary(const Vocabulary& vocab, const std::string& path) {
    std::ofstream out = open_out(path);
    for (const std::string& t : vocab.terms) out << t << '\n';
}

Vocabulary load_vocabulary(const std::string& path) {
    std::ifstream in = open_in(path);
    Vocabulary vocab;
    std::string line;
    while (std::getline(in, line)) {
        line = strip_cr(line);
        if (line.empty()) continue;
        vocab.index.emplace(line, vocab.size());
        vocab.terms.push_back(line);
    }
    return vocab;
}

void save_dtm(const DocTermMatrix& dtm, const std::string& path) {
    std::ofstream out = open_out(path);
    std::size_t nnz = 0;
    for (const auto& row : dtm.rows) nnz += row.size();
    out << dtm.D << ' ' << dtm.V << ' ' << nnz << '\n';
    for (int d = 0; d < dtm.D; ++d)
        for (auto [v, c] : dtm.rows[d]) out << d << ' ' << v << ' ' << c << '\n';
}

void save_doc_table(const DocTermMatrix& dtm, const std::string& path) {
    std::ofstream out = open_out(path);
    for (int d = 0; d < dtm.D; ++d) {
        out << dtm.doc_ids[d];
        if (dtm.has_labels()) out << '\t' << dtm.labels[d];
        out << '\n';
    }
}

DocTermMatrix load_dtm(const std::string& dtm_path, const std::string& doc_table_path) {
    std::ifstream in = open_in(dtm_path);
    DocTermMatrix dtm;
    std::size_t nnz = 0;
    if (!(in >> dtm.D >> dtm.V >> nnz))
        throw std::runtime_error("bad DTM header in " + dtm_path);
    dtm.rows.resize(dtm.D);
    dtm.totals.assign(dtm.D, 0);
    for (std::size_t i = 0; i < nnz; ++i) {
        int d, v, c;
        if (!(in >> d >> v >> c))
            throw std::runtime_error("truncated DTM triplet file: " + dtm_path);
        if (d < 0 || d >= dtm.D || v < 0 || v >= dtm.V || c < 1)
            throw std::runtime_error("invalid DTM triplet in " + dtm_path);
        dtm.rows[d].emplace_back(v, c);
        dtm.totals[d] += c;
    }
    for (auto& row : dtm.rows)
        std::sort(row.begin(), row.end());

    if (!doc_table_path.empty()) {
        std::ifstream dt = open_in(doc_table_path);
        std::string line;
        bool any_label = false;
        while (std::getline(dt, line)) {
            line = strip_cr(line);
            if (line.empty()) continue;
            const auto tab = line.find('\t');
            dtm.doc_ids.push_back(line.substr(0, tab));
            if (tab != std::string::npos) {
                dtm.labels.push_back(line.substr(tab + 1));
                any_label = true;
            } else {
                dtm.labels.push_back("");
            }
        }
        if (!any_label) dtm.labels.clear();
        if (static_cast<int>(dtm.doc_ids.size()) != dtm.D)
            throw std::runtime_error("doc table row count does not match DTM D");
    } else {
        for (int d = 0; d < dtm.D; ++d) dtm.doc_ids.push_back("doc" + std::to_string(d));
    }
    return dtm;
}

void save_lexicon(const SeedLexicon& lex, const Vocabulary& vocab,
                  const std::string& path) {
    std::ofstream out = open_out(path);
    for (int k = 0; k < lex.K(); ++k) {
        out << lex.topic_names[k] << ':';
        for (std::size_t i = 0; i < lex.seeds[k].size(); ++i)
            out << (i == 0 ? " " : ", ") << vocab.terms[lex.seeds[k][i]];
        out << '\n';
    }
}

SeedLexicon load_lexicon(const std::string& path, const Vocabulary& vocab) {
    std::ifstream in = open_in(path);
    SeedLexicon lex;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(line);
        if (trim(line).empty() || line[0] == '#') continue;
        const auto colon = line.find(':');
        if (colon == std::string::npos)
            throw std::runtime_error("lexicon line " + std::to_string(line_no) +
                                     ": expected 'name: w1, w2, ...'");
        lex.topic_names.push_back(trim(line.substr(0, colon)));
        std::vector<int> seeds;
        std::stringstream rest(line.substr(colon + 1));
        std::string word;
        while (std::getline(rest, word, ',')) {
            word = trim(word);
            if (word.empty()) continue;
            auto it = vocab.index.find(word);
            if (it == vocab.index.end())
                throw std::runtime_error("lexicon seed word not in vocabulary: '" +
                                         word + "'");
            seeds.push_back(it->second);
        }
        lex.seeds.push_back(std::move(seeds));
    }
    return lex;
}

namespace {

constexpr char kModelMagic[4] = {'S', 'P', 'F', 'M'};
constexpr std::uint32_t kModelVersion = 1;

void put_u64(std::ostream& out, std::uint64_t x) {
    unsigned char buf[8];
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>(x >> (8 * i));
    out.write(reinterpret_cast<const char*>(buf), 8);
}

std::uint64_t get_u64(std::istream& in) {
    unsigned char buf[8];
    in.read(reinterpret_cast<char*>(buf), 8);
    if (!in) throw std::runtime_error("truncated model file");
    std::uint64_t x = 0;
    for (int i = 0; i < 8; ++i) x |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
    return x;
}

void put_f64(std::ostream& out, double x) {
    std::uint64_t bits;
    std::memcpy(&bits, &x, 8);
    put_u64(out, bits);
}

double get_f64(std::istream& in) {
    const std::uint64_t bits = get_u64(in);
    double x;
    std::memcpy(&x, &bits, 8);
    return x;
}

void put_str(std::ostream& out, const std::string& s) {
    put_u64(out, s.size());
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string get_str(std::istream& in) {
    const std::uint64_t n = get_u64(in);
    std::string s(n, '\0');
    in.read(s.data(), static_cast<std::streamsize>(n));
    if (!in) throw std::runtime_error("truncated model file");
    return s;
}

void put_f64_vec(std::ostream& out, const std::vector<double>& v) {
    put_u64(out, v.size());
    for (double x : v) put_f64(out, x);
}

std::vector<double> get_f64_vec(std::istream& in) {
    const std::uint64_t n = get_u64(in);
    std::vector<double> v(n);
    for (double& x : v) x = get_f64(in);
    return v;
}

} // namespace

void save_model(const SavedModel& model, const std::string& path) {
    std::ofstream out = open_out(path, true);
    out.write(kModelMagic, 4);
    put_u64(out, kModelVersion);
    put_u64(out, static_cast<std::uint64_t>(model.spec.D));
    put_u64(out, static_cast<std::uint64_t>(model.spec.V));
    put_u64(out, static_cast<std::uint64_t>(model.spec.K));
    const PriorConfig& p = model.spec.priors;
    for (double x : {p.a, p.b, p.c, p.d, p.e, p.f}) put_f64(out, x);

    put_u64(out, static_cast<std::uint64_t>(model.spec.lexicon.K()));
    for (int k = 0; k < model.spec.lexicon.K(); ++k) {
        put_str(out, model.spec.lexicon.topic_names[k]);
        put_u64(out, model.spec.lexicon.seeds[k].size());
        for (int v : model.spec.lexicon.seeds[k]) put_u64(out, static_cast<std::uint64_t>(v));
    }

    put_u64(out, static_cast<std::uint64_t>(model.vocabulary.size()));
    for (const std::string& t : model.vocabulary.terms) put_str(out, t);

    put_f64_vec(out, model.params.theta_shp.data);
    put_f64_vec(out, model.params.theta_rte.data);
    put_f64_vec(out, model.params.beta_shp.data);
    put_f64_vec(out, model.params.beta_rte.data);
    put_f64_vec(out, model.params.btilde_shp);
    put_f64_vec(out, model.params.btilde_rte);

    put_u64(out, static_cast<std::uint64_t>(model.meta.epochs));
    put_f64(out, model.meta.final_elbo);
    put_u64(out, model.meta.rng_seed);
    if (!out) throw std::runtime_error("error writing model file: " + path);
}

SavedModel load_model(const std::string& path) {
    std::ifstream in = open_in(path, true);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kModelMagic, 4) != 0)
        throw std::runtime_error("not a model file: " + path);
    const std::uint64_t version = get_u64(in);
    if (version != kModelVersion)
        throw std::runtime_error("unsupported model file version " +
                                 std::to_string(version));

    SavedModel m;
    m.spec.D = static_cast<int>(get_u64(in));
    m.spec.V = static_cast<int>(get_u64(in));
    m.spec.K = static_cast<int>(get_u64(in));
    PriorConfig& p = m.spec.priors;
    p.a = get_f64(in);
    p.b = get_f64(in);
    p.c = get_f64(in);
    p.d = get_f64(in);
    p.e = get_f64(in);
    p.f = get_f64(in);

    const std::uint64_t K = get_u64(in);
    for (std::uint64_t k = 0; k < K; ++k) {
        m.spec.lexicon.topic_names.push_back(get_str(in));
        const std::uint64_t n = get_u64(in);
        std::vector<int> seeds(n);
        for (auto& v : seeds) v = static_cast<int>(get_u64(in));
        m.spec.lexicon.seeds.push_back(std::move(seeds));
    }

    const std::uint64_t V = get_u64(in);
    for (std::uint64_t v = 0; v < V; ++v) {
        std::string t = get_str(in);
        m.vocabulary.index.emplace(t, m.vocabulary.size());
        m.vocabulary.terms.push_back(std::move(t));
    }

    m.params.theta_shp = Mat(m.spec.D, m.spec.K);
    m.params.theta_rte = Mat(m.spec.D, m.spec.K);
    m.params.beta_shp = Mat(m.spec.K, m.spec.V);
    m.params.beta_rte = Mat(m.spec.K, m.spec.V);
    m.params.theta_shp.data = get_f64_vec(in);
    m.params.theta_rte.data = get_f64_vec(in);
    m.params.beta_shp.data = get_f64_vec(in);
    m.params.beta_rte.data = get_f64_vec(in);
    m.params.btilde_shp = get_f64_vec(in);
    m.params.btilde_rte = get_f64_vec(in);

    m.meta.epochs = static_cast<int>(get_u64(in));
    m.meta.final_elbo = get_f64(in);
    m.meta.rng_seed = get_u64(in);
    return m;
}

void save_trace(const TrainTrace& trace, const std::string& path) {
    std::ofstream out = open_out(path);
    out << "step,epoch,elbo_estimate,seconds\n";
    char buf[128];
    for (std::size_t s = 0; s < trace.step_elbo.size(); ++s) {
        const int epoch = trace.step_epoch[s];
        // Per-epoch wall clock is attributed to the epoch's last step.
        const bool last_in_epoch =
            s + 1 == trace.step_elbo.size() || trace.step_epoch[s + 1] != epoch;
        std::snprintf(buf, sizeof buf, "%zu,%d,%.17g,", s, epoch, trace.step_elbo[s]);
        out << buf;
        if (last_in_epoch && epoch < static_cast<int>(trace.epoch_seconds.size())) {
            std::snprintf(buf, sizeof buf, "%.6f", trace.epoch_seconds[epoch]);
            out << buf;
        }
        out << '\n';
    }
}

void save_assignments(const std::vector<Assignment>& assignments,
                      const std::vector<std::string>& topic_names,
                      const std::string& path) {
    std::ofstream out = open_out(path);
    out << "doc_id,topic_name,certainty\n";
    char buf[64];
    for (const Assignment& a : assignments) {
        const std::string name =
            a.topic < static_cast<int>(topic_names.size()) && !topic_names[a.topic].empty()
                ? topic_names[a.topic]
                : "topic" + std::to_string(a.topic);
        std::snprintf(buf, sizeof buf, "%.17g", a.certainty);
        out << a.doc_id << ',' << name << ',' << buf << '\n';
    }
}

std::vector<LoadedAssignment> load_assignments(const std::string& path) {
    std::ifstream in = open_in(path);
    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error("empty assignments file: " + path);
    std::vector<LoadedAssignment> out;
    while (std::getline(in, line)) {
        line = strip_cr(line);
        if (line.empty()) continue;
        const auto fields = split_delimited(line, ',');
        if (fields.size() != 3)
            throw std::runtime_error("bad assignments line: " + line);
        out.push_back({fields[0], fields[1], std::stod(fields[2])});
    }
    return out;
}

} // namespace spf
