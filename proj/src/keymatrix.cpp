#include "adcons/keymatrix.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "adcons/error.hpp"
#include "adcons/simulation.hpp"

namespace adcons {

bool KeyMatrixDoc::has(std::string_view name) const {
    for (const auto& [k, m] : entries)
        if (k == name) return true;
    return false;
}

const Matrix& KeyMatrixDoc::get(std::string_view name) const {
    for (const auto& [k, m] : entries)
        if (k == name) return m;
    throw Error(ErrorKind::Input, "missing matrix '" + std::string(name) + "'");
}

void KeyMatrixDoc::set(std::string name, Matrix m) {
    for (auto& [k, v] : entries) {
        if (k == name) {
            v = std::move(m);
            return;
        }
    }
    entries.emplace_back(std::move(name), std::move(m));
}

double parse_number(std::string_view token, std::string_view context) {
    const std::string s(token);
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE || !std::isfinite(v)) {
        throw Error(ErrorKind::Parse, std::string(context) + ": '" + s + "' is not a finite number");
    }
    return v;
}

std::vector<double> parse_number_list(std::string_view csv, std::string_view context) {
    std::vector<double> out;
    std::size_t start = 0;
    while (start <= csv.size()) {
        const std::size_t comma = csv.find(',', start);
        const std::size_t stop = comma == std::string_view::npos ? csv.size() : comma;
        out.push_back(parse_number(csv.substr(start, stop - start), context));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

namespace {

std::string strip_comment(const std::string& line) {
    const auto hash = line.find('#');
    return hash == std::string::npos ? line : line.substr(0, hash);
}

std::size_t parse_size(const std::string& token, std::size_t line_no) {
    if (token.empty() || token.find_first_not_of("0123456789") != std::string::npos) {
        throw Error(ErrorKind::Parse, "line " + std::to_string(line_no) + ": bad dimension '" + token + "'");
    }
    return static_cast<std::size_t>(std::stoull(token));
}

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

}  // namespace

KeyMatrixDoc parse_keymatrix(std::string_view text) {
    KeyMatrixDoc doc;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;

    std::string name;
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::size_t header_line = 0;
    std::vector<double> values;
    bool pending = false;

    auto finish = [&]() {
        if (doc.has(name)) {
            throw Error(ErrorKind::Parse, "line " + std::to_string(header_line) + ": duplicate matrix '" + name + "'");
        }
        doc.entries.emplace_back(name, Matrix(rows, cols, values));
        pending = false;
        values.clear();
    };

    while (std::getline(in, line)) {
        ++line_no;
        const std::string body = trim(strip_comment(line));
        if (body.empty()) continue;
        std::istringstream ls(body);
        if (!pending) {
            std::string first;
            ls >> first;
            if (first == "leader") {
                if (doc.leader_directive) {
                    throw Error(ErrorKind::Parse, "line " + std::to_string(line_no) + ": duplicate leader directive");
                }
                doc.leader_directive = trim(body.substr(6));
                continue;
            }
            std::string r;
            std::string c;
            if (!(ls >> r >> c)) {
                throw Error(ErrorKind::Parse, "line " + std::to_string(line_no) + ": expected 'name rows cols'");
            }
            name = first;
            rows = parse_size(r, line_no);
            cols = parse_size(c, line_no);
            header_line = line_no;
            pending = true;
            values.clear();
            values.reserve(rows * cols);
            if (rows * cols == 0) finish();
        }
        std::string tok;
        while (pending && ls >> tok) {
            values.push_back(parse_number(tok, "line " + std::to_string(line_no)));
            if (values.size() == rows * cols) finish();
        }
        if (ls >> tok) {
            throw Error(ErrorKind::Parse, "line " + std::to_string(line_no) + ": unexpected token '" + tok + "'");
        }
    }
    if (pending) {
        throw Error(ErrorKind::Parse, "matrix '" + name + "' (line " + std::to_string(header_line) + ") expects " +
                                          std::to_string(rows * cols) + " values, got " +
                                          std::to_string(values.size()));
    }
    return doc;
}

std::string format_keymatrix(const KeyMatrixDoc& doc) {
    std::ostringstream os;
    if (doc.leader_directive) os << "leader " << *doc.leader_directive << '\n';
    for (const auto& [name, m] : doc.entries) {
        os << name << ' ' << m.rows() << ' ' << m.cols() << '\n';
        for (std::size_t i = 0; i < m.rows(); ++i) {
            for (std::size_t j = 0; j < m.cols(); ++j) os << (j ? " " : "") << format_double(m(i, j));
            os << '\n';
        }
    }
    return os.str();
}

LeaderSpec parse_leader(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string variant;
    in >> variant;
    std::vector<std::pair<std::string, std::string>> kv;
    std::string tok;
    while (in >> tok) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos || eq == 0) {
            throw Error(ErrorKind::Parse, "leader parameter '" + tok + "' is not key=value");
        }
        kv.emplace_back(tok.substr(0, eq), tok.substr(eq + 1));
    }
    LeaderSpec spec;
    if (variant == "zero") {
        if (!kv.empty()) throw Error(ErrorKind::Parse, "zero leader takes no parameters");
        spec.variant = ZeroLeader{};
    } else if (variant == "chua") {
        ChuaParams c;
        for (const auto& [k, v] : kv) {
            const double x = parse_number(v, "chua " + k);
            if (k == "a") c.a = x;
            else if (k == "b") c.b = x;
            else if (k == "m01") c.m01 = x;
            else if (k == "m02") c.m02 = x;
            else throw Error(ErrorKind::Parse, "unknown chua parameter '" + k + "'");
        }
        c.validate();
        spec.variant = c;
    } else if (variant == "sinusoid") {
        SinusoidParams s;
        for (const auto& [k, v] : kv) {
            auto list = parse_number_list(v, "sinusoid " + k);
            if (k == "amplitude") s.amplitude = std::move(list);
            else if (k == "frequency") s.frequency = std::move(list);
            else if (k == "phase") s.phase = std::move(list);
            else throw Error(ErrorKind::Parse, "unknown sinusoid parameter '" + k + "'");
        }
        if (s.phase.empty()) s.phase.assign(s.amplitude.size(), 0.0);
        s.validate();
        spec.variant = s;
    } else {
        throw Error(ErrorKind::Parse, "unknown leader variant '" + variant + "' (expected zero, chua or sinusoid)");
    }
    return spec;
}

std::string format_leader(const LeaderSpec& spec) {
    std::ostringstream os;
    os << spec.name();
    auto list = [&os](const char* key, const std::vector<double>& v) {
        os << ' ' << key << '=';
        for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << format_double(v[i]);
    };
    if (const auto* c = std::get_if<ChuaParams>(&spec.variant)) {
        os << " a=" << format_double(c->a) << " b=" << format_double(c->b) << " m01=" << format_double(c->m01)
           << " m02=" << format_double(c->m02);
    } else if (const auto* s = std::get_if<SinusoidParams>(&spec.variant)) {
        list("amplitude", s->amplitude);
        list("frequency", s->frequency);
        list("phase", s->phase);
    }
    return os.str();
}

namespace {

Matrix row_of(const std::vector<double>& v) { return Matrix(1, v.size(), v); }

std::vector<double> values_of(const Matrix& m, const char* name) {
    if (m.rows() != 1 && !m.empty()) {
        throw Error(ErrorKind::Shape, std::string(name) + " must be stored as a single row");
    }
    const auto d = m.data();
    return {d.begin(), d.end()};
}

}  // namespace

KeyMatrixDoc gains_to_doc(const GainSet& g) {
    KeyMatrixDoc doc;
    if (g.K) doc.set("K", *g.K);
    if (g.F) doc.set("F", *g.F);
    if (g.S) doc.set("S", *g.S);
    if (g.P) doc.set("P", *g.P);
    if (g.Pbar) doc.set("Pbar", *g.Pbar);
    if (g.Omega) doc.set("Omega", *g.Omega);
    if (g.Q) doc.set("Q", *g.Q);
    if (g.beta) doc.set("beta", Matrix(1, 1, {*g.beta}));
    if (!g.kappa.empty()) doc.set("kappa", row_of(g.kappa));
    if (!g.phi.empty()) doc.set("phi", row_of(g.phi));
    return doc;
}

GainSet gains_from_doc(const KeyMatrixDoc& doc) {
    GainSet g;
    for (const auto& [name, m] : doc.entries) {
        if (name == "K") g.K = m;
        else if (name == "F") g.F = m;
        else if (name == "S") g.S = m;
        else if (name == "P") g.P = m;
        else if (name == "Pbar") g.Pbar = m;
        else if (name == "Omega") g.Omega = m;
        else if (name == "Q") g.Q = m;
        else if (name == "beta") {
            if (m.rows() != 1 || m.cols() != 1) throw Error(ErrorKind::Shape, "beta must be 1x1");
            g.beta = m(0, 0);
        } else if (name == "kappa") g.kappa = values_of(m, "kappa");
        else if (name == "phi") g.phi = values_of(m, "phi");
        else throw Error(ErrorKind::Parse, "unknown gain '" + name + "'");
    }
    return g;
}

ModelFile model_from_doc(const KeyMatrixDoc& doc) {
    for (const auto& [name, m] : doc.entries) {
        if (name != "A" && name != "B" && name != "C") {
            throw Error(ErrorKind::Parse, "unknown model key '" + name + "' (expected A, B, C)");
        }
    }
    ModelFile f{AgentModel(doc.get("A"), doc.get("B"), doc.get("C")), std::nullopt};
    if (doc.leader_directive) f.leader = parse_leader(*doc.leader_directive);
    return f;
}

KeyMatrixDoc model_to_doc(const AgentModel& model, const std::optional<LeaderSpec>& leader) {
    KeyMatrixDoc doc;
    doc.set("A", model.A);
    doc.set("B", model.B);
    doc.set("C", model.C);
    if (leader) doc.leader_directive = format_leader(*leader);
    return doc;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Input, "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Input, "cannot write '" + path + "'");
    out << text;
    if (!out) throw Error(ErrorKind::Input, "write to '" + path + "' failed");
}

}  // namespace adcons
