#include "adcons/scenario.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "adcons/error.hpp"
#include "adcons/keymatrix.hpp"

namespace adcons {

namespace fs = std::filesystem;

std::optional<std::string> IniDocument::get(const std::string& section, const std::string& key) const {
    const auto s = sections.find(section);
    if (s == sections.end()) return std::nullopt;
    const auto k = s->second.find(key);
    if (k == s->second.end()) return std::nullopt;
    return k->second;
}

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

const std::map<std::string, std::vector<std::string>>& known_keys() {
    static const std::map<std::string, std::vector<std::string>> keys{
        {"model", {"file"}},
        {"graph", {"file"}},
        {"protocol", {"kind"}},
        {"leader", {"spec", "omega", "x0"}},
        {"gains", {"file", "beta", "kappa", "phi", "K", "F", "S", "P", "Pbar", "Omega", "Q"}},
        {"sim", {"dt", "t_end", "record_every", "integrator", "seed", "init_range", "initial_d", "initial"}},
        {"output", {"dir"}},
    };
    return keys;
}

}  // namespace

IniDocument parse_ini(std::string_view text) {
    IniDocument doc;
    std::istringstream in{std::string(text)};
    std::string line;
    std::string section;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        const std::string body = trim(hash == std::string::npos ? line : line.substr(0, hash));
        if (body.empty()) continue;
        const std::string where = "scenario line " + std::to_string(line_no);
        if (body.front() == '[') {
            if (body.back() != ']') throw Error(ErrorKind::Parse, where + ": unterminated section header");
            section = trim(std::string_view(body).substr(1, body.size() - 2));
            if (!known_keys().count(section)) throw Error(ErrorKind::Parse, where + ": unknown section [" + section + "]");
            doc.sections[section];
            continue;
        }
        const auto eq = body.find('=');
        if (eq == std::string::npos) throw Error(ErrorKind::Parse, where + ": expected key = value");
        if (section.empty()) throw Error(ErrorKind::Parse, where + ": key outside any section");
        const std::string key = trim(std::string_view(body).substr(0, eq));
        const std::string value = trim(std::string_view(body).substr(eq + 1));
        const auto& allowed = known_keys().at(section);
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            throw Error(ErrorKind::Parse, where + ": unknown key '" + key + "' in [" + section + "]");
        }
        if (!doc.sections[section].emplace(key, value).second) {
            throw Error(ErrorKind::Parse, where + ": duplicate key '" + key + "'");
        }
    }
    return doc;
}

Matrix parse_inline_matrix(std::string_view text, std::string_view context) {
    std::vector<std::vector<double>> rows;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto semi = text.find(';', start);
        const auto stop = semi == std::string_view::npos ? text.size() : semi;
        std::istringstream rs{std::string(text.substr(start, stop - start))};
        std::vector<double> row;
        std::string tok;
        while (rs >> tok) row.push_back(parse_number(tok, context));
        if (row.empty()) throw Error(ErrorKind::Parse, std::string(context) + ": empty matrix row");
        if (!rows.empty() && row.size() != rows.front().size()) {
            throw Error(ErrorKind::Parse, std::string(context) + ": ragged matrix rows");
        }
        rows.push_back(std::move(row));
        if (semi == std::string_view::npos) break;
        start = semi + 1;
    }
    std::vector<double> data;
    for (const auto& r : rows) data.insert(data.end(), r.begin(), r.end());
    return Matrix(rows.size(), rows.front().size(), std::move(data));
}

namespace {

double get_double(const IniDocument& doc, const char* section, const char* key, double fallback) {
    const auto v = doc.get(section, key);
    return v ? parse_number(*v, std::string(section) + "." + key) : fallback;
}

std::uint64_t parse_u64(const std::string& text, const std::string& context) {
    if (text.empty() || text.find_first_not_of("0123456789") != std::string::npos) {
        throw Error(ErrorKind::Parse, context + ": '" + text + "' is not a nonnegative integer");
    }
    try {
        return std::stoull(text);
    } catch (const std::out_of_range&) {
        throw Error(ErrorKind::Parse, context + ": '" + text + "' is out of range");
    }
}

// scalar broadcast or one value per follower
std::vector<double> per_follower(const std::string& text, std::size_t followers, const char* key) {
    auto v = parse_number_list(text, std::string("gains.") + key);
    if (v.size() == 1) return std::vector<double>(followers, v.front());
    if (v.size() != followers) {
        throw Error(ErrorKind::Configuration, std::string("gains.") + key + " needs 1 or " +
                                                  std::to_string(followers) + " values, got " +
                                                  std::to_string(v.size()));
    }
    return v;
}

fs::path resolve(const fs::path& base, const std::string& ref) {
    fs::path p(ref);
    return p.is_absolute() ? p : base / p;
}

void apply_override(GainSet& g, const std::string& name, const Matrix& m) {
    if (name == "K") g.K = m;
    else if (name == "F") g.F = m;
    else if (name == "S") g.S = m;
    else if (name == "P") g.P = m;
    else if (name == "Pbar") g.Pbar = m;
    else if (name == "Omega") g.Omega = m;
    else if (name == "Q") g.Q = m;
}

bool contains(const std::vector<std::string>& v, const char* s) { return std::find(v.begin(), v.end(), s) != v.end(); }

}  // namespace

Scenario scenario_from_text(std::string_view text, const fs::path& base_dir, const std::string& name,
                            const ScenarioOverrides& overrides) {
    const IniDocument doc = parse_ini(text);
    Scenario s;
    s.name = name;

    const auto model_ref = doc.get("model", "file");
    if (!model_ref) throw Error(ErrorKind::Configuration, "scenario needs [model] file");
    const ModelFile mf = model_from_doc(parse_keymatrix(read_text_file(resolve(base_dir, *model_ref).string())));
    s.model = mf.model;

    const auto graph_ref = doc.get("graph", "file");
    if (!graph_ref) throw Error(ErrorKind::Configuration, "scenario needs [graph] file");
    s.graph = load_graph(resolve(base_dir, *graph_ref).string());

    const auto kind = doc.get("protocol", "kind");
    if (!kind) throw Error(ErrorKind::Configuration, "scenario needs [protocol] kind");
    s.kind = parse_protocol_kind(*kind);
    if (is_leader_follower(s.kind) != s.graph.has_leader()) {
        throw Error(ErrorKind::Configuration, "protocol " + std::string(to_string(s.kind)) +
                                                  (s.graph.has_leader() ? " cannot run on a leader graph"
                                                                        : " needs a graph with a leader"));
    }

    if (const auto spec = doc.get("leader", "spec")) s.leader = parse_leader(*spec);
    else if (mf.leader) s.leader = *mf.leader;
    if (const auto om = doc.get("leader", "omega")) s.omega = parse_number(*om, "leader.omega");
    if (const auto x0 = doc.get("leader", "x0")) s.sim.leader_initial = Vector(parse_number_list(*x0, "leader.x0"));

    const std::size_t nf = s.graph.follower_count();
    DesignOptions opts;
    if (const auto b = doc.get("gains", "beta")) opts.beta_override = parse_number(*b, "gains.beta");
    s.gains = design_all(s.model, s.leader, nf, opts);
    if (const auto b = doc.get("gains", "beta")) s.gains.beta = *opts.beta_override;
    if (const auto k = doc.get("gains", "kappa")) s.gains.kappa = per_follower(*k, nf, "kappa");
    if (const auto p = doc.get("gains", "phi")) s.gains.phi = per_follower(*p, nf, "phi");

    if (const auto gf = doc.get("gains", "file")) {
        const GainSet file_gains = gains_from_doc(parse_keymatrix(read_text_file(resolve(base_dir, *gf).string())));
        const auto doc_gains = gains_to_doc(file_gains);
        for (const auto& [key, m] : doc_gains.entries) {
            if (key == "beta") s.gains.beta = file_gains.beta;
            else if (key == "kappa") s.gains.kappa = file_gains.kappa;
            else if (key == "phi") s.gains.phi = file_gains.phi;
            else apply_override(s.gains, key, m);
            s.overridden.push_back(key);
        }
    }
    for (const char* key : {"K", "F", "S", "P", "Pbar", "Omega", "Q"}) {
        if (const auto v = doc.get("gains", key)) {
            apply_override(s.gains, key, parse_inline_matrix(*v, std::string("gains.") + key));
            if (!contains(s.overridden, key)) s.overridden.emplace_back(key);
        }
    }
    // complete the pair implied by an overridden certificate
    if (contains(s.overridden, "S")) {
        if (!contains(s.overridden, "Pbar")) s.gains.Pbar = inverse(*s.gains.S);
        if (!contains(s.overridden, "F")) s.gains.F = -1.0 * inverse(*s.gains.S) * s.model.C.transpose();
    }
    if (contains(s.overridden, "P")) {
        const Matrix k = -1.0 * s.model.B.transpose() * inverse(*s.gains.P);
        if (!contains(s.overridden, "K")) s.gains.K = k;
        if (!contains(s.overridden, "Omega")) s.gains.Omega = s.gains.K->transpose() * *s.gains.K;
    }

    s.sim.dt = get_double(doc, "sim", "dt", s.sim.dt);
    s.sim.t_end = get_double(doc, "sim", "t_end", s.sim.t_end);
    if (const auto r = doc.get("sim", "record_every")) s.sim.record_every = parse_u64(*r, "sim.record_every");
    if (const auto i = doc.get("sim", "integrator")) s.sim.integrator = parse_integrator(*i);
    if (const auto sd = doc.get("sim", "seed")) s.sim.seed = parse_u64(*sd, "sim.seed");
    s.sim.init_range = get_double(doc, "sim", "init_range", s.sim.init_range);
    s.sim.initial_d = get_double(doc, "sim", "initial_d", s.sim.initial_d);
    if (const auto im = doc.get("sim", "initial")) {
        if (*im == "random") s.initial = InitialMode::Random;
        else if (*im == "manifold") s.initial = InitialMode::Manifold;
        else throw Error(ErrorKind::Configuration, "sim.initial must be random or manifold");
    }
    if (overrides.seed) s.sim.seed = *overrides.seed;
    if (overrides.dt) s.sim.dt = *overrides.dt;
    if (overrides.t_end) s.sim.t_end = *overrides.t_end;
    s.sim.validate();

    if (overrides.out_dir) s.out_dir = *overrides.out_dir;
    else if (const auto d = doc.get("output", "dir")) s.out_dir = resolve(base_dir, *d);
    else s.out_dir = fs::path("out") / name;
    return s;
}

Scenario load_scenario(const fs::path& path, const ScenarioOverrides& overrides) {
    const std::string text = read_text_file(path.string());
    Scenario s = scenario_from_text(text, path.parent_path(), path.stem().string(), overrides);
    s.source = path;
    return s;
}

NetworkDynamics make_dynamics(const Scenario& s) { return NetworkDynamics(s.kind, s.graph, s.model, s.gains, s.leader); }

NetworkState initial_state(const Scenario& s, const NetworkDynamics& dyn) {
    NetworkState st = random_initial_state(dyn, s.sim);
    if (s.initial == InitialMode::Random) return st;
    if (is_leader_follower(s.kind)) {
        for (auto& x : st.x) x = st.x0;
        st.v0 = st.x0;
        for (auto& v : st.v) v = st.x0;
        for (auto& w : st.w) w = Vector(w.size());
    } else {
        for (auto& x : st.x) x = st.x.front();
        for (auto& v : st.v) v = st.v.front();
        for (auto& w : st.w) w = st.w.front();
    }
    return st;
}

}  // namespace adcons
