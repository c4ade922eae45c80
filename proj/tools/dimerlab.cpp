// dimerlab: command-line front end (stats, verify, move, sample, gen).
#include <dimerlab/graph_spec.hpp>
#include <dimerlab/kasteleyn.hpp>
#include <dimerlab/moves.hpp>
#include <dimerlab/oracle.hpp>
#include <dimerlab/snake.hpp>
#include <dimerlab/statistics.hpp>
#include <dimerlab/zoo.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace dimerlab;
using Q = Rational;
using nlohmann::json;

namespace {

enum Exit { ok = 0, verification_failed = 1, bad_input = 2, numerical = 3 };

/// Where the graph comes from: a GraphSpec file or one of the generators.
struct Source {
    std::string file;
    std::string gen;
    std::size_t n = 1, N = 3, rows = 3, cols = 3;
    std::string theta = "3/5,4/5";
    std::string word = "NE";
    std::string q = "1";
    std::optional<std::uint64_t> random_weights;
    bool float_backend = false;
};

void add_source_options(CLI::App* cmd, Source& s) {
    cmd->add_option("graph,--graph", s.file, "GraphSpec JSON file");
    cmd->add_option("--gen", s.gen,
                    "generator: single-edge, four-cycle, dimerwt, grid, mixed, six-vertex, snake, snake-example, q-fibonacci");
    cmd->add_option("--n", s.n, "multiplicity for uniform generators");
    cmd->add_option("--N", s.N, "grid length (columns minus one)");
    cmd->add_option("--rows", s.rows, "six-vertex rows");
    cmd->add_option("--cols", s.cols, "six-vertex columns");
    cmd->add_option("--theta", s.theta, "six-vertex angle: 'c,s' on the unit circle (exact) or radians (float backend)");
    cmd->add_option("--word", s.word, "snake shape word over {N, E}");
    cmd->add_option("--q", s.q, "scalar q for the q-Fibonacci grid");
    cmd->add_option("--random-weights", s.random_weights, "replace all weights by seeded random rationals");
}

Matrix<Q> random_matrix(std::size_t r, std::size_t c, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> num(1, 5), den(1, 4);
    Matrix<Q> m(r, c);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) {
            m(i, j) = Q(num(rng), den(rng));
            m(i, j).canonicalize();
        }
    return m;
}

EmbeddedGraph<Q> generate(const Source& s) {
    const auto I = eye<Q>(s.n);
    if (s.gen == "single-edge") return single_edge<Q>(I);
    if (s.gen == "four-cycle") return four_cycle<Q>(I, I, I, I);
    if (s.gen == "dimerwt") return dimerwt_graph<Q>(I, I, I, I, I, I, I);
    if (s.gen == "grid") return grid_graph(uniform_grid<Q>(s.N, s.n));
    if (s.gen == "mixed") return mixed_ex_identity<Q>();
    if (s.gen == "six-vertex") {
        const auto comma = s.theta.find(',');
        if (comma == std::string::npos) throw input_error("exact six-vertex needs --theta c,s");
        const Q c = scalar_traits<Q>::parse(s.theta.substr(0, comma));
        const Q sn = scalar_traits<Q>::parse(s.theta.substr(comma + 1));
        if (c * c + sn * sn != 1) throw input_error("--theta c,s must satisfy c^2 + s^2 = 1");
        return six_vertex<Q>(s.rows, s.cols, c, sn);
    }
    if (s.gen == "snake") return snake_graph<Q>(s.word, s.n);
    if (s.gen == "snake-example") {
        std::map<std::string, Matrix<Q>> L;
        for (const char* k : {"A", "B", "C", "D", "E", "F", "G", "H", "M", "N"}) L[k] = I;
        return snake_example<Q>(L);
    }
    if (s.gen == "q-fibonacci") {
        Matrix<Q> m(1, 1);
        m(0, 0) = scalar_traits<Q>::parse(s.q);
        return q_fibonacci_grid(s.N, m).first;
    }
    throw input_error("unknown generator '" + s.gen + "'");
}

EmbeddedGraph<Q> load(const Source& s) {
    if (s.file.empty() == s.gen.empty()) throw input_error("give exactly one of a graph file or --gen");
    EmbeddedGraph<Q> g = s.file.empty() ? generate(s) : load_graph<Q>(s.file);
    if (s.random_weights) {
        std::mt19937_64 rng(*s.random_weights);
        for (EdgeId e = 0; e < g.num_edges(); ++e)
            g.set_weight(e, random_matrix(g.edge(e).weight.rows(), g.edge(e).weight.cols(), rng));
        g.finalize();
    }
    return g;
}

bool angle_theta(const Source& s) { return s.gen == "six-vertex" && s.theta.find(',') == std::string::npos; }

/// Six-vertex aliases center-east etc. name the edges of the central black vertex.
std::string resolve_edge_name(const Source& s, const std::string& name) {
    static const std::map<std::string, char> dirs{{"east", 'E'}, {"west", 'W'}, {"north", 'N'}, {"south", 'S'}};
    if (s.gen == "six-vertex" && name.rfind("center-", 0) == 0) {
        auto it = dirs.find(name.substr(7));
        if (it == dirs.end()) throw input_error("unknown direction in '" + name + "'");
        return "x" + std::to_string(s.cols / 2) + "y" + std::to_string(s.rows / 2) + "-" + it->second;
    }
    return name;
}

template <typename T>
EdgeId edge_id(const EmbeddedGraph<T>& g, const Source& s, const std::string& name) {
    return g.edge_by_name(resolve_edge_name(s, name));
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    for (std::string part; std::getline(ss, part, sep);)
        if (!part.empty()) out.push_back(part);
    return out;
}

template <typename T>
json value_json(const T& x) {
    if constexpr (scalar_traits<T>::is_exact) return {{"exact", scalar_traits<T>::to_string(x)}, {"decimal", x.get_d()}};
    else return x;
}

template <typename T>
json digest(const EmbeddedGraph<T>& g) {
    return {{"vertices", g.num_vertices()}, {"edges", g.num_edges()}, {"faces", g.num_faces()}};
}

/// Collects a report and prints it as text or JSON.
class Report {
public:
    Report(std::string command, bool as_json) : as_json_(as_json) { doc_["command"] = std::move(command); }

    template <typename T>
    void graph(const EmbeddedGraph<T>& g) {
        doc_["graph"] = digest(g);
        text_ << "graph: " << g.num_vertices() << " vertices, " << g.num_edges() << " edges, " << g.num_faces() << " faces\n";
    }
    template <typename T>
    void value(const std::string& key, const T& x, json* into = nullptr) {
        (into ? *into : doc_)[key] = value_json(x);
        text_ << indent_ << key << " = " << render(x) << "\n";
    }
    void line(const std::string& s) { text_ << indent_ << s << "\n"; }
    json& doc() { return doc_; }
    std::ostringstream& text() { return text_; }
    void set_indent(std::string s) { indent_ = std::move(s); }

    void print(std::ostream& os) const {
        if (as_json_) os << doc_.dump(2) << "\n";
        else os << "command: " << doc_["command"].get<std::string>() << "\n" << text_.str();
    }

private:
    bool as_json_;
    json doc_;
    std::ostringstream text_;
    std::string indent_;
};

template <typename T>
void edge_stats(Report& r, const KasteleynSystem<T>& sys, EdgeId e, json& into) {
    const auto P = probability_matrix(sys, e);
    const auto coeffs = char_coeffs(P);
    const auto pmf = edge_distribution(sys, e);
    r.line("edge " + sys.graph().edge(e).name);
    r.set_indent("  ");
    std::string cs;
    json jc = json::array(), jp = json::array();
    for (std::size_t k = 0; k < coeffs.size(); ++k) {
        cs += (k ? ", " : "") + std::string("e") + std::to_string(k) + "=" + render(coeffs[k]);
        jc.push_back(value_json(coeffs[k]));
    }
    r.line("char coeffs of P: " + cs);
    for (std::size_t k = 0; k < pmf.size(); ++k) {
        r.line("P(m=" + std::to_string(k) + ") = " + render(pmf[k]));
        jp.push_back(value_json(pmf[k]));
    }
    into["char_coeffs"] = jc;
    into["pmf"] = jp;
    r.value("mean", expected_multiplicity(P), &into);
    r.value("variance", variance(P), &into);
    if (has_negative_mass(pmf)) {
        r.line("warning: negative mass; the weights do not define a positive measure");
        into["negative_mass"] = true;
    }
    r.set_indent("");
}

struct StatsOpts {
    std::vector<std::string> edges, covariances, products;
};

template <typename T>
int run_stats(const EmbeddedGraph<T>& g, const Source& src, const StatsOpts& o, Report& r) {
    r.graph(g);
    const auto sys = assemble(g);
    if constexpr (scalar_traits<T>::is_ordered) r.value("Z", sys.partition_function());
    json je = json::object();
    for (const auto& name : o.edges) {
        json one;
        edge_stats(r, sys, edge_id(g, src, name), one);
        je[resolve_edge_name(src, name)] = one;
    }
    if (!o.edges.empty()) r.doc()["edges"] = je;
    json jc = json::object();
    for (const auto& pair : o.covariances) {
        const auto parts = split(pair, ',');
        if (parts.size() != 2) throw input_error("--covariance takes e1,e2");
        const T c = covariance(sys, edge_id(g, src, parts[0]), edge_id(g, src, parts[1]));
        r.line("covariance(" + pair + ") = " + render(c));
        jc[pair] = value_json(c);
    }
    if (!o.covariances.empty()) r.doc()["covariances"] = jc;
    json jpr = json::object();
    for (const auto& list : o.products) {
        std::vector<EdgeId> es;
        for (const auto& p : split(list, ',')) es.push_back(edge_id(g, src, p));
        const T v = product_expectation(sys, es);
        r.line("E[product(" + list + ")] = " + render(v));
        jpr[list] = value_json(v);
    }
    if (!o.products.empty()) r.doc()["products"] = jpr;
    return ok;
}

int cmd_verify(const EmbeddedGraph<Q>& g, bool transpose, Report& r) {
    r.graph(g);
    OracleLimits lim = OracleLimits::from_env();
    lim.transpose_minors = transpose;
    if (transpose) r.line("negative control: minors transposed (rows by black colors)");
    const auto sys = assemble(g);
    const Q d = sys.det_K();
    const auto wc = weighted_covers(g, lim);
    bool pass = abs(d) == abs(wc.Z);
    r.value("|det K|", Q(abs(d)));
    r.value("oracle Z", wc.Z);
    r.line(std::string("partition function: ") + (pass ? "match" : "MISMATCH"));
    r.doc()["covers"] = wc.covers.size();
    r.line("covers: " + std::to_string(wc.covers.size()));
    std::size_t dist_ok = 0, pair_ok = 0, pairs = 0;
    const bool z_nonzero = sgn(wc.Z) != 0 && sgn(d) != 0;
    if (z_nonzero) {
        for (EdgeId e = 0; e < g.num_edges(); ++e) {
            auto ref = oracle_distribution(g, e, wc);
            const auto pmf = edge_distribution(sys, e);
            ref.resize(pmf.size(), Q(0));
            dist_ok += pmf == ref;
        }
        for (EdgeId a = 0; a < g.num_edges(); ++a)
            for (EdgeId b = a + 1; b < g.num_edges(); ++b) {
                ++pairs;
                pair_ok += product_expectation(sys, {a, b}) == oracle_product_expectation(wc, {a, b});
            }
    }
    pass = pass && z_nonzero && dist_ok == g.num_edges() && pair_ok == pairs;
    r.line("edge distributions: " + std::to_string(dist_ok) + "/" + std::to_string(g.num_edges()) + " match");
    r.line("pair products: " + std::to_string(pair_ok) + "/" + std::to_string(pairs) + " match");
    r.line(std::string("verdict: ") + (pass ? "PASS" : "FAIL"));
    r.doc()["distributions_matching"] = dist_ok;
    r.doc()["pairs_matching"] = pair_ok;
    r.doc()["pairs"] = pairs;
    r.doc()["verdict"] = pass ? "pass" : "fail";
    return pass ? ok : verification_failed;
}

struct MoveOpts {
    std::string kind, edge, vertex, white, black, face, out;
    bool merge_parallels = false;
};

int cmd_move(const EmbeddedGraph<Q>& g, const MoveOpts& o, Report& r) {
    r.graph(g);
    auto need = [](const std::string& v, const char* flag) {
        if (v.empty()) throw input_error(std::string("this move needs ") + flag);
        return v;
    };
    MoveCertificate<Q> cert = [&] {
        if (o.kind == "leaf" || o.kind == "leaf_trim") return leaf_trim(g, g.edge_by_name(need(o.edge, "--edge")));
        if (o.kind == "parallel" || o.kind == "parallel_reduce")
            return parallel_reduce(g, g.vertex_by_name(need(o.white, "--white")), g.vertex_by_name(need(o.black, "--black")));
        if (o.kind == "contract") return contract(g, g.vertex_by_name(need(o.vertex, "--vertex")));
        if (o.kind == "square") {
            const std::string f = need(o.face, "--face");
            if (f.size() < 2 || f[0] != 'f') throw input_error("--face takes f<k>, the k-th bounded face");
            const std::size_t k = std::stoul(f.substr(1));
            const auto bf = g.bounded_faces();
            if (k >= bf.size()) throw input_error("no bounded face " + f + " (graph has " + std::to_string(bf.size()) + ")");
            return square_move(g, bf[k]);
        }
        throw input_error("unknown move kind '" + o.kind + "' (leaf, parallel, contract, square)");
    }();
    std::vector<MoveCertificate<Q>> steps{cert};
    // contraction usually leaves parallel edges at the merged vertex; fold them one pair at a time
    while (o.merge_parallels) {
        const auto& cur = steps.back().after;
        std::optional<std::pair<VertexId, VertexId>> site;
        for (VertexId w = 0; w < cur.num_vertices() && !site; ++w) {
            if (cur.vertex(w).color != Color::white) continue;
            std::map<VertexId, int> seen;
            for (EdgeId e : cur.vertex(w).rotation)
                if (++seen[cur.other_end(e, w)] == 2) {
                    site = std::make_pair(w, cur.other_end(e, w));
                    break;
                }
        }
        if (!site) break;
        steps.push_back(parallel_reduce(cur, site->first, site->second));
    }
    json js = json::array();
    bool all = true;
    for (const auto& c : steps) {
        json one;
        one["kind"] = move_name(c.kind);
        r.line(std::string("move: ") + move_name(c.kind));
        r.set_indent("  ");
        r.value("normalization", c.normalization, &one);
        r.value("factor", c.factor, &one);
        r.value("Z before", assemble(c.before).partition_function(), &one);
        r.value("Z after", assemble(c.after).partition_function(), &one);
        const auto rep = verify_move_invariance(c);
        json inv = json::object();
        for (std::size_t i = 0; i < rep.edges.size(); ++i) {
            r.line("P preserved on " + rep.edges[i] + ": " + (rep.equal[i] ? "yes" : "NO"));
            inv[rep.edges[i]] = static_cast<bool>(rep.equal[i]);
        }
        one["invariance"] = inv;
        all = all && rep.all();
        r.set_indent("");
        js.push_back(one);
    }
    r.doc()["steps"] = js;
    const auto& after = steps.back().after;
    r.doc()["after"] = digest(after);
    r.line("after: " + std::to_string(after.num_vertices()) + " vertices, " + std::to_string(after.num_edges()) +
           " edges, " + std::to_string(after.num_faces()) + " faces");
    if (!o.out.empty()) {
        save_graph(after, o.out);
        r.line("wrote " + o.out);
        r.doc()["out"] = o.out;
    }
    return all ? ok : verification_failed;
}

int cmd_sample(const EmbeddedGraph<Q>& g, std::size_t count, std::uint64_t seed, Report& r) {
    r.graph(g);
    const auto samples = sample_covers(g, count, seed);
    const auto wc = weighted_covers(g);
    auto cover_json = [&](const Cover& c) {
        json m = json::object();
        for (EdgeId e = 0; e < c.size(); ++e)
            if (c[e]) m[g.edge(e).name] = c[e];
        return m;
    };
    json js = json::array();
    for (const auto& c : samples) {
        js.push_back(cover_json(c));
        r.line(cover_json(c).dump());
    }
    r.doc()["samples"] = js;
    std::map<Cover, std::size_t> freq;
    for (const auto& c : samples) ++freq[c];
    json jf = json::array();
    r.line("frequencies:");
    for (std::size_t i = 0; i < wc.covers.size(); ++i) {
        const std::size_t k = freq.count(wc.covers[i]) ? freq[wc.covers[i]] : 0;
        const Q p = wc.weights[i] / wc.Z;
        std::ostringstream os;
        os << "  " << cover_json(wc.covers[i]).dump() << "  " << k << "/" << count << "  (probability " << render(p) << ")";
        r.line(os.str());
        jf.push_back({{"cover", cover_json(wc.covers[i])}, {"count", k}, {"probability", value_json(p)}});
    }
    r.doc()["frequencies"] = jf;
    return ok;
}

std::string command_echo(int argc, char** argv) {
    std::string s;
    for (int i = 1; i < argc; ++i) s += (i > 1 ? " " : "") + std::string(argv[i]);
    return s;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"dimerlab: exact statistics for dimer models with matrix edge weights"};
    app.require_subcommand(1);
    bool as_json = false;
    app.add_flag("--json", as_json, "machine-readable output");

    Source src;
    StatsOpts so;
    auto* stats = app.add_subcommand("stats", "partition function and edge statistics");
    add_source_options(stats, src);
    stats->add_option("--edge", so.edges, "edge name (repeatable)");
    stats->add_option("--covariance", so.covariances, "e1,e2 (repeatable)");
    stats->add_option("--product", so.products, "e1,e2,... distinct edges (repeatable)");
    stats->add_flag("--float", src.float_backend, "use double arithmetic");
    stats->add_flag("--json", as_json, "machine-readable output");

    bool transpose = false;
    auto* verify = app.add_subcommand("verify", "compare determinant formulas with enumeration");
    add_source_options(verify, src);
    verify->add_flag("--transpose-minors", transpose, "negative control: read edge minors transposed");
    verify->add_flag("--json", as_json, "machine-readable output");

    MoveOpts mo;
    auto* move = app.add_subcommand("move", "apply one local move");
    add_source_options(move, src);
    move->add_option("--kind", mo.kind, "leaf, parallel, contract or square")->required();
    move->add_option("--edge", mo.edge, "leaf edge");
    move->add_option("--vertex", mo.vertex, "contraction center");
    move->add_option("--white", mo.white, "white end of the parallel edges");
    move->add_option("--black", mo.black, "black end of the parallel edges");
    move->add_option("--face", mo.face, "f<k>: k-th bounded face");
    move->add_flag("--merge-parallels", mo.merge_parallels, "after the move, merge every group of parallel edges");
    move->add_option("--out", mo.out, "write the resulting GraphSpec here");
    move->add_flag("--json", as_json, "machine-readable output");

    std::size_t count = 1;
    std::uint64_t seed = 0;
    auto* sample = app.add_subcommand("sample", "draw covers from the dimer measure");
    add_source_options(sample, src);
    sample->add_option("--count", count, "number of covers");
    sample->add_option("--seed", seed, "random seed");
    sample->add_flag("--json", as_json, "machine-readable output");

    std::string out;
    auto* gen = app.add_subcommand("gen", "write a generated graph as GraphSpec");
    add_source_options(gen, src);
    gen->add_option("--out", out, "output file (stdout when absent)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ok : bad_input;
    }

    Report report(command_echo(argc, argv), as_json);
    int code = ok;
    try {
        if (stats->parsed()) {
            if (angle_theta(src)) {
                const double th = scalar_traits<double>::parse(src.theta);
                code = run_stats(six_vertex_angle(src.rows, src.cols, th), src, so, report);
            } else if (src.float_backend) {
                const auto g = load(src);
                code = run_stats(convert_graph<double>(g, [](const Q& x) { return x.get_d(); }), src, so, report);
            } else {
                code = run_stats(load(src), src, so, report);
            }
        } else if (verify->parsed()) {
            code = cmd_verify(load(src), transpose, report);
        } else if (move->parsed()) {
            code = cmd_move(load(src), mo, report);
        } else if (sample->parsed()) {
            code = cmd_sample(load(src), count, seed, report);
        } else if (gen->parsed()) {
            const auto g = load(src);
            if (out.empty()) std::cout << graph_to_json(g).dump(2) << "\n";
            else save_graph(g, out);
            return ok;
        }
    } catch (const singular_matrix& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return numerical;
    } catch (const certificate_mismatch& e) {
        std::cerr << "verification failed: " << e.what() << "\n";
        return verification_failed;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return bad_input;
    }
    report.print(std::cout);
    return code;
}
