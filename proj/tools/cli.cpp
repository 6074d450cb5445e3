#include "cli.hpp"

#include "tubecalc/linalg.hpp"
#include "tubecalc/properties.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>

namespace tubecalc {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

enum class Format { Text, Csv, Json };

struct RunConfig {
    std::string command, spec, fixture;
    Backend backend = Backend::Float;
    unsigned precision = 256;
    double tol = 1e-20;
    std::uint64_t seed = 0;
    Format format = Format::Text;
    int left = -1, right = -1;

    TolerancePolicy policy() const { return {tol, tol}; }
};

struct Failure : std::runtime_error {
    int code;
    Failure(int c, const std::string& msg) : std::runtime_error(msg), code(c) {}
};

// A path as given, else next to `sibling`, else relative to TUBECALC_FIXTURES.
std::string locate(const std::string& path, const std::string& sibling = {}) {
    if (fs::exists(path)) return path;
    if (!sibling.empty()) {
        fs::path p = fs::path(sibling).parent_path() / path;
        if (fs::exists(p)) return p.string();
    }
    if (const char* dir = std::getenv("TUBECALC_FIXTURES")) {
        fs::path p = fs::path(dir) / path;
        if (fs::exists(p)) return p.string();
        p = fs::path(dir) / fs::path(path).filename();
        if (fs::exists(p)) return p.string();
    }
    throw Failure(kExitValidation, "cannot open " + path);
}

std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

template <class T>
std::string str(const T& v) {
    return Field<T>::str(v);
}

std::string pass_word(bool ok) { return ok ? "PASS" : "FAIL"; }

// Loaded category plus the lazily built layers above it.
template <class T>
struct Session {
    const RunConfig& cfg;
    std::shared_ptr<const Category<T>> cat;
    std::shared_ptr<const HomCalc<T>> hom;
    std::unique_ptr<TubeAlgebra<T>> A;
    std::unique_ptr<Monoidal<T>> mon;
    std::vector<SimpleModule<T>> simples;
    bool decomposed = false;

    explicit Session(const RunConfig& c) : cfg(c) {
        try {
            cat = std::make_shared<const Category<T>>(load_spec_file(locate(cfg.spec), cfg.backend), cfg.policy());
        } catch (const SpecError& e) {
            throw Failure(kExitValidation, e.what());
        } catch (const ParseError& e) {
            throw Failure(kExitValidation, e.what());
        }
        hom = std::make_shared<const HomCalc<T>>(cat, cfg.policy());
    }
    TubeAlgebra<T>& algebra() {
        if (!A) A = std::make_unique<TubeAlgebra<T>>(hom);
        return *A;
    }
    const std::vector<SimpleModule<T>>& irreps() {
        if (!decomposed) {
            try {
                simples = decompose(algebra(), regular(algebra()), cfg.seed, cfg.policy());
            } catch (const DecompositionError& e) {
                throw Failure(kExitDecomposition, e.what());
            }
            decomposed = true;
        }
        return simples;
    }
    Monoidal<T>& monoidal() {
        if (!mon) mon = std::make_unique<Monoidal<T>>(algebra());
        return *mon;
    }
    std::string grade_label(int g) const { return cat->label(A->grades()[g]); }
};

template <class T>
int cmd_validate(Session<T>& s, std::ostream& out) {
    auto rep = validate(*s.cat, s.cfg.policy());
    switch (s.cfg.format) {
    case Format::Text:
        out << "spec: " << s.cat->name() << "\n";
        for (const auto& c : rep.checks)
            out << c.name << ": " << pass_word(c.pass) << " (max residual " << format_real(c.residual) << ")\n";
        out << "overall: " << pass_word(rep.ok()) << "\n";
        break;
    case Format::Csv:
        out << "check,residual,pass\n";
        for (const auto& c : rep.checks) out << c.name << "," << format_real(c.residual) << "," << c.pass << "\n";
        break;
    case Format::Json: {
        json j{{"spec", s.cat->name()}, {"ok", rep.ok()}, {"checks", json::array()}};
        for (const auto& c : rep.checks)
            j["checks"].push_back({{"name", c.name}, {"residual", format_real(c.residual)}, {"pass", c.pass}});
        out << j.dump(2) << "\n";
    }
    }
    return rep.ok() ? kExitOk : kExitValidation;
}

template <class T>
int cmd_info(Session<T>& s, std::ostream& out) {
    const auto& c = *s.cat;
    std::vector<std::tuple<std::string, std::string, std::string, int, int, std::string>> rows;
    for (int a = 0; a < c.size(); ++a)
        rows.emplace_back(c.label(a), str(c.d(a)), c.label(c.dual(a)), c.source(a), c.target(a), str(c.pivotal(a)));
    std::vector<std::tuple<std::string, std::string, std::string, int>> fus;
    for (int a = 0; a < c.size(); ++a)
        for (int b = 0; b < c.size(); ++b)
            for (int d = 0; d < c.size(); ++d)
                if (c.N(a, b, d)) fus.emplace_back(c.label(a), c.label(b), c.label(d), c.N(a, b, d));
    switch (s.cfg.format) {
    case Format::Text:
        out << "name: " << c.name() << "\nzero cells: " << c.zero_cells() << "\nsimples: " << c.size() << "\n";
        for (const auto& [n, d, du, src, tgt, p] : rows)
            out << "  " << n << "  d=" << d << "  dual=" << du << "  " << src << "->" << tgt << "  pivotal=" << p << "\n";
        out << "fusion:\n";
        for (const auto& [a, b, d, m] : fus) out << "  " << a << " x " << b << " -> " << d << " (" << m << ")\n";
        for (int i = 0; i < c.zero_cells(); ++i)
            out << "global dimension at cell " << i << ": " << str(global_dimension(c, i)) << "\n";
        break;
    case Format::Csv:
        out << "simple,qdim,dual,source,target,pivotal\n";
        for (const auto& [n, d, du, src, tgt, p] : rows)
            out << csv_quote(n) << "," << csv_quote(d) << "," << csv_quote(du) << "," << src << "," << tgt << ","
                << csv_quote(p) << "\n";
        break;
    case Format::Json: {
        json j{{"name", c.name()}, {"zero_cells", c.zero_cells()}, {"simples", json::array()}, {"fusion", json::array()}};
        for (const auto& [n, d, du, src, tgt, p] : rows)
            j["simples"].push_back({{"name", n}, {"qdim", d}, {"dual", du}, {"source", src}, {"target", tgt}, {"pivotal", p}});
        for (const auto& [a, b, d, m] : fus) j["fusion"].push_back({{"a", a}, {"b", b}, {"c", d}, {"mult", m}});
        json gd = json::array();
        for (int i = 0; i < c.zero_cells(); ++i) gd.push_back(str(global_dimension(c, i)));
        j["global_dimension"] = gd;
        out << j.dump(2) << "\n";
    }
    }
    return kExitOk;
}

template <class T>
int cmd_tube(Session<T>& s, std::ostream& out) {
    auto& A = s.algebra();
    const auto& c = *s.cat;
    switch (s.cfg.format) {
    case Format::Text:
        out << "dim: " << A.dim() << "\ngrades:";
        for (int g : A.grades()) out << " " << c.label(g);
        out << "\nbasis (a; b; x; tree):\n";
        for (int i = 0; i < A.dim(); ++i) out << "  " << i << "  " << A.describe(i) << "\n";
        break;
    case Format::Csv:
        out << "index,a,b,x,tree\n";
        for (int i = 0; i < A.dim(); ++i) {
            const auto& b = A.basis()[i];
            out << i << "," << csv_quote(c.label(b.a)) << "," << csv_quote(c.label(b.b)) << "," << csv_quote(c.label(b.x))
                << "," << b.tree << "\n";
        }
        break;
    case Format::Json: {
        json j{{"dim", A.dim()}, {"grades", json::array()}, {"basis", json::array()}};
        for (int g : A.grades()) j["grades"].push_back(c.label(g));
        for (int i = 0; i < A.dim(); ++i) {
            const auto& b = A.basis()[i];
            j["basis"].push_back({{"a", c.label(b.a)}, {"b", c.label(b.b)}, {"x", c.label(b.x)}, {"tree", b.tree}});
        }
        out << j.dump(2) << "\n";
    }
    }
    return kExitOk;
}

template <class T>
int cmd_irreps(Session<T>& s, std::ostream& out) {
    const auto& simples = s.irreps();
    const auto& A = *s.A;
    auto grades = [&](const Representation<T>& r) {
        std::string g;
        for (std::size_t k = 0; k < r.dims.size(); ++k)
            g += (k ? " " : "") + s.grade_label(static_cast<int>(k)) + ":" + std::to_string(r.dims[k]);
        return g;
    };
    switch (s.cfg.format) {
    case Format::Text:
        out << "tube dim: " << A.dim() << "\nsimples: " << simples.size() << "\n";
        for (std::size_t i = 0; i < simples.size(); ++i)
            out << "  S" << i << "  dim=" << simples[i].rep.total() << "  mult=" << simples[i].multiplicity
                << "  grades[" << grades(simples[i].rep) << "]  twist=" << str(simples[i].twist) << "\n";
        break;
    case Format::Csv:
        out << "index,dim,multiplicity,grades,twist\n";
        for (std::size_t i = 0; i < simples.size(); ++i)
            out << i << "," << simples[i].rep.total() << "," << simples[i].multiplicity << ","
                << csv_quote(grades(simples[i].rep)) << "," << csv_quote(str(simples[i].twist)) << "\n";
        break;
    case Format::Json: {
        json j{{"tube_dim", A.dim()}, {"simples", json::array()}};
        for (std::size_t i = 0; i < simples.size(); ++i)
            j["simples"].push_back({{"index", i},
                                    {"dim", simples[i].rep.total()},
                                    {"multiplicity", simples[i].multiplicity},
                                    {"grade_dims", simples[i].rep.dims},
                                    {"twist", str(simples[i].twist)}});
        out << j.dump(2) << "\n";
    }
    }
    return kExitOk;
}

template <class T>
int cmd_fuse(Session<T>& s, std::ostream& out) {
    const auto& simples = s.irreps();
    const int n = static_cast<int>(simples.size());
    if (s.cfg.left < 0 || s.cfg.left >= n || s.cfg.right < 0 || s.cfg.right >= n)
        throw Failure(kExitUsage, "simple index out of range 0.." + std::to_string(n - 1));
    auto p = s.monoidal().tensor(simples[s.cfg.left].rep, simples[s.cfg.right].rep);
    auto m = multiplicities(simples, p.rep, s.cfg.policy());
    switch (s.cfg.format) {
    case Format::Text: {
        out << "S" << s.cfg.left << " x S" << s.cfg.right << " =";
        bool first = true;
        for (int k = 0; k < n; ++k) {
            if (!m[k]) continue;
            out << (first ? " " : " + ") << (m[k] > 1 ? std::to_string(m[k]) + " " : "") << "S" << k;
            first = false;
        }
        out << (first ? " 0" : "") << "\ndim: " << p.rep.total() << "\n";
        break;
    }
    case Format::Csv:
        out << "simple,multiplicity\n";
        for (int k = 0; k < n; ++k) out << k << "," << m[k] << "\n";
        break;
    case Format::Json:
        out << json{{"left", s.cfg.left}, {"right", s.cfg.right}, {"dim", p.rep.total()}, {"multiplicities", m}}.dump(2)
            << "\n";
    }
    return kExitOk;
}

template <class T>
json matrix_json(const Mat<T>& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json r = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) r.push_back(str<T>(m(i, j)));
        rows.push_back(r);
    }
    return rows;
}

template <class T>
int cmd_modular(Session<T>& s, std::ostream& out) {
    const auto& simples = s.irreps();
    auto md = s.monoidal().modular_data(simples, s.cfg.policy());
    const int n = static_cast<int>(simples.size());
    switch (s.cfg.format) {
    case Format::Text:
        out << "simples: " << n << "  unit: S" << md.unit << "\nglobal dimension (sqrt): " << str(md.global_dim_sqrt)
            << "\n";
        for (int i = 0; i < n; ++i) out << "  S" << i << "  d=" << str(md.dims[i]) << "  theta=" << str(md.twists[i]) << "\n";
        out << "S (normalized):\n";
        for (int i = 0; i < n; ++i) {
            out << " ";
            for (int j = 0; j < n; ++j) out << " " << str<T>(md.S(i, j));
            out << "\n";
        }
        out << "S (unnormalized):\n";
        for (int i = 0; i < n; ++i) {
            out << " ";
            for (int j = 0; j < n; ++j) out << " " << str<T>(md.S_raw(i, j));
            out << "\n";
        }
        out << "T: ";
        for (int i = 0; i < n; ++i) out << (i ? " " : "") << str(md.twists[i]);
        out << "\n";
        break;
    case Format::Csv:
        out << "matrix,row,col,value\n";
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) out << "S," << i << "," << j << "," << csv_quote(str<T>(md.S(i, j))) << "\n";
        for (int i = 0; i < n; ++i) out << "T," << i << "," << i << "," << csv_quote(str(md.twists[i])) << "\n";
        break;
    case Format::Json: {
        json tw = json::array(), dims = json::array();
        for (int i = 0; i < n; ++i) {
            tw.push_back(str(md.twists[i]));
            dims.push_back(str(md.dims[i]));
        }
        out << json{{"unit", md.unit},
                    {"dims", dims},
                    {"twists", tw},
                    {"S", matrix_json(md.S)},
                    {"S_unnormalized", matrix_json(md.S_raw)},
                    {"global_dim_sqrt", str(md.global_dim_sqrt)},
                    {"fusion", md.fusion}}
                   .dump(2)
            << "\n";
    }
    }
    return kExitOk;
}

template <class T>
int cmd_center(Session<T>& s, std::ostream& out) {
    if (s.cfg.fixture.empty()) throw Failure(kExitUsage, "center needs --fixture");
    CenterFixtureDocument doc;
    try {
        doc = load_center_fixture(locate(s.cfg.fixture, locate(s.cfg.spec)), s.cfg.backend);
    } catch (const SpecError& e) {
        throw Failure(kExitValidation, e.what());
    }
    if (!validate(*s.cat, s.cfg.policy()).ok()) throw Failure(kExitValidation, "category data fails validation");
    CenterReport rep;
    try {
        rep = compare(s.monoidal(), s.irreps(), doc, s.cfg.policy(), Real(s.cfg.tol));
    } catch (const SpecError& e) {
        throw Failure(kExitValidation, e.what());
    }
    auto mults = [](const std::vector<int>& m) {
        std::string o;
        for (std::size_t k = 0; k < m.size(); ++k) o += (k ? " " : "") + std::to_string(m[k]);
        return o;
    };
    switch (s.cfg.format) {
    case Format::Text:
        for (const auto& o : rep.objects)
            out << "object " << o.name << ": module law " << pass_word(o.module_ok) << " (residual "
                << format_real(o.module_residual) << ")  multiplicities [" << mults(o.multiplicities) << "]"
                << (o.match >= 0 ? "  -> S" + std::to_string(o.match) : std::string()) << "\n";
        for (const auto& p : rep.pairs) {
            out << "pair " << p.x << " " << p.y << ": " << pass_word(p.ok);
            if (p.evaluated)
                out << " (intertwining " << format_real(p.intertwining) << ", square " << format_real(p.square)
                    << ", invertible " << (p.invertible ? "yes" : "no") << ")\n";
            else
                out << " (skipped: a factor fails the module law)\n";
        }
        if (rep.complete) out << "bijection onto simples: " << pass_word(rep.bijection) << "\n";
        out << "overall: " << pass_word(rep.ok()) << "\n";
        break;
    case Format::Csv:
        out << "kind,x,y,residual,square,evaluated,ok\n";
        for (const auto& o : rep.objects)
            out << "object," << csv_quote(o.name) << ",," << format_real(o.module_residual) << ",,1," << o.module_ok
                << "\n";
        for (const auto& p : rep.pairs)
            out << "pair," << csv_quote(p.x) << "," << csv_quote(p.y) << "," << format_real(p.intertwining) << ","
                << format_real(p.square) << "," << p.evaluated << "," << p.ok << "\n";
        break;
    case Format::Json: {
        json j{{"ok", rep.ok()}, {"negative", doc.negative}, {"complete", rep.complete}, {"bijection", rep.bijection},
               {"objects", json::array()}, {"pairs", json::array()}};
        for (const auto& o : rep.objects)
            j["objects"].push_back({{"name", o.name},
                                    {"module_residual", format_real(o.module_residual)},
                                    {"module_ok", o.module_ok},
                                    {"multiplicities", o.multiplicities},
                                    {"match", o.match}});
        for (const auto& p : rep.pairs)
            j["pairs"].push_back({{"x", p.x},
                                  {"y", p.y},
                                  {"intertwining", format_real(p.intertwining)},
                                  {"square", format_real(p.square)},
                                  {"invertible", p.invertible},
                                  {"evaluated", p.evaluated},
                                  {"ok", p.ok}});
        out << j.dump(2) << "\n";
    }
    }
    return rep.ok() ? kExitOk : kExitDecomposition;
}

// Center fixtures next to the spec (or under TUBECALC_FIXTURES) that refer to it.
std::vector<std::string> center_fixtures_for(const std::string& spec) {
    std::vector<fs::path> dirs{fs::path(spec).parent_path()};
    if (const char* d = std::getenv("TUBECALC_FIXTURES")) dirs.emplace_back(d);
    std::vector<std::string> out;
    std::error_code ec;
    const auto target = fs::weakly_canonical(spec, ec);
    for (const auto& dir : dirs) {
        if (!fs::is_directory(dir, ec)) continue;
        std::vector<fs::path> files;
        for (const auto& e : fs::directory_iterator(dir))
            if (e.path().extension() == ".json") files.push_back(e.path());
        std::sort(files.begin(), files.end());
        for (const auto& f : files) {
            try {
                auto doc = load_center_fixture(f.string(), Backend::Float);
                if (fs::weakly_canonical(doc.spec_path, ec) == target &&
                    std::find(out.begin(), out.end(), f.string()) == out.end())
                    out.push_back(f.string());
            } catch (const std::exception&) {
                // not a center fixture
            }
        }
    }
    return out;
}

template <class T>
int cmd_selftest(Session<T>& s, std::ostream& out) {
    PropertyOptions opt;
    opt.seed = s.cfg.seed;
    opt.pol = s.cfg.policy();
    std::vector<PropertyResult> all = scalar_properties(opt);
    auto add = [&](std::vector<PropertyResult> rs) { all.insert(all.end(), rs.begin(), rs.end()); };
    add(category_properties(*s.cat, opt));
    add(homspace_properties(*s.hom, opt));
    add(tube_properties(s.algebra(), opt));
    std::vector<SimpleModule<T>> simples;
    try {
        add(rep_properties(s.algebra(), opt, &simples));
        s.simples = simples;
        s.decomposed = true;
        add(monoidal_properties(s.monoidal(), simples, opt));
        for (const auto& f : center_fixtures_for(locate(s.cfg.spec))) {
            auto doc = load_center_fixture(f, s.cfg.backend);
            auto rs = center_properties(s.monoidal(), simples, doc, opt);
            for (auto& r : rs) r.name += " [" + fs::path(f).filename().string() + "]";
            add(std::move(rs));
        }
    } catch (const DecompositionError& e) {
        all.push_back({"rep", std::string("decomposition: ") + e.what(), Real(1), 0, false});
    }
    bool ok = true;
    for (const auto& r : all) ok = ok && r.pass;
    switch (s.cfg.format) {
    case Format::Text:
        out << "selftest " << s.cat->name() << " (tolerance " << format_real(opt.tol) << ", seed " << opt.seed << ")\n";
        for (const auto& r : all)
            out << pass_word(r.pass) << "  " << r.suite << " / " << r.name << "  samples=" << r.samples
                << "  residual=" << format_real(r.residual) << "\n";
        out << "overall: " << pass_word(ok) << "\n";
        break;
    case Format::Csv:
        out << "suite,property,samples,residual,pass\n";
        for (const auto& r : all)
            out << r.suite << "," << csv_quote(r.name) << "," << r.samples << "," << format_real(r.residual) << ","
                << r.pass << "\n";
        break;
    case Format::Json: {
        json j{{"ok", ok}, {"results", json::array()}};
        for (const auto& r : all)
            j["results"].push_back({{"suite", r.suite},
                                    {"property", r.name},
                                    {"samples", r.samples},
                                    {"residual", format_real(r.residual)},
                                    {"pass", r.pass}});
        out << j.dump(2) << "\n";
    }
    }
    return ok ? kExitOk : kExitValidation;
}

template <class T>
int dispatch(const RunConfig& cfg, std::ostream& out) {
    Session<T> s(cfg);
    const auto& c = cfg.command;
    if (c == "validate") return cmd_validate(s, out);
    if (c == "info") return cmd_info(s, out);
    if (c == "tube") return cmd_tube(s, out);
    if (c == "irreps") return cmd_irreps(s, out);
    if (c == "fuse") return cmd_fuse(s, out);
    if (c == "modular") return cmd_modular(s, out);
    if (c == "center") return cmd_center(s, out);
    if (c == "selftest") return cmd_selftest(s, out);
    throw Failure(kExitUsage, "unknown command " + c);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    CLI::App app{"Tube algebra calculator"};
    app.require_subcommand(1);
    std::string backend = "float", format = "text";
    app.add_option("--backend", backend, "exact or float")->check(CLI::IsMember({"exact", "float"}));
    app.add_option("--precision", cfg.precision, "mantissa bits of the float backend");
    app.add_option("--tol", cfg.tol, "numerical tolerance");
    app.add_option("--seed", cfg.seed, "random seed");
    app.add_option("--format", format, "text, csv or json")->check(CLI::IsMember({"text", "csv", "json"}));

    struct Sub {
        const char* name;
        const char* help;
    };
    const Sub subs[] = {{"validate", "check the category data"},
                        {"info", "summarize the category"},
                        {"tube", "list the tube algebra basis"},
                        {"irreps", "decompose the regular representation"},
                        {"fuse", "decompose a product of two simples"},
                        {"modular", "S and T matrices"},
                        {"center", "compare half-braidings against the simples"},
                        {"selftest", "run every property suite"}};
    for (const auto& sb : subs) {
        auto* sc = app.add_subcommand(sb.name, sb.help);
        sc->fallthrough();
        sc->add_option("spec", cfg.spec, "category spec file")->required();
        if (std::string(sb.name) == "fuse") {
            sc->add_option("--left", cfg.left, "left simple index")->required();
            sc->add_option("--right", cfg.right, "right simple index")->required();
        }
        if (std::string(sb.name) == "center") sc->add_option("--fixture", cfg.fixture, "center fixture")->required();
        sc->final_callback([&cfg, sc] { cfg.command = sc->get_name(); });
    }

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "tubecalc: usage error: " << e.what() << "\n";
        return kExitUsage;
    }
    if (cfg.precision < 64) {
        err << "tubecalc: usage error: precision must be at least 64 bits\n";
        return kExitUsage;
    }
    if (!(cfg.tol > 0)) {
        err << "tubecalc: usage error: tolerance must be positive\n";
        return kExitUsage;
    }
    cfg.backend = backend == "exact" ? Backend::Exact : Backend::Float;
    cfg.format = format == "csv" ? Format::Csv : format == "json" ? Format::Json : Format::Text;
    set_precision_bits(cfg.precision);

    try {
        return cfg.backend == Backend::Exact ? dispatch<Cyclo>(cfg, out) : dispatch<Cplx>(cfg, out);
    } catch (const Failure& f) {
        const char* kind = f.code == kExitUsage ? "usage" : f.code == kExitValidation ? "validation" : "decomposition";
        err << "tubecalc: " << kind << " error: " << f.what() << "\n";
        return f.code;
    } catch (const std::exception& e) {
        err << "tubecalc: validation error: " << e.what() << "\n";
        return kExitValidation;
    }
}

}  // namespace tubecalc
