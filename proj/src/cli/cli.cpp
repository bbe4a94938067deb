#include "transverse/cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "transverse/audit.hpp"

namespace transverse::cli {

namespace {

using ojson = nlohmann::ordered_json;

class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

std::uint64_t parse_uint(std::string_view s, int line, int col, const char* what) {
    if (s.empty()) throw ParseError(std::string("missing value for ") + what, line, col);
    std::uint64_t v = 0;
    for (char c : s) {
        if (c < '0' || c > '9') throw ParseError(std::string("bad value for ") + what, line, col);
        if (v > (UINT64_MAX - 9) / 10) throw ParseError(std::string("value too large for ") + what, line, col);
        v = v * 10 + static_cast<std::uint64_t>(c - '0');
    }
    return v;
}

} // namespace

std::vector<std::uint64_t> parse_modulus(std::string_view text, std::uint64_t p) {
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s += c;
    if (s.empty()) throw gf::FieldError("empty modulus");
    std::vector<std::uint64_t> coeffs;
    std::size_t i = 0;
    while (i < s.size()) {
        bool neg = false;
        if (s[i] == '+' || s[i] == '-') {
            neg = s[i] == '-';
            ++i;
        } else if (i != 0) {
            throw gf::FieldError("bad modulus near '" + s.substr(i) + "'");
        }
        std::uint64_t c = 1;
        bool have_c = false;
        const std::size_t start = i;
        while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
        if (i > start) {
            c = std::stoull(s.substr(start, i - start)) % p;
            have_c = true;
        }
        std::size_t e = 0;
        if (i < s.size() && s[i] == '*') {
            if (!have_c) throw gf::FieldError("bad modulus near '" + s.substr(i) + "'");
            ++i;
            if (i >= s.size() || s[i] != 't') throw gf::FieldError("expected t in modulus");
        }
        if (i < s.size() && s[i] == 't') {
            ++i;
            e = 1;
            if (i < s.size() && s[i] == '^') {
                const std::size_t es = ++i;
                while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
                if (i == es) throw gf::FieldError("missing exponent in modulus");
                e = std::stoull(s.substr(es, i - es));
                if (e > 64) throw gf::FieldError("modulus degree too large");
            }
        } else if (!have_c) {
            throw gf::FieldError("bad modulus near '" + s.substr(start) + "'");
        }
        if (coeffs.size() <= e) coeffs.resize(e + 1, 0);
        coeffs[e] = (coeffs[e] + (neg ? (p - c) % p : c)) % p;
    }
    while (coeffs.size() > 1 && coeffs.back() == 0) coeffs.pop_back();
    return coeffs;
}

InputSpec parse_input(std::string_view text) {
    // Locate the header: first line that is neither blank nor a comment.
    std::size_t pos = 0;
    int line = 1;
    std::string_view header;
    while (pos < text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view l = text.substr(pos, end - pos);
        const std::size_t first = l.find_first_not_of(" \t\r");
        pos = std::min(end + 1, text.size());
        if (first == std::string_view::npos || l[first] == '#') {
            ++line;
            continue;
        }
        header = l;
        break;
    }
    if (header.empty()) throw ParseError("missing header p=<int> m=<int> n=<int>", line, 1);
    const int header_line = line;

    std::optional<std::uint64_t> p, m, n;
    std::optional<std::string> modulus;
    std::size_t i = 0;
    while (i < header.size()) {
        while (i < header.size() && std::isspace(static_cast<unsigned char>(header[i]))) ++i;
        if (i >= header.size()) break;
        const std::size_t start = i;
        while (i < header.size() && !std::isspace(static_cast<unsigned char>(header[i]))) ++i;
        const std::string_view tok = header.substr(start, i - start);
        const int col = static_cast<int>(start) + 1;
        const std::size_t eq = tok.find('=');
        if (eq == std::string_view::npos) throw ParseError("expected key=value in header", header_line, col);
        const std::string_view key = tok.substr(0, eq), val = tok.substr(eq + 1);
        auto set = [&](std::optional<std::uint64_t>& slot) {
            if (slot) throw ParseError("duplicate header key " + std::string(key), header_line, col);
            slot = parse_uint(val, header_line, col + static_cast<int>(eq) + 1, std::string(key).c_str());
        };
        if (key == "p") set(p);
        else if (key == "m") set(m);
        else if (key == "n") set(n);
        else if (key == "modulus") modulus = std::string(val);
        else throw ParseError("unknown header key " + std::string(key), header_line, col);
    }
    if (!p || !m || !n) throw ParseError("header needs p=, m= and n=", header_line, 1);
    if (*m < 1 || *m > 64) throw ParseError("m must lie in [1, 64]", header_line, 1);
    if (*n < 1 || *n > 64) throw ParseError("n must lie in [1, 64]", header_line, 1);
    if (!gf::is_prime(*p)) throw gf::FieldError("p = " + std::to_string(*p) + " is not prime");

    std::optional<std::vector<std::uint64_t>> mod;
    if (modulus) mod = parse_modulus(*modulus, *p);
    FieldPtr F = gf::make_field(*p, static_cast<int>(*m), mod);

    // The polynomial is everything after the header, minus comment lines.
    std::string body;
    int first_line = header_line + 1;
    bool started = false;
    while (pos < text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view l = text.substr(pos, end - pos);
        pos = end + 1;
        const std::size_t first = l.find_first_not_of(" \t\r");
        const bool skip = first == std::string_view::npos || l[first] == '#';
        if (!started) {
            if (skip) {
                ++first_line;
                continue;
            }
            started = true;
        }
        body.append(skip ? std::string_view{} : l);
        body += '\n';
    }
    if (!started) throw ParseError("missing polynomial after the header", first_line, 1);
    Form f = parse_form(body, F, static_cast<int>(*n) + 1, first_line);
    if (f.is_zero()) throw PolyError("the hypersurface form is zero");
    return {F, static_cast<int>(*n), std::move(f)};
}

InputSpec read_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open input file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_input(ss.str());
}

std::string format_input(const InputSpec& spec) {
    const Field& F = *spec.field;
    std::string out = "p=" + std::to_string(F.characteristic()) + " m=" + std::to_string(F.prime_degree()) +
                      " n=" + std::to_string(spec.n);
    if (F.prime_degree() > 1 && F.modulus() != gf::make_field(F.characteristic(), F.prime_degree())->modulus()) {
        std::string mod;
        for (std::size_t e = F.modulus().size(); e-- > 0;) {
            const std::uint64_t c = F.modulus()[e];
            if (!c) continue;
            if (!mod.empty()) mod += "+";
            if (e == 0 || c != 1) mod += std::to_string(c);
            if (e > 0 && c != 1) mod += "*";
            if (e > 0) mod += "t";
            if (e > 1) mod += "^" + std::to_string(e);
        }
        out += " modulus=" + mod;
    }
    return out + "\n" + to_string(spec.form) + "\n";
}

namespace {

ojson field_json(const FieldPtr& F) {
    return {{"p", F->characteristic()}, {"m", F->prime_degree()}, {"q", F->order()}};
}

ojson rejections_json(const Rejections& r) {
    return {{"on_hypersurface", r.on_hypersurface}, {"not_proper", r.not_proper},
            {"not_reduced", r.not_reduced},         {"not_transverse", r.not_transverse},
            {"dual_contained", r.dual_contained},   {"undetermined", r.undetermined}};
}

ojson gate_json(const GateStatus& g) {
    return {{"q", g.q}, {"threshold", g.threshold}, {"satisfied", g.satisfied}, {"outside_hypothesis", g.outside_hypothesis}};
}

ojson header_json(const std::string& command, const InputSpec& in, std::uint64_t seed) {
    ojson j;
    j["command"] = command;
    j["field"] = field_json(in.field);
    j["n"] = in.n;
    j["d"] = in.form.degree();
    j["form"] = to_string(in.form);
    j["seed"] = seed;
    return j;
}

ojson subspace_search_json(ojson j, const SubspaceSearch& s, const Hypersurface& X) {
    j["found"] = s.found ? ojson(to_string(*s.found)) : ojson(nullptr);
    j["found_index"] = s.found ? ojson(s.found_index) : ojson(nullptr);
    j["tested"] = s.tested;
    j["rejections"] = rejections_json(s.rejections);
    j["gate"] = gate_json(s.gate);
    ojson chain = ojson::array();
    for (const auto& H : s.chain) chain.push_back(to_string(H));
    j["chain"] = chain;
    if (s.found) {
        ojson cert;
        cert["section"] = to_string(restrict_form(X.form(), s.found->rows(), X.field()));
        if (s.found->dim() == 1) cert["transverse"] = is_transverse(X, *s.found);
        cert["reduced"] = is_reduced_section(X, *s.found);
        j["certificate"] = cert;
    }
    j["violation"] = s.violation;
    j["note"] = s.note;
    return j;
}

struct Outcome {
    ojson json;
    std::vector<std::pair<std::string, std::string>> csv;  // flat key/value mirror
    int code = kExitOk;
};

std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

void flatten(const ojson& j, const std::string& prefix, std::vector<std::pair<std::string, std::string>>& out) {
    if (j.is_object()) {
        for (auto it = j.begin(); it != j.end(); ++it) flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
    } else if (j.is_array()) {
        std::string joined;
        for (std::size_t i = 0; i < j.size(); ++i) {
            if (i) joined += " | ";
            joined += j[i].is_string() ? j[i].get<std::string>() : j[i].dump();
        }
        out.emplace_back(prefix, joined);
    } else if (j.is_string()) {
        out.emplace_back(prefix, j.get<std::string>());
    } else if (j.is_null()) {
        out.emplace_back(prefix, "");
    } else {
        out.emplace_back(prefix, j.dump());
    }
}

std::string search_csv(const ojson& j) {
    std::vector<std::pair<std::string, std::string>> kv;
    flatten(j, "", kv);
    std::string head, row;
    for (std::size_t i = 0; i < kv.size(); ++i) {
        if (i) {
            head += ",";
            row += ",";
        }
        head += csv_quote(kv[i].first);
        row += csv_quote(kv[i].second);
    }
    return head + "\n" + row + "\n";
}

SearchOptions search_opts(const RunConfig& cfg) {
    SearchOptions o;
    o.seed = cfg.seed;
    o.jobs = cfg.jobs;
    return o;
}

audit::AuditOptions audit_opts(const RunConfig& cfg) {
    return {.seed = cfg.seed, .jobs = cfg.jobs, .timing = cfg.timing};
}

InputSpec need_input(const RunConfig& cfg) {
    if (cfg.input.empty()) throw UsageError(cfg.command + " needs --input");
    return read_input(cfg.input);
}

int need_r(const RunConfig& cfg) {
    if (!cfg.r) throw UsageError(cfg.command + " needs --r");
    return *cfg.r;
}

ojson find_line(const RunConfig& cfg, int& code) {
    const InputSpec in = need_input(cfg);
    Hypersurface X(in.form);
    const SubspaceSearch s = find_transverse_line_reduced(X, search_opts(cfg));
    code = s.violation ? kExitViolation : kExitOk;
    return subspace_search_json(header_json("find-line", in, cfg.seed), s, X);
}

ojson find_reduced(const RunConfig& cfg, int& code) {
    const InputSpec in = need_input(cfg);
    const int r = need_r(cfg);
    Hypersurface X(in.form);
    if (r < 1 || r > in.n - 1) throw UsageError("find-reduced needs 1 <= r <= n-1");
    SubspaceSearch s;
    if (r == 1) s = find_transverse_line_reduced(X, search_opts(cfg));
    else if (r == in.n - 1) s = find_reduced_hyperplane(X, search_opts(cfg));
    else s = find_reduced_plane_section_chain(X, r, search_opts(cfg));
    code = s.violation ? kExitViolation : kExitOk;
    ojson j = header_json("find-reduced", in, cfg.seed);
    j["r"] = r;
    return subspace_search_json(std::move(j), s, X);
}

ojson find_flag(const RunConfig& cfg, int& code) {
    const InputSpec in = need_input(cfg);
    const int r = need_r(cfg);
    Hypersurface X(in.form);
    const FlagSearch f = find_very_transverse_flag(X, r, search_opts(cfg));
    ojson j = header_json("find-flag", in, cfg.seed);
    j["r"] = r;
    ojson steps = ojson::array();
    for (const auto& st : f.steps) {
        ojson s;
        s["dim"] = st.H.dim();
        s["H"] = to_string(st.H);
        s["index"] = st.index;
        s["pool"] = st.pool;
        s["tested"] = st.tested;
        s["rejections"] = rejections_json(st.rejections);
        s["certificate"] = to_string(st.certificate);
        s["exact_retry"] = st.exact_retry;
        s["gate"] = gate_json(st.gate);
        // Independent re-check of each level under the exact dimension test.
        s["verified"] = is_transverse(X, st.H) &&
                        (st.H.dim() == in.n - 1 ||
                         very_transverse_check(X, st.H, {.mode = DimensionMode::Exact}) == VtVerdict::VeryTransverse);
        steps.push_back(std::move(s));
    }
    j["steps"] = steps;
    j["complete"] = f.complete;
    j["failed_step"] = f.failed_step < 0 ? ojson(nullptr) : ojson(f.failed_step);
    j["failed_rejections"] = rejections_json(f.failed_rejections);
    j["violation"] = f.violation;
    j["note"] = f.note;
    code = f.violation ? kExitViolation : kExitOk;
    return j;
}

std::vector<audit::AuditReport> count(const RunConfig& cfg) {
    const InputSpec in = need_input(cfg);
    Hypersurface X(in.form);
    const auto opts = audit_opts(cfg);
    if (cfg.target == "lines") {
        if (in.n != 2) throw UsageError("count lines needs a plane curve (n=2)");
        // The input is one form; its factorization is not known, so the
        // single-component bound is only reported on request.
        auto reps = audit::count_nontransverse_lines({"input", in.field, {in.form}}, opts);
        if (!cfg.irreducible) reps.resize(1);
        return reps;
    }
    if (cfg.target == "hyperplanes") return {audit::count_bad_hyperplanes(X, cfg.t.value_or(0), opts)};
    if (cfg.target == "superspaces") {
        const int r = need_r(cfg);
        if (r < 1 || r > in.n - 1) throw UsageError("count superspaces needs 1 <= r <= n-1");
        if (!cfg.through.empty()) return audit::count_bad_superspaces(X, parse_subspace(cfg.through, in.field, in.n), r, opts);
        const FlagSearch f = find_very_transverse_flag(X, r - 1, search_opts(cfg));
        if (!f.complete) throw UsageError("no very transverse (r-1)-plane found to count through; pass --through");
        return audit::count_bad_superspaces(X, f.steps.back().H, r, opts);
    }
    throw UsageError("count target must be lines, hyperplanes or superspaces");
}

std::vector<audit::AuditReport> run_audit(const RunConfig& cfg) {
    const auto opts = audit_opts(cfg);
    if (cfg.target == "all") return audit::run_all(opts);
    if (cfg.target == "space-filling") {
        return audit::audit_space_filling(cfg.n.value_or(2), cfg.q.value_or(2), cfg.d.value_or(2), opts);
    }
    if (cfg.target == "inequalities") return {audit::inequality_report(cfg.nmax.value_or(6), cfg.dmax.value_or(5), opts)};
    if (cfg.target == "separation") {
        audit::SeparationParams sp;
        if (cfg.n) sp.n = *cfg.n;
        if (cfg.d) sp.d = *cfg.d;
        if (cfg.r) sp.r = *cfg.r;
        if (cfg.samples) sp.samples = *cfg.samples;
        if (cfg.q) {
            const std::uint64_t q = *cfg.q;
            std::uint64_t p = 2;
            while (q % p) ++p;
            int m = 0;
            std::uint64_t v = q;
            while (v % p == 0) {
                v /= p;
                ++m;
            }
            if (q < 2 || v != 1) throw UsageError("--q must be a prime power");
            sp.p = p;
            sp.m = m;
        }
        return {audit::separation_search(sp, opts)};
    }
    throw UsageError("audit target must be all, space-filling, inequalities or separation");
}

void emit(const RunConfig& cfg, const std::string& text, std::ostream& out) {
    if (cfg.out.empty()) {
        out << text;
        return;
    }
    std::ofstream f(cfg.out, std::ios::binary);
    if (!f) throw UsageError("cannot write " + cfg.out);
    f << text;
}

} // namespace

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        if (cfg.format != "json" && cfg.format != "csv") throw UsageError("--format must be json or csv");
        if (cfg.jobs < 1) throw UsageError("--jobs must be positive");
        if (cfg.max_field_bits < 0) throw UsageError("--max-field-bits must be positive");
        if (cfg.max_field_bits > 0) gf::set_max_field_bits(cfg.max_field_bits);

        if (cfg.command == "find-line" || cfg.command == "find-reduced" || cfg.command == "find-flag") {
            int code = kExitOk;
            const ojson j = cfg.command == "find-line"      ? find_line(cfg, code)
                            : cfg.command == "find-reduced" ? find_reduced(cfg, code)
                                                            : find_flag(cfg, code);
            emit(cfg, cfg.format == "json" ? j.dump(2) + "\n" : search_csv(j), out);
            if (code == kExitViolation) err << "theorem violation: search exhausted above the threshold\n";
            return code;
        }
        std::vector<audit::AuditReport> reports;
        if (cfg.command == "count") reports = count(cfg);
        else if (cfg.command == "audit") reports = run_audit(cfg);
        else throw UsageError("unknown command '" + cfg.command + "'");
        emit(cfg, cfg.format == "json" ? audit::to_json(reports) : audit::to_csv(reports), out);
        for (const auto& r : reports)
            if (!r.passed()) {
                err << "failed: " << r.experiment << "\n";
                return kExitAuditFailed;
            }
        return kExitOk;
    } catch (const gf::CapExceeded& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const NotSmooth& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        // Parse, field, geometry, search and usage errors all land here.
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    CLI::App app{"Transverse and reduced linear sections of hypersurfaces over finite fields", "transverse"};
    app.require_subcommand(1, 1);

    auto common = [&](CLI::App* sub) {
        sub->add_option("--out", cfg.out, "Write the report here instead of stdout");
        sub->add_option("--format", cfg.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
        sub->add_option("--seed", cfg.seed, "Seed for randomized steps");
        sub->add_option("--jobs", cfg.jobs, "Worker threads; results do not depend on it");
        sub->add_option("--max-field-bits", cfg.max_field_bits, "Cap on log2 of field orders");
    };
    auto input = [&](CLI::App* sub) { sub->add_option("--input", cfg.input, "Hypersurface file")->check(CLI::ExistingFile); };

    auto* line = app.add_subcommand("find-line", "Transverse line to a reduced hypersurface");
    input(line);
    common(line);
    auto* flag = app.add_subcommand("find-flag", "Very transverse flag up to dimension r");
    input(flag);
    flag->add_option("--r", cfg.r, "Top dimension of the flag")->required();
    common(flag);
    auto* reduced = app.add_subcommand("find-reduced", "r-plane with a reduced section");
    input(reduced);
    reduced->add_option("--r", cfg.r, "Dimension of the plane")->required();
    common(reduced);

    auto* cnt = app.add_subcommand("count", "Count bad subspaces against their bound");
    cnt->add_option("target", cfg.target, "lines, hyperplanes or superspaces")
        ->required()
        ->check(CLI::IsMember({"lines", "hyperplanes", "superspaces"}));
    input(cnt);
    cnt->add_option("--r", cfg.r, "Dimension of the counted superspaces");
    cnt->add_option("--t", cfg.t, "Number of hyperplane components (hyperplanes)");
    cnt->add_option("--through", cfg.through, "Subspace to count through, rows like '1,0,0; 0,1,0'");
    cnt->add_flag("--irreducible", cfg.irreducible, "Also check the bound for irreducible curves");
    cnt->add_flag("--timing", cfg.timing, "Record runtimes in the report");
    common(cnt);

    auto* aud = app.add_subcommand("audit", "Run audit experiments");
    aud->add_option("target", cfg.target, "all, space-filling, inequalities or separation")
        ->required()
        ->check(CLI::IsMember({"all", "space-filling", "inequalities", "separation"}));
    aud->add_option("--n", cfg.n, "Ambient dimension");
    aud->add_option("--q", cfg.q, "Field order");
    aud->add_option("--d", cfg.d, "Degree (separation) or maximal degree (space-filling)");
    aud->add_option("--r", cfg.r, "Subspace dimension (separation)");
    aud->add_option("--samples", cfg.samples, "Random hypersurfaces to try (separation)");
    aud->add_option("--nmax", cfg.nmax, "Largest n on the inequality grid");
    aud->add_option("--dmax", cfg.dmax, "Largest d on the inequality grid");
    aud->add_flag("--timing", cfg.timing, "Record runtimes in the report");
    common(aud);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // Help requests exit 0; every other parse failure is a usage error.
        return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
    }
    for (auto* sub : app.get_subcommands()) cfg.command = sub->get_name();
    return run(cfg, out, err);
}

} // namespace transverse::cli
