#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "transverse/certify.hpp"
#include "transverse/cli.hpp"

using namespace transverse;
using namespace transverse::cli;

namespace {

const std::string data = TEST_DATA_DIR;

struct Result {
    int code;
    std::string out, err;
};

Result invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "transverse");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string temp_file(const std::string& name, const std::string& contents) {
    const auto path = std::filesystem::temp_directory_path() / ("transverse_cli_" + name);
    std::ofstream(path) << contents;
    return path.string();
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("input files") {
    auto conic = parse_input("p=5 m=1 n=2 \n x0*x2 - x1^2");
    CHECK(conic.field->order() == 5);
    CHECK(conic.n == 2);
    CHECK(conic.form.degree() == 2);

    auto f9 = parse_input("p=3 m=2 n=2 \n x0^2 + (t)*x1*x2");
    CHECK(f9.field->order() == 9);
    CHECK(to_string(f9.form) == "x0^2 + (t)*x1*x2");

    auto multi = parse_input("# comment\n\np=7 m=1 n=3\nx0^3 + x1^3\n# more\n  + x2^3\n\n  + x3^3\n");
    CHECK(multi.form.num_terms() == 4);

    auto bad = [](const char* text, int line, int column) {
        try {
            parse_input(text);
            FAIL("no error for " << text);
        } catch (const ParseError& e) {
            CHECK(e.line() == line);
            CHECK(e.column() == column);
        }
    };
    bad("p=5 m=1 n=2 \n x0^2 + x1", 2, 7);
    bad("p=5 m=1 n=2 q=5\nx0", 1, 13);
    bad("p=5 m=1\nx0", 1, 1);
    bad("p=5 m=1 n=x\nx0", 1, 11);
    bad("p=5 m=1 n=2\n\n# nothing\n", 4, 1);
    bad("p=5 m=1 n=2\nx0 + x3", 2, 6);
    CHECK_THROWS_AS(parse_input("p=6 m=1 n=2\nx0"), gf::FieldError);
    CHECK_THROWS_AS(parse_input("p=5 m=1 n=2\nx0 - x0"), PolyError);
    CHECK_THROWS_AS(parse_input("p=3 m=2 n=2 modulus=t^2+1+1\nx0"), gf::FieldError);
}

TEST_CASE("moduli") {
    CHECK(parse_modulus("t^2+1", 3) == std::vector<std::uint64_t>{1, 0, 1});
    CHECK(parse_modulus("t^2 - t - 1", 3) == std::vector<std::uint64_t>{2, 2, 1});
    CHECK(parse_modulus("2*t^3+4*t+3", 5) == std::vector<std::uint64_t>{3, 4, 0, 2});
    CHECK_THROWS_AS(parse_modulus("t^", 3), gf::FieldError);
    CHECK_THROWS_AS(parse_modulus("", 3), gf::FieldError);
    auto spec = parse_input("p=3 m=2 n=1 modulus=t^2+2*t+2\nx0^2 + (t+1)*x1^2");
    CHECK(spec.field->modulus() == std::vector<std::uint64_t>{2, 2, 1});
    CHECK(format_input(spec) == "p=3 m=2 n=1 modulus=t^2+2*t+2\nx0^2 + (t+1)*x1^2\n");
}

TEST_CASE("print then parse is the identity") {
    gf::Rng rng(0xc11);
    const std::vector<std::tuple<std::uint64_t, int, const char*>> fields{
        {2, 1, nullptr}, {5, 1, nullptr}, {3, 2, nullptr}, {2, 3, nullptr}, {3, 2, "t^2+2*t+2"}, {13, 1, nullptr}};
    int checked = 0;
    for (const auto& [p, m, mod] : fields) {
        std::string header = "p=" + std::to_string(p) + " m=" + std::to_string(m);
        for (int n = 1; n <= 3; ++n) {
            for (int trial = 0; trial < 20; ++trial) {
                auto base = parse_input(header + " n=" + std::to_string(n) + (mod ? std::string(" modulus=") + mod : "") +
                                        "\nx0");
                const FieldPtr F = base.field;
                const int d = 1 + static_cast<int>(rng() % 4);
                std::vector<std::pair<std::vector<int>, Elem>> terms;
                for (int k = 0; k < 6; ++k) {
                    std::vector<int> e(n + 1, 0);
                    for (int j = 0; j < d; ++j) ++e[rng() % (n + 1)];
                    terms.emplace_back(e, F->random(rng));
                }
                Form f = Form::from_terms(F, n + 1, d, terms);
                if (f.is_zero()) continue;
                InputSpec spec{F, n, f};
                const std::string text = format_input(spec);
                auto back = parse_input(text);
                CHECK(back.form == f);
                CHECK(back.n == n);
                CHECK(*back.field == *F);
                CHECK(format_input(back) == text);
                ++checked;
            }
        }
    }
    CHECK(checked > 300);
}

TEST_CASE("find commands") {
    auto line = invoke({"find-line", "--input", data + "/conic.txt"});
    CHECK(line.code == kExitOk);
    auto j = nlohmann::json::parse(line.out);
    REQUIRE(j["found"].is_string());
    CHECK(j["certificate"]["transverse"] == true);
    CHECK(j["violation"] == false);
    auto F5 = gf::make_field(5, 1);
    Hypersurface conic(parse_form("x0*x2 - x1^2", F5, 3));
    CHECK(is_transverse(conic, parse_subspace(j["found"].get<std::string>(), F5, 2)));

    auto flag = invoke({"find-flag", "--input", data + "/cubic_surface_f13.txt", "--r", "2"});
    CHECK(flag.code == kExitOk);
    auto fj = nlohmann::json::parse(flag.out);
    CHECK(fj["complete"] == true);
    REQUIRE(fj["steps"].size() == 3);
    auto F13 = gf::make_field(13, 1);
    for (int s = 0; s < 3; ++s) {
        CHECK(fj["steps"][s]["dim"] == s);
        CHECK(fj["steps"][s]["verified"] == true);
        if (s) {
            auto small = parse_subspace(fj["steps"][s - 1]["H"].get<std::string>(), F13, 3);
            auto big = parse_subspace(fj["steps"][s]["H"].get<std::string>(), F13, 3);
            CHECK(subspace_contains(big, small));
        }
    }

    const std::string planes = temp_file("planes.txt", "p=5 m=1 n=3\nx0*x1\n");
    auto red = invoke({"find-reduced", "--input", planes, "--r", "2"});
    CHECK(red.code == kExitOk);
    CHECK(nlohmann::json::parse(red.out)["certificate"]["reduced"] == true);
    auto red1 = invoke({"find-reduced", "--input", planes, "--r", "1"});
    CHECK(red1.code == kExitOk);
    CHECK(invoke({"find-reduced", "--input", planes, "--r", "3"}).code == kExitUsage);

    auto csv = invoke({"find-line", "--input", data + "/conic.txt", "--format", "csv"});
    CHECK(csv.code == kExitOk);
    CHECK(csv.out.rfind("command,field.p,", 0) == 0);
}

TEST_CASE("count and audit commands") {
    auto ineq = invoke({"audit", "inequalities", "--nmax", "6", "--dmax", "5"});
    CHECK(ineq.code == kExitOk);
    auto j = nlohmann::json::parse(ineq.out);
    CHECK(j[0]["observed"] == 0);
    CHECK(j[0]["verdict"] == "pass");

    auto sf = invoke({"audit", "space-filling", "--n", "2", "--q", "2", "--d", "2", "--format", "csv"});
    CHECK(sf.code == kExitOk);
    CHECK(sf.out.find("space-filling-witness,2,3,2,,,7,7,") != std::string::npos);

    auto sep = invoke({"audit", "separation", "--n", "3", "--d", "2", "--q", "5", "--samples", "1"});
    CHECK(sep.code == kExitOk);
    CHECK(nlohmann::json::parse(sep.out)[0]["verdict"] == "observational");

    auto hyper = invoke({"count", "hyperplanes", "--input", temp_file("two.txt", "p=7 m=1 n=3\nx0*x1\n"), "--t", "2"});
    CHECK(hyper.code == kExitOk);
    CHECK(nlohmann::json::parse(hyper.out)[0]["observed"] == 8);

    auto lines = invoke({"count", "lines", "--input", data + "/conic.txt"});
    CHECK(lines.code == kExitOk);
    CHECK(nlohmann::json::parse(lines.out).size() == 1);

    auto sup = invoke({"count", "superspaces", "--input", data + "/cubic_surface_f13.txt", "--r", "1"});
    CHECK(sup.code == kExitOk);
    auto sj = nlohmann::json::parse(sup.out);
    CHECK(sj[0]["experiment"] == "tangent-superspaces");
    CHECK(sj[0]["observed"].get<int>() <= 84);
    auto through = invoke({"count", "superspaces", "--input", data + "/cubic_surface_f13.txt", "--r", "1", "--through",
                        "0,0,0,1"});
    CHECK(through.code == kExitOk);

    // A triple line violates the reducedness hypothesis: every line is bad.
    auto triple = invoke({"count", "lines", "--input", temp_file("triple.txt", "p=7 m=1 n=2\nx0^3\n"), "--irreducible"});
    CHECK(triple.code == kExitAuditFailed);
    CHECK(nlohmann::json::parse(triple.out)[1]["observed"] == 57);
}

TEST_CASE("usage errors") {
    CHECK(invoke({}).code == kExitUsage);
    CHECK(invoke({"frobnicate"}).code == kExitUsage);
    CHECK(invoke({"find-line"}).code == kExitUsage);
    CHECK(invoke({"find-flag", "--input", data + "/conic.txt"}).code == kExitUsage);
    CHECK(invoke({"find-line", "--input", "/nonexistent/file.txt"}).code == kExitUsage);
    CHECK(invoke({"audit", "everything"}).code == kExitUsage);
    CHECK(invoke({"audit", "all", "--format", "xml"}).code == kExitUsage);
    CHECK(invoke({"audit", "separation", "--q", "6"}).code == kExitUsage);
    CHECK(invoke({"--help"}).code == kExitOk);

    auto bad = invoke({"find-line", "--input", temp_file("bad.txt", "p=5 m=1 n=2\nx0^2 + x1\n")});
    CHECK(bad.code == kExitUsage);
    CHECK(bad.err.find("line 2") != std::string::npos);

    auto singular = invoke({"find-flag", "--input", temp_file("sing.txt", "p=5 m=1 n=2\nx0*x1*x2\n"), "--r", "0"});
    CHECK(singular.code == kExitUsage);

    auto capped = invoke({"find-line", "--input", data + "/curve_f9.txt", "--max-field-bits", "2"});
    CHECK(capped.code == kExitUsage);
    gf::set_max_field_bits(gf::kDefaultMaxFieldBits);
}

TEST_CASE("reports are byte-identical across runs and worker counts") {
    const std::string a = temp_file("a.json", ""), b = temp_file("b.json", "");
    CHECK(invoke({"audit", "all", "--out", a}).code == kExitOk);
    CHECK(invoke({"audit", "all", "--out", b, "--jobs", "3"}).code == kExitOk);
    CHECK(slurp(a) == slurp(b));
    CHECK(!slurp(a).empty());

    const std::string c = temp_file("c.csv", ""), d = temp_file("d.csv", "");
    CHECK(invoke({"find-flag", "--input", data + "/cubic_surface_f13.txt", "--r", "1", "--format", "csv", "--out", c}).code ==
          kExitOk);
    CHECK(invoke({"find-flag", "--input", data + "/cubic_surface_f13.txt", "--r", "1", "--format", "csv", "--out", d,
               "--jobs", "4"})
              .code == kExitOk);
    CHECK(slurp(c) == slurp(d));

    auto timed = invoke({"audit", "inequalities", "--nmax", "3", "--dmax", "3", "--timing"});
    CHECK(nlohmann::json::parse(timed.out)[0]["runtime_ms"].is_number());
}
